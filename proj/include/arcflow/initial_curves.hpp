#pragma once

#include <cstddef>
#include <cstdint>

#include "arcflow/curve.hpp"
#include "arcflow/support_curve.hpp"

namespace arcflow {

/// Exterior part of the circle of radius rho that meets a circular Σ at right
/// angles, centred in direction center_angle from Σ's centre. Nodes run
/// counter-clockwise about the arc centre, from c(a) to c(b).
DiscreteCurve orthogonal_arc(const SupportCurve& sigma, double rho, double center_angle,
                             std::size_t n);

struct Perturbation {
  double amplitude = 0.05;  // relative to rho
  int lobes = 3;
  std::uint64_t seed = 1;
};

/// Phase in [0, 2π) drawn from the seed; identical on every platform.
double perturbation_phase(std::uint64_t seed);

/// Radial perturbation ρ(1 + A w(u)) of the orthogonal arc about its centre,
/// with w(u) = sin²(πu) sin(lobes·π·u + phase) and u ∈ [0, 1] along the arc.
/// Endpoints, contact angles and chord stay those of the unperturbed arc.
DiscreteCurve perturbed_arc(const SupportCurve& sigma, double rho, double center_angle,
                            const Perturbation& pert, std::size_t n);

/// Circle of radius r about c with n nodes, counter-clockwise.
DiscreteCurve circle_curve(double r, std::size_t n, Vec2 c = {});

}  // namespace arcflow
