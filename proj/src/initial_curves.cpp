#include "arcflow/initial_curves.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "arcflow/errors.hpp"

namespace arcflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kOversample = 16;

struct ArcFrame {
  Vec2 center;
  double phi0;  // start angle about the arc centre
  double span;  // angular extent
};

ArcFrame arc_frame(const SupportCurve& sigma, double rho, double center_angle) {
  if (sigma.kind() != SupportCurve::Kind::circle) {
    throw InvalidInput("orthogonal arcs are defined for circular supports only");
  }
  if (!(rho > 0.0)) throw InvalidInput("arc radius must be positive");
  const double R = sigma.radius();
  const double d = std::hypot(R, rho);
  const double beta = std::atan2(R, rho);
  ArcFrame f;
  f.center = sigma.center() + d * Vec2{std::cos(center_angle), std::sin(center_angle)};
  f.phi0 = center_angle - kPi + beta;
  f.span = 2.0 * (kPi - beta);
  return f;
}

DiscreteCurve build(const ArcFrame& f, double rho, const Perturbation* pert, std::size_t n) {
  if (n < 4) throw InvalidInput("initial curve needs at least 4 nodes");
  const std::size_t m = kOversample * n;
  const double phase = pert ? perturbation_phase(pert->seed) : 0.0;
  std::vector<Vec2> p(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(m - 1);
    double r = rho;
    if (pert) {
      const double s = std::sin(kPi * u);
      r *= 1.0 + pert->amplitude * s * s * std::sin(pert->lobes * kPi * u + phase);
    }
    const double phi = f.phi0 + f.span * u;
    p[i] = f.center + r * Vec2{std::cos(phi), std::sin(phi)};
  }
  return resample_uniform(DiscreteCurve(std::move(p), false), n);
}

}  // namespace

double perturbation_phase(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::uint64_t bits = gen() >> 11;
  return 2.0 * kPi * static_cast<double>(bits) * 0x1.0p-53;
}

DiscreteCurve orthogonal_arc(const SupportCurve& sigma, double rho, double center_angle,
                             std::size_t n) {
  const ArcFrame f = arc_frame(sigma, rho, center_angle);
  if (n < 4) throw InvalidInput("initial curve needs at least 4 nodes");
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = f.phi0 + f.span * static_cast<double>(i) / static_cast<double>(n - 1);
    p[i] = f.center + rho * Vec2{std::cos(phi), std::sin(phi)};
  }
  return DiscreteCurve(std::move(p), false);
}

DiscreteCurve perturbed_arc(const SupportCurve& sigma, double rho, double center_angle,
                            const Perturbation& pert, std::size_t n) {
  if (!(pert.amplitude >= 0.0) || pert.amplitude >= 1.0) {
    throw InvalidInput("perturbation amplitude must lie in [0, 1)");
  }
  return build(arc_frame(sigma, rho, center_angle), rho, &pert, n);
}

DiscreteCurve circle_curve(double r, std::size_t n, Vec2 c) {
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    p[i] = c + r * Vec2{std::cos(t), std::sin(t)};
  }
  return DiscreteCurve(std::move(p), true);
}

}  // namespace arcflow
