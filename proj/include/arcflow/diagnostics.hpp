#pragma once

#include <optional>
#include <vector>

#include "arcflow/curve.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/support_curve.hpp"

namespace arcflow {

struct DensityProbe {
  Vec2 x0;
  double T_probe = 0.0;
  /// exp(−½∫₀ᵗ κ̄²); maintained by the runner.
  double f_accumulator = 1.0;
};

/// exp(−½ ∫ κ̄²) by the trapezoid rule over (time, κ̄) samples.
double density_weight(const std::vector<double>& times, const std::vector<double>& kappa_bar);

struct IndexResult {
  int index = 0;
  double raw = 0.0;
  bool warning = false;  // raw farther than 0.2 from an integer
};

struct RecordFlags {
  bool embedded = true;
  std::optional<bool> contained_in_D;
  std::optional<bool> chord_region_convex;
  std::optional<bool> kappa_bar_in_window;
  std::optional<bool> turning_in_window;
};

struct DiagnosticsRecord {
  double t = 0.0;
  std::size_t step = 0;
  double length = 0.0;
  double area = 0.0;
  double kappa_bar = 0.0;
  double turning = 0.0;
  int index = 0;
  double index_raw = 0.0;
  double min_kappa = 0.0;
  double max_kappa = 0.0;
  double residual_l2 = 0.0;
  double density = 0.0;  // first probe, NaN when none applies
  std::vector<double> densities;
  double f_weight = 1.0;
  double lift_a = 0.0;
  double lift_b = 0.0;
  RecordFlags flags;
};

/// Initial data against which the window flags are evaluated.
struct ReferenceValues {
  double L0 = 0.0;
  double A0 = 0.0;
  double diameter = 0.0;
};

struct RecordContext {
  FlowMode mode = FlowMode::area_preserving;
  std::optional<ReferenceValues> reference;
  std::vector<DensityProbe> probes;
  double f_weight = 1.0;
};

/// Oriented area enclosed by the curve and the Σ-arc from Σf(a) to Σf(b).
double enclosed_area(const DiscreteCurve& curve, const SupportCurve& sigma, const BoundaryLift& lift);

IndexResult index(const DiscreteCurve& curve, const SupportCurve& sigma, const BoundaryLift& lift);

/// Backward heat kernel (4π(T−t))^{−1/2} exp(−|x−x0|²/(4(T−t))).
double heat_kernel(const Vec2& x, const Vec2& x0, double T_minus_t);

/// f · Σ ρ(node) w. Throws DomainError when t ≥ T_probe.
double gaussian_density(const DiscreteCurve& curve, const DensityProbe& probe, double t);

/// Convexity of the polygon closed by the chord from the last node to the first.
bool chord_region_convex(const DiscreteCurve& curve);

/// Distance from q to Σ (closest dense-sample segment, refined by projection outside Σ).
double distance_to_support(const SupportCurve& sigma, const Vec2& q);

/// Bounds on κ̄ for admissible flows: [π/L0, (L0 + 2 diam)π/(2 A0)].
struct KappaBarWindow {
  double lower = 0.0;
  double upper = 0.0;
};
KappaBarWindow kappa_bar_window(const ReferenceValues& ref);

/// Lower bound 4A0/(L0 + 2 diam) on the length of admissible flows.
double length_lower_bound(const ReferenceValues& ref);

DiagnosticsRecord assemble_record(const FlowState& state, const SupportCurve& sigma,
                                  const RecordContext& context);

}  // namespace arcflow
