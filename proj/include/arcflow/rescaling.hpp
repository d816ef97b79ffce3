#pragma once

#include <optional>
#include <vector>

#include "arcflow/curve.hpp"
#include "arcflow/flow.hpp"

namespace arcflow {

enum class SingularityType { typeI, typeII, inconclusive, no_singularity };

std::string to_string(SingularityType t);

struct BlowupHistorySample {
  double t = 0.0;
  double kappa_max = 0.0;
};

struct SingularityReport {
  SingularityType type = SingularityType::inconclusive;
  double sup_product = 0.0;     // sup κ_max²(T − t) over the history
  double T_est = 0.0;
  double inverse_slope = 0.0;   // d(1/κ_max²)/dt of the tail fit
  double decade_growth = 0.0;   // relative growth of the product over the last decade
  std::size_t decade_samples = 0;
};

/// Classifies by the growth of κ_max²(T − t) over the last decade of T − t.
/// Without T_est, T is extrapolated from a linear fit of 1/κ_max² over the last
/// 20 samples; fits with slope above −1 are reported as no_singularity.
SingularityReport classify_singularity(const std::vector<BlowupHistorySample>& history,
                                       std::optional<double> T_est = std::nullopt);

struct RescaledFrame {
  DiscreteCurve curve;
  double tau = 0.0;
  double Q = 1.0;
  Vec2 origin;
};

/// Nodes ↦ Q(node − x0), τ = Q²(t − T).
RescaledFrame parabolic_rescale(const FlowState& state, const Vec2& x0, double T_est, double Q);

struct BlowupSample {
  std::size_t p = 0;
  double t = 0.0;
  double Q = 0.0;
  std::size_t snapshot = 0;
};

/// Frames of one rung of the Hamilton ladder: every stored snapshot with
/// t < T − 1/j, rescaled by Q_j about c(p_j, t_j) with τ = Q_j²(t − t_j).
struct HamiltonSequence {
  int j = 0;
  BlowupSample sample;
  std::vector<RescaledFrame> frames;
  std::size_t center_frame = 0;
};

/// Throws InvalidInput when no snapshot lies before T − 1/j for any rung.
std::vector<HamiltonSequence> hamilton_rescale(const std::vector<FlowState>& snapshots, double T,
                                               const std::vector<int>& ladder);

struct ShrinkerResidual {
  std::vector<double> values;
  double l2 = 0.0;
};

/// r_i = κ_i − ⟨x_i, ν_i⟩/(2τ). Throws DomainError for τ ≥ 0.
ShrinkerResidual self_shrinker_residual(const RescaledFrame& frame);

/// Graph x = −log cos y + τ on [y_min, y_max], equal arclength, nodes ordered
/// by decreasing y so that κ = cos y > 0.
DiscreteCurve grim_reaper(double tau, double y_min, double y_max, std::size_t n);

/// x at which the polyline crosses y = 0 (linear interpolation).
std::optional<double> tip_position(const DiscreteCurve& curve);

struct ArcFit {
  Vec2 center;
  double radius = 0.0;
  double rms = 0.0;
  bool line = false;
  /// Angle between each endpoint tangent and the fitted radius direction.
  double start_contact = 0.0;
  double end_contact = 0.0;
};

/// Algebraic (Kåsa) circle fit followed by one Gauss-Newton geometric step.
ArcFit fit_circular_arc(const DiscreteCurve& curve);

}  // namespace arcflow
