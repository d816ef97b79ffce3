#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "arcflow/curve.hpp"
#include "arcflow/support_curve.hpp"

namespace arcflow {

enum class FlowMode { area_preserving, csf };

std::string to_string(FlowMode mode);
FlowMode flow_mode_from_string(const std::string& name);

struct FlowConfig {
  double dt_safety = 0.5;
  std::size_t resample_every = 2000;  // 0 disables resampling
  std::size_t n_nodes = 200;
  double t_end = 1.0;
  double stop_tolerance = 1e-8;
  double max_kappa_abort = 1e4;
  std::size_t max_steps = 0;  // 0 = unlimited
  std::size_t sample_every = 100;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

struct FlowState {
  DiscreteCurve curve;
  BoundaryLift lift;
  double t = 0.0;
  std::size_t step_index = 0;
  /// Endpoints ride on Σ with perpendicular contact. False for closed or free curves.
  bool attached = true;
};

/// Attached state whose endpoints are snapped to Σf(a), Σf(b) from projection.
FlowState attach(DiscreteCurve curve, const SupportCurve& sigma);

enum class StepEvent { ok, blowup_detected, boundary_collision, integration_failure };

std::string to_string(StepEvent event);

/// Curvature and derived quantities at the current state.
struct FlowEvaluation {
  CurvatureSamples kappa;
  double kappa_bar = 0.0;      // the multiplier used in the velocity (0 in csf mode)
  double mean_curvature = 0.0; // ∫κ ds / L regardless of mode
  double residual_l2 = 0.0;    // ∫(κ − κ̄)² ds with κ̄ = mean_curvature
  double length = 0.0;
};

struct StepResult {
  FlowState state;
  StepEvent event = StepEvent::ok;
  double dt = 0.0;
  FlowEvaluation before;
};

double kappa_bar(const CurvatureSamples& kappa);
double kappa_bar(const DiscreteCurve& curve);

/// Curvature used by the flow: ghost-node endpoints for attached states.
CurvatureSamples flow_curvature(const FlowState& state, const SupportCurve& sigma);

FlowEvaluation evaluate(const FlowState& state, const SupportCurve& sigma, FlowMode mode);

/// (κ − κ̄)ν per node, or κν in csf mode.
std::vector<Vec2> velocity(const DiscreteCurve& curve, FlowMode mode);
std::vector<Vec2> velocity(const DiscreteCurve& curve, const CurvatureSamples& kappa, double kbar);

/// Time step dt = dt_safety · h²/2 with h the shortest segment.
double stable_dt(const DiscreteCurve& curve, const FlowConfig& config);

/// One explicit Euler step. On any event other than ok the returned state is
/// the input state.
StepResult step(const FlowState& state, const SupportCurve& sigma, const FlowConfig& config,
                FlowMode mode);
/// Same, reusing an evaluation of `state`.
StepResult step(const FlowState& state, const SupportCurve& sigma, const FlowConfig& config,
                const FlowEvaluation& ev);

}  // namespace arcflow
