#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arcflow/diagnostics.hpp"
#include "arcflow/flow.hpp"

namespace arcflow {

enum class Termination {
  t_end,
  converged,
  blowup_detected,
  boundary_collision,
  integration_failure,
  support_crossing,
  step_limit,
};

std::string to_string(Termination t);

/// Per-step trace used by the rate checks.
struct StepLogEntry {
  double t = 0.0;
  double dt = 0.0;
  double length = 0.0;
  double residual_l2 = 0.0;
  double kappa_bar = 0.0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double a = 0.0;
  double b = 0.0;
  bool resampled = false;
};

struct RunOptions {
  std::vector<DensityProbe> probes;
  std::optional<ReferenceValues> reference;
  bool record_steps = false;
  bool store_snapshots = true;
};

struct RunResult {
  Termination termination = Termination::t_end;
  std::vector<FlowState> snapshots;  // parallel to records when stored
  std::vector<DiagnosticsRecord> records;
  std::vector<StepLogEntry> steps;
  FlowState final_state;
  /// ∫κ̄² dt accumulated by the trapezoid rule up to each record.
  std::vector<double> kbar2_integral;
};

/// Integrates until t_end, convergence (area-preserving mode only), an event,
/// or the step limit. Records diagnostics every sample_every steps, twice as
/// often once max|κ| exceeds ten times its initial value.
RunResult run(const FlowState& initial, const SupportCurve& sigma, const FlowConfig& config,
              FlowMode mode, const RunOptions& options = {});

struct AdmissibilityReport {
  double L0 = 0.0;
  double A0 = 0.0;
  double kappa_max = 0.0;
  double sigma_d = 0.0;
  double diameter = 0.0;
  double C = 0.0;    // 4/(5 κ_max) arcsin(A0/L0²)
  double c_I = 0.0;  // A0/L0²
  bool positive_curvature = false;
  bool embedded = false;
  bool outside_support = false;
  bool below_sigma_d = false;
  bool below_half_inverse_kappa_max = false;
  bool below_arcsin_bound = false;
  bool isoperimetric_ok = false;  // c_I ≤ 1/(2π) + 1e-9

  bool admissible() const {
    return positive_curvature && embedded && outside_support && below_sigma_d &&
           below_half_inverse_kappa_max && below_arcsin_bound;
  }
};

/// Throws InvalidInput when an endpoint is farther than 1e-6·diam from Σ.
AdmissibilityReport check_admissibility(const DiscreteCurve& curve, const SupportCurve& sigma);
AdmissibilityReport check_admissibility(const DiscreteCurve& curve, const SupportCurve& sigma,
                                        const SupportMetrics& m);

}  // namespace arcflow
