#include "arcflow/runner.hpp"

#include <cmath>
#include <numbers>

#include "arcflow/errors.hpp"

namespace arcflow {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::t_end: return "t_end";
    case Termination::converged: return "converged";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::boundary_collision: return "boundary_collision";
    case Termination::integration_failure: return "integration_failure";
    case Termination::support_crossing: return "support_crossing";
    case Termination::step_limit: return "step_limit";
  }
  return "unknown";
}

namespace {

Termination from_event(StepEvent e) {
  switch (e) {
    case StepEvent::blowup_detected: return Termination::blowup_detected;
    case StepEvent::boundary_collision: return Termination::boundary_collision;
    default: return Termination::integration_failure;
  }
}

bool crosses_support(const FlowState& state, const SupportCurve& sigma) {
  const auto& p = state.curve.nodes();
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (sigma.contains(p[i])) return true;
  }
  return false;
}

}  // namespace

RunResult run(const FlowState& initial, const SupportCurve& sigma, const FlowConfig& config,
              FlowMode mode, const RunOptions& options) {
  config.validate();
  RunResult out;
  RecordContext ctx;
  ctx.mode = mode;
  ctx.reference = options.reference;
  ctx.probes = options.probes;

  FlowState state = initial;
  double kbar2_int = 0.0;
  double prev_kbar2 = 0.0;
  double prev_dt = 0.0;
  std::size_t cadence = config.sample_every;
  double kmax0 = -1.0;
  bool refined = false;

  auto record = [&](const FlowState& s) {
    ctx.f_weight = std::exp(-0.5 * kbar2_int);
    for (auto& p : ctx.probes) p.f_accumulator = ctx.f_weight;
    out.records.push_back(assemble_record(s, sigma, ctx));
    out.kbar2_integral.push_back(kbar2_int);
    if (options.store_snapshots) out.snapshots.push_back(s);
  };

  for (;;) {
    const FlowEvaluation ev = evaluate(state, sigma, mode);
    const double kbar2 = ev.kappa_bar * ev.kappa_bar;
    if (state.step_index > 0) kbar2_int += 0.5 * prev_dt * (prev_kbar2 + kbar2);
    prev_kbar2 = kbar2;

    const double kmax = ev.kappa.max_abs();
    if (kmax0 < 0.0) kmax0 = kmax;
    if (!refined && kmax > 10.0 * kmax0) {
      cadence = std::max<std::size_t>(1, cadence / 2);
      refined = true;
    }
    const bool sample_now = state.step_index % cadence == 0;

    if (!std::isfinite(kmax) || !std::isfinite(ev.kappa_bar)) {
      out.termination = Termination::integration_failure;
      break;
    }
    if (kmax > config.max_kappa_abort) {
      out.termination = Termination::blowup_detected;
      record(state);
      break;
    }
    if (mode == FlowMode::area_preserving && ev.residual_l2 * ev.length < config.stop_tolerance) {
      out.termination = Termination::converged;
      record(state);
      break;
    }
    if (state.t >= config.t_end) {
      out.termination = Termination::t_end;
      record(state);
      break;
    }
    if (config.max_steps > 0 && state.step_index >= config.max_steps) {
      out.termination = Termination::step_limit;
      record(state);
      break;
    }
    if (sample_now) {
      if (state.attached && crosses_support(state, sigma)) {
        out.termination = Termination::support_crossing;
        record(state);
        break;
      }
      record(state);
    }

    StepResult r = step(state, sigma, config, ev);
    if (r.event != StepEvent::ok) {
      out.termination = from_event(r.event);
      record(state);
      break;
    }
    if (options.record_steps) {
      StepLogEntry e;
      e.t = state.t;
      e.dt = r.dt;
      e.length = ev.length;
      e.residual_l2 = ev.residual_l2;
      e.kappa_bar = ev.kappa_bar;
      e.kappa_a = ev.kappa.values.front();
      e.kappa_b = ev.kappa.values.back();
      e.a = state.lift.a;
      e.b = state.lift.b;
      e.resampled = config.resample_every > 0 && (state.step_index + 1) % config.resample_every == 0;
      out.steps.push_back(e);
    }
    prev_dt = r.dt;
    state = std::move(r.state);
  }
  out.final_state = state;
  return out;
}

AdmissibilityReport check_admissibility(const DiscreteCurve& curve, const SupportCurve& sigma) {
  return check_admissibility(curve, sigma, metrics(sigma));
}

AdmissibilityReport check_admissibility(const DiscreteCurve& curve, const SupportCurve& sigma,
                                        const SupportMetrics& m) {
  if (curve.closed()) throw InvalidInput("admissibility needs an open curve");
  const double tol = 1e-6 * m.diameter;
  if (distance_to_support(sigma, curve.front()) > tol || distance_to_support(sigma, curve.back()) > tol) {
    throw InvalidInput("curve endpoints are not on the support curve");
  }
  const FlowState st = attach(curve, sigma);

  AdmissibilityReport r;
  r.kappa_max = m.kappa_max;
  r.sigma_d = m.sigma_d;
  r.diameter = m.diameter;
  r.L0 = st.curve.length();
  r.A0 = enclosed_area(st.curve, sigma, st.lift);
  r.c_I = r.A0 / (r.L0 * r.L0);
  r.C = 4.0 / (5.0 * m.kappa_max) * std::asin(std::min(1.0, r.c_I));

  const auto kappa = flow_curvature(st, sigma);
  r.positive_curvature = kappa.min() > 0.0;
  r.embedded = !self_intersects(st.curve);
  r.outside_support = true;
  for (const auto& p : st.curve.nodes()) {
    if (sigma.contains(p) && distance_to_support(sigma, p) > 1e-9) {
      r.outside_support = false;
      break;
    }
  }
  r.below_sigma_d = r.L0 < m.sigma_d;
  r.below_half_inverse_kappa_max = r.L0 < 1.0 / (2.0 * m.kappa_max);
  r.below_arcsin_bound = r.c_I > 0.0 && r.L0 < r.C;
  r.isoperimetric_ok = r.c_I <= 1.0 / (2.0 * std::numbers::pi) + 1e-9;
  return r;
}

}  // namespace arcflow
