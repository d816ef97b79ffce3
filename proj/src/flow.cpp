#include "arcflow/flow.hpp"

#include <cmath>
#include <exception>

#include "arcflow/errors.hpp"

namespace arcflow {

std::string to_string(FlowMode mode) {
  return mode == FlowMode::csf ? "csf" : "area_preserving";
}

FlowMode flow_mode_from_string(const std::string& name) {
  if (name == "area_preserving") return FlowMode::area_preserving;
  if (name == "csf") return FlowMode::csf;
  throw ConfigError("mode", "unknown mode '" + name + "'");
}

std::string to_string(StepEvent event) {
  switch (event) {
    case StepEvent::ok: return "ok";
    case StepEvent::blowup_detected: return "blowup_detected";
    case StepEvent::boundary_collision: return "boundary_collision";
    case StepEvent::integration_failure: return "integration_failure";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
  };
  positive("dt_safety", dt_safety);
  if (dt_safety > 1.0) throw ConfigError("dt_safety", "must lie in (0, 1]");
  if (n_nodes < 4) throw ConfigError("n_nodes", "must be at least 4");
  positive("t_end", t_end);
  positive("stop_tolerance", stop_tolerance);
  positive("max_kappa_abort", max_kappa_abort);
  if (sample_every == 0) throw ConfigError("sample_every", "must be positive");
}

FlowState attach(DiscreteCurve curve, const SupportCurve& sigma) {
  if (curve.closed()) throw InvalidInput("attached flow needs an open curve");
  if (curve.size() < 4) throw InvalidInput("attached flow needs at least 4 nodes");
  FlowState st;
  double a = project(sigma, curve.front());
  double b = project(sigma, curve.back());
  if (b <= a) b += sigma.total_length();
  st.lift = {a, b};
  auto nodes = curve.nodes();
  nodes.front() = sigma.point(a);
  nodes.back() = sigma.point(b);
  st.curve = DiscreteCurve(std::move(nodes), false);
  st.attached = true;
  return st;
}

double kappa_bar(const CurvatureSamples& kappa) { return kappa.integral() / kappa.total_weight(); }

double kappa_bar(const DiscreteCurve& curve) { return kappa_bar(curvature(curve)); }

CurvatureSamples flow_curvature(const FlowState& state, const SupportCurve& sigma) {
  if (!state.attached) return curvature(state.curve);
  const EndpointMirrors m{sigma.eval(state.lift.a).tangent, sigma.eval(state.lift.b).tangent};
  return curvature(state.curve, m);
}

FlowEvaluation evaluate(const FlowState& state, const SupportCurve& sigma, FlowMode mode) {
  FlowEvaluation ev;
  ev.kappa = flow_curvature(state, sigma);
  ev.length = ev.kappa.total_weight();
  ev.mean_curvature = ev.kappa.integral() / ev.length;
  ev.kappa_bar = mode == FlowMode::csf ? 0.0 : ev.mean_curvature;
  double r = 0.0;
  for (std::size_t i = 0; i < ev.kappa.values.size(); ++i) {
    const double d = ev.kappa.values[i] - ev.mean_curvature;
    r += d * d * ev.kappa.weights[i];
  }
  ev.residual_l2 = r;
  return ev;
}

std::vector<Vec2> velocity(const DiscreteCurve& curve, const CurvatureSamples& kappa, double kbar) {
  auto nu = node_normals(curve);
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] *= (kappa.values[i] - kbar);
  return nu;
}

std::vector<Vec2> velocity(const DiscreteCurve& curve, FlowMode mode) {
  const auto k = curvature(curve);
  return velocity(curve, k, mode == FlowMode::csf ? 0.0 : kappa_bar(k));
}

double stable_dt(const DiscreteCurve& curve, const FlowConfig& config) {
  const double h = curve.min_segment_length();
  return config.dt_safety * 0.5 * h * h;
}

namespace {

StepResult advance(const FlowState& state, const SupportCurve& sigma, const FlowConfig& config,
                   FlowEvaluation ev) {
  StepResult res;
  res.state = state;
  res.dt = stable_dt(state.curve, config);
  const double kbar = ev.kappa_bar;
  res.before = std::move(ev);
  const auto& kappa = res.before.kappa;

  if (kappa.max_abs() > config.max_kappa_abort) {
    res.event = StepEvent::blowup_detected;
    return res;
  }
  if (!std::isfinite(kbar) || !(res.dt > 0.0)) {
    res.event = StepEvent::integration_failure;
    return res;
  }

  const auto v = velocity(state.curve, kappa, kbar);
  std::vector<Vec2> nodes = state.curve.nodes();
  const std::size_t n = nodes.size();
  const std::size_t first = state.attached ? 1 : 0;
  const std::size_t last = state.attached ? n - 1 : n;
  for (std::size_t i = first; i < last; ++i) nodes[i] += res.dt * v[i];

  BoundaryLift lift = state.lift;
  if (state.attached) {
    const auto up = advance_lift(state.lift, kappa.values.front(), kappa.values.back(), kbar, res.dt);
    if (up.collision) {
      res.event = StepEvent::boundary_collision;
      return res;
    }
    lift = up.lift;
    nodes.front() = sigma.point(lift.a);
    nodes.back() = sigma.point(lift.b);
  }

  FlowState next;
  try {
    next.curve = DiscreteCurve(std::move(nodes), state.curve.closed());
    if (config.resample_every > 0 && (state.step_index + 1) % config.resample_every == 0) {
      next.curve = resample_uniform(next.curve, config.n_nodes);
    }
  } catch (const InvalidCurve&) {
    res.event = StepEvent::integration_failure;
    return res;
  }
  next.lift = lift;
  next.t = state.t + res.dt;
  next.step_index = state.step_index + 1;
  next.attached = state.attached;
  res.state = std::move(next);
  return res;
}

}  // namespace

StepResult step(const FlowState& state, const SupportCurve& sigma, const FlowConfig& config,
                FlowMode mode) {
  return advance(state, sigma, config, evaluate(state, sigma, mode));
}

StepResult step(const FlowState& state, const SupportCurve& sigma, const FlowConfig& config,
                const FlowEvaluation& ev) {
  return advance(state, sigma, config, ev);
}

}  // namespace arcflow
