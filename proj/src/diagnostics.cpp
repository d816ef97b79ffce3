#include "arcflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "arcflow/errors.hpp"

namespace arcflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_lift(const DiscreteCurve& curve, const SupportCurve& sigma, const BoundaryLift& lift) {
  const double tol = 1e-6 * sigma.total_length() / kPi;
  if (distance(curve.front(), sigma.point(lift.a)) > tol ||
      distance(curve.back(), sigma.point(lift.b)) > tol) {
    throw InvalidInput("curve endpoints do not match the boundary lift");
  }
}

}  // namespace

double density_weight(const std::vector<double>& times, const std::vector<double>& kappa_bar) {
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    integral += 0.5 * (times[i] - times[i - 1]) *
                (kappa_bar[i] * kappa_bar[i] + kappa_bar[i - 1] * kappa_bar[i - 1]);
  }
  return std::exp(-0.5 * integral);
}

double enclosed_area(const DiscreteCurve& curve, const SupportCurve& sigma, const BoundaryLift& lift) {
  if (curve.closed()) throw InvalidInput("enclosed_area needs an open curve");
  if (!(lift.b > lift.a)) throw InvalidInput("enclosed_area needs lift.b > lift.a");
  check_lift(curve, sigma, lift);
  const auto arc = sigma.arc_polyline(lift.a, lift.b);
  std::vector<Vec2> loop = curve.nodes();
  for (std::size_t i = arc.size() - 2; i >= 1; --i) loop.push_back(arc[i]);
  return shoelace_area(loop);
}

IndexResult index(const DiscreteCurve& curve, const SupportCurve& sigma, const BoundaryLift& lift) {
  if (!(lift.b > lift.a)) throw InvalidInput("index needs lift.b > lift.a");
  IndexResult r;
  r.raw = (total_turning(curve) - sigma.turning(lift.a, lift.b)) / (2.0 * kPi) + 0.5;
  r.index = static_cast<int>(std::lround(r.raw));
  r.warning = std::abs(r.raw - r.index) > 0.2;
  return r;
}

double heat_kernel(const Vec2& x, const Vec2& x0, double T_minus_t) {
  const Vec2 d = x - x0;
  return std::exp(-dot(d, d) / (4.0 * T_minus_t)) / std::sqrt(4.0 * kPi * T_minus_t);
}

double gaussian_density(const DiscreteCurve& curve, const DensityProbe& probe, double t) {
  const double tau = probe.T_probe - t;
  if (!(tau > 0.0)) throw DomainError("gaussian_density needs t < T_probe");
  const auto w = arclength_weights(curve);
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) sum += heat_kernel(curve[i], probe.x0, tau) * w[i];
  return probe.f_accumulator * sum;
}

bool chord_region_convex(const DiscreteCurve& curve) {
  if (curve.closed()) throw InvalidInput("chord_region_convex needs an open curve");
  constexpr double tol = 1e-9;
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  std::vector<Vec2> edges;
  edges.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back(normalized(p[i + 1] - p[i]));
  edges.push_back(normalized(p[0] - p[n - 1]));
  const std::size_t m = edges.size();
  bool pos = true, neg = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = cross(edges[i], edges[(i + 1) % m]);
    if (c < -tol) pos = false;
    if (c > tol) neg = false;
  }
  if (!pos && !neg) return false;
  // Junction turning at the two chord ends, measured in the region's own orientation.
  const double sgn = pos ? 1.0 : -1.0;
  const double end_angle = sgn * oriented_angle(edges[m - 2], edges[m - 1]);
  const double start_angle = sgn * oriented_angle(edges[m - 1], edges[0]);
  const double limit = 0.5 * kPi + 0.05;
  return end_angle >= -tol && end_angle <= limit && start_angle >= -tol && start_angle <= limit;
}

double distance_to_support(const SupportCurve& sigma, const Vec2& q) {
  if (sigma.kind() == SupportCurve::Kind::circle) {
    return std::abs(distance(q, sigma.center()) - sigma.radius());
  }
  const auto& smp = sigma.sample();
  const std::size_t n = smp.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = smp[i].point;
    const Vec2 e = smp[(i + 1) % n].point - a;
    const double t = std::clamp(dot(q - a, e) / dot(e, e), 0.0, 1.0);
    best = std::min(best, distance(q, a + t * e));
  }
  return best;
}

KappaBarWindow kappa_bar_window(const ReferenceValues& ref) {
  return {kPi / ref.L0, (ref.L0 + 2.0 * ref.diameter) * kPi / (2.0 * ref.A0)};
}

double length_lower_bound(const ReferenceValues& ref) {
  return 4.0 * ref.A0 / (ref.L0 + 2.0 * ref.diameter);
}

DiagnosticsRecord assemble_record(const FlowState& state, const SupportCurve& sigma,
                                  const RecordContext& context) {
  DiagnosticsRecord rec;
  const auto& curve = state.curve;
  const auto kappa = flow_curvature(state, sigma);
  rec.t = state.t;
  rec.step = state.step_index;
  rec.length = kappa.total_weight();
  rec.kappa_bar = kappa.integral() / rec.length;
  rec.min_kappa = kappa.min();
  rec.max_kappa = kappa.max();
  double r = 0.0;
  for (std::size_t i = 0; i < kappa.values.size(); ++i) {
    const double d = kappa.values[i] - rec.kappa_bar;
    r += d * d * kappa.weights[i];
  }
  rec.residual_l2 = r;
  rec.turning = total_turning(curve);
  rec.lift_a = state.lift.a;
  rec.lift_b = state.lift.b;
  rec.f_weight = context.f_weight;

  if (state.attached) {
    rec.area = enclosed_area(curve, sigma, state.lift);
    const auto ix = index(curve, sigma, state.lift);
    rec.index = ix.index;
    rec.index_raw = ix.raw;
  } else {
    rec.area = shoelace_area(curve.nodes());
    rec.index_raw = rec.turning / (2.0 * kPi) + (curve.closed() ? 0.0 : 0.5);
    rec.index = static_cast<int>(std::lround(rec.index_raw));
  }

  rec.density = std::numeric_limits<double>::quiet_NaN();
  for (const auto& probe : context.probes) {
    const double d = state.t < probe.T_probe ? gaussian_density(curve, probe, state.t)
                                             : std::numeric_limits<double>::quiet_NaN();
    rec.densities.push_back(d);
  }
  if (!rec.densities.empty()) rec.density = rec.densities.front();

  rec.flags.embedded = !self_intersects(curve);
  if (context.mode == FlowMode::area_preserving && state.attached && context.reference) {
    const auto& ref = *context.reference;
    const auto win = kappa_bar_window(ref);
    rec.flags.kappa_bar_in_window =
        rec.kappa_bar >= 0.95 * win.lower && rec.kappa_bar <= 1.05 * win.upper;
    rec.flags.turning_in_window = rec.turning >= kPi - 0.05 && rec.turning < 2.0 * kPi;
    rec.flags.chord_region_convex = chord_region_convex(curve);
    const double bound = 0.5 * ref.L0 + curve.max_segment_length();
    bool inside = true;
    for (const auto& p : curve.nodes()) {
      if (distance_to_support(sigma, p) > bound) {
        inside = false;
        break;
      }
    }
    rec.flags.contained_in_D = inside;
  }
  return rec;
}

}  // namespace arcflow
