#include "arcflow/rescaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "arcflow/errors.hpp"
#include "arcflow/numerics.hpp"

namespace arcflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kTailFit = 20;
constexpr double kGrimMargin = 0.05;

}  // namespace

std::string to_string(SingularityType t) {
  switch (t) {
    case SingularityType::typeI: return "typeI";
    case SingularityType::typeII: return "typeII";
    case SingularityType::inconclusive: return "inconclusive";
    case SingularityType::no_singularity: return "no_singularity";
  }
  return "unknown";
}

SingularityReport classify_singularity(const std::vector<BlowupHistorySample>& history,
                                       std::optional<double> T_est) {
  if (history.empty()) throw InvalidInput("classify_singularity needs a non-empty history");
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (!(history[i].t > history[i - 1].t)) throw InvalidInput("history times must increase");
  }
  SingularityReport rep;
  const std::size_t n = history.size();

  // Tail fit of 1/κ² against t.
  const std::size_t m = std::min(kTailFit, n);
  std::vector<double> ts, ys;
  for (std::size_t i = n - m; i < n; ++i) {
    ts.push_back(history[i].t);
    ys.push_back(1.0 / (history[i].kappa_max * history[i].kappa_max));
  }
  if (m >= 2) {
    const auto fit = numerics::fit_line(ts, ys);
    rep.inverse_slope = fit.slope;
    if (!T_est) {
      if (fit.slope > -1.0) {
        rep.type = SingularityType::no_singularity;
        rep.T_est = std::numeric_limits<double>::infinity();
        return rep;
      }
      T_est = -fit.intercept / fit.slope;
    }
  } else if (!T_est) {
    rep.type = SingularityType::inconclusive;
    return rep;
  }
  rep.T_est = *T_est;
  if (!(history.back().t < rep.T_est)) {
    rep.type = SingularityType::inconclusive;
    return rep;
  }

  std::vector<double> gap(n), prod(n);
  for (std::size_t i = 0; i < n; ++i) {
    gap[i] = rep.T_est - history[i].t;
    prod[i] = history[i].kappa_max * history[i].kappa_max * gap[i];
    rep.sup_product = std::max(rep.sup_product, prod[i]);
  }
  const double last_gap = gap[n - 1];
  std::size_t first = n - 1;
  while (first > 0 && gap[first - 1] <= 10.0 * last_gap) --first;
  rep.decade_samples = n - first;
  if (rep.decade_samples < 10) {
    rep.type = SingularityType::inconclusive;
    return rep;
  }
  rep.decade_growth = prod[n - 1] / prod[first] - 1.0;
  // Below the lower blowup rate max κ² ≥ 1/(2(T − t)), or decaying like T − t: no blowup at T_est.
  if (prod[n - 1] < 0.45 || rep.decade_growth < -0.5) {
    rep.type = SingularityType::no_singularity;
    return rep;
  }
  rep.type = rep.decade_growth < 0.1 ? SingularityType::typeI : SingularityType::typeII;
  return rep;
}

RescaledFrame parabolic_rescale(const FlowState& state, const Vec2& x0, double T_est, double Q) {
  if (!(Q > 0.0)) throw DomainError("rescaling factor must be positive");
  std::vector<Vec2> p;
  p.reserve(state.curve.size());
  for (const auto& v : state.curve.nodes()) p.push_back(Q * (v - x0));
  return {DiscreteCurve(std::move(p), state.curve.closed()), Q * Q * (state.t - T_est), Q, x0};
}

std::vector<HamiltonSequence> hamilton_rescale(const std::vector<FlowState>& snapshots, double T,
                                               const std::vector<int>& ladder) {
  if (snapshots.empty()) throw InvalidInput("hamilton_rescale needs stored snapshots");
  std::vector<CurvatureSamples> kappa;
  kappa.reserve(snapshots.size());
  for (const auto& s : snapshots) kappa.push_back(curvature(s.curve));

  std::vector<HamiltonSequence> out;
  for (int j : ladder) {
    if (j <= 0) throw InvalidInput("ladder entries must be positive");
    const double horizon = T - 1.0 / static_cast<double>(j);
    HamiltonSequence seq;
    seq.j = j;
    // A single snapshot is its own maximizer.
    const bool single = snapshots.size() == 1;
    double best = -1.0;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      if (!single && !(snapshots[k].t < horizon)) continue;
      for (std::size_t p = 0; p < kappa[k].values.size(); ++p) {
        const double q = kappa[k].values[p];
        const double obj = single ? std::abs(q) : q * q * (horizon - snapshots[k].t);
        if (obj > best) {
          best = obj;
          seq.sample = {p, snapshots[k].t, std::abs(q), k};
        }
      }
    }
    if (best < 0.0 || !(seq.sample.Q > 0.0)) continue;
    const Vec2 origin = snapshots[seq.sample.snapshot].curve[seq.sample.p];
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      if (!single && !(snapshots[k].t < horizon)) continue;
      if (k == seq.sample.snapshot) seq.center_frame = seq.frames.size();
      seq.frames.push_back(parabolic_rescale(snapshots[k], origin, seq.sample.t, seq.sample.Q));
    }
    out.push_back(std::move(seq));
  }
  if (out.empty()) throw InvalidInput("no snapshot precedes T - 1/j for any ladder entry");
  return out;
}

ShrinkerResidual self_shrinker_residual(const RescaledFrame& frame) {
  if (!(frame.tau < 0.0)) throw DomainError("self-shrinker residual needs tau < 0");
  const auto k = curvature(frame.curve);
  const auto nu = node_normals(frame.curve);
  ShrinkerResidual r;
  r.values.resize(frame.curve.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < frame.curve.size(); ++i) {
    r.values[i] = k.values[i] - dot(frame.curve[i], nu[i]) / (2.0 * frame.tau);
    sum += r.values[i] * r.values[i] * k.weights[i];
  }
  r.l2 = std::sqrt(sum);
  return r;
}

DiscreteCurve grim_reaper(double tau, double y_min, double y_max, std::size_t n) {
  const double lim = 0.5 * kPi - kGrimMargin;
  if (!(y_min >= -lim && y_max <= lim && y_min < y_max)) {
    throw DomainError("grim reaper window must lie inside (-pi/2 + 0.05, pi/2 - 0.05)");
  }
  if (n < 4) throw DomainError("grim reaper needs at least 4 nodes");
  // Arclength from the tip is asinh(tan y).
  const double s_hi = std::asinh(std::tan(y_max));
  const double s_lo = std::asinh(std::tan(y_min));
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = s_hi + (s_lo - s_hi) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = std::atan(std::sinh(s));
    p[i] = {-std::log(std::cos(y)) + tau, y};
  }
  return DiscreteCurve(std::move(p), false);
}

std::optional<double> tip_position(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i].y == 0.0) return p[i].x;
    if ((p[i].y > 0.0) != (p[i + 1].y > 0.0)) {
      const double u = p[i].y / (p[i].y - p[i + 1].y);
      return p[i].x + u * (p[i + 1].x - p[i].x);
    }
  }
  if (p.back().y == 0.0) return p.back().x;
  return std::nullopt;
}

ArcFit fit_circular_arc(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  Vec2 mean;
  for (const auto& v : p) mean += v;
  mean = mean / static_cast<double>(n);
  double scale = 0.0;
  for (const auto& v : p) scale = std::max(scale, distance(v, mean));

  ArcFit fit;
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 q = (p[i] - mean) / scale;
    A(i, 0) = q.x;
    A(i, 1) = q.y;
    A(i, 2) = 1.0;
    rhs(i) = -(q.x * q.x + q.y * q.y);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  const Eigen::Vector3d sol = qr.solve(rhs);
  const double cx = -0.5 * sol(0), cy = -0.5 * sol(1);
  const double r2 = cx * cx + cy * cy - sol(2);
  if (qr.rank() < 3 || !(r2 > 0.0) || std::sqrt(r2) > 1e6) {
    fit.line = true;
    fit.radius = std::numeric_limits<double>::infinity();
    return fit;
  }
  Vec2 c = mean + scale * Vec2{cx, cy};
  double r = scale * std::sqrt(r2);

  // One Gauss-Newton step on the geometric distances.
  Eigen::MatrixXd J(n, 3);
  Eigen::VectorXd res(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = p[i] - c;
    const double len = norm(d);
    res(i) = len - r;
    J(i, 0) = -d.x / len;
    J(i, 1) = -d.y / len;
    J(i, 2) = -1.0;
  }
  const Eigen::Vector3d delta = J.colPivHouseholderQr().solve(-res);
  if (delta.allFinite()) {
    c += Vec2{delta(0), delta(1)};
    r += delta(2);
  }
  double ss = 0.0;
  for (const auto& v : p) {
    const double e = distance(v, c) - r;
    ss += e * e;
  }
  fit.center = c;
  fit.radius = r;
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  const auto t = node_tangents(curve);
  fit.start_contact = std::abs(oriented_angle(p.front() - c, t.front()));
  fit.end_contact = std::abs(oriented_angle(p.back() - c, t.back()));
  return fit;
}

}  // namespace arcflow
