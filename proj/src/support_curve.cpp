#include "arcflow/support_curve.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "arcflow/curve.hpp"
#include "arcflow/errors.hpp"
#include "arcflow/numerics.hpp"

namespace arcflow {

namespace {

constexpr double kPi = std::numbers::pi;

double positive_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

// Periodic cubic spline in one coordinate: second derivatives at the knots.
std::vector<double> periodic_spline_moments(const std::vector<double>& h,
                                            const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  Eigen::SparseMatrix<double> A(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n;
    const int ip = (i + 1) % n;
    trip.emplace_back(i, im, h[im]);
    trip.emplace_back(i, i, 2.0 * (h[im] + h[i]));
    trip.emplace_back(i, ip, h[i]);
    rhs[i] = 6.0 * ((y[ip] - y[i]) / h[i] - (y[i] - y[im]) / h[im]);
  }
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw InvalidSupport("spline system is singular");
  Eigen::VectorXd m = lu.solve(rhs);
  return {m.data(), m.data() + n};
}

struct Spline {
  std::vector<double> h;
  std::vector<Vec2> y;
  std::vector<double> mx, my;

  // Value, first and second derivative on piece i at local offset u in [0, h_i].
  void eval(std::size_t i, double u, Vec2& p, Vec2& d1, Vec2& d2) const {
    const std::size_t j = (i + 1) % y.size();
    const double hi = h[i];
    const double A = (hi - u) / hi;
    const double B = u / hi;
    auto comp = [&](double yi, double yj, double mi, double mj, double& v, double& dv, double& ddv) {
      v = A * yi + B * yj + ((A * A * A - A) * mi + (B * B * B - B) * mj) * hi * hi / 6.0;
      dv = (yj - yi) / hi - (3.0 * A * A - 1.0) * hi / 6.0 * mi + (3.0 * B * B - 1.0) * hi / 6.0 * mj;
      ddv = A * mi + B * mj;
    };
    comp(y[i].x, y[j].x, mx[i], mx[j], p.x, d1.x, d2.x);
    comp(y[i].y, y[j].y, my[i], my[j], p.y, d1.y, d2.y);
  }

  double speed(std::size_t i, double u) const {
    Vec2 p, d1, d2;
    eval(i, u, p, d1, d2);
    return norm(d1);
  }

  double piece_length(std::size_t i, double u0, double u1) const {
    return numerics::integrate([&](double u) { return speed(i, u); }, u0, u1, 4);
  }
};

}  // namespace

SupportCurve SupportCurve::circle(double radius, Vec2 center, std::size_t resolution) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidSupport("circle radius must be positive");
  SupportCurve s;
  s.kind_ = Kind::circle;
  s.ra_ = s.rb_ = radius;
  s.center_ = center;
  s.length_ = 2.0 * kPi * radius;
  s.build_sample(resolution);
  return s;
}

SupportCurve SupportCurve::ellipse(double a, double b, Vec2 center, std::size_t resolution) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidSupport("ellipse semi-axes must be positive");
  }
  SupportCurve s;
  s.kind_ = Kind::ellipse;
  s.ra_ = a;
  s.rb_ = b;
  s.center_ = center;
  s.ellipse_offset_ = 0.0;
  s.ellipse_offset_ = -s.ellipse_arclength(0.0);
  s.length_ = s.ellipse_arclength(2.0 * kPi);
  s.build_sample(resolution);
  return s;
}

double SupportCurve::ellipse_arclength(double theta) const {
  if (ra_ >= rb_) {
    const double e = std::sqrt(1.0 - (rb_ * rb_) / (ra_ * ra_));
    return ra_ * (std::ellint_2(e, theta - 0.5 * kPi) + std::comp_ellint_2(e)) + ellipse_offset_;
  }
  const double e = std::sqrt(1.0 - (ra_ * ra_) / (rb_ * rb_));
  return rb_ * std::ellint_2(e, theta) + ellipse_offset_;
}

double SupportCurve::ellipse_theta(double s) const {
  double theta = 2.0 * kPi * s / length_;
  for (int it = 0; it < 50; ++it) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double speed = std::sqrt(ra_ * ra_ * st * st + rb_ * rb_ * ct * ct);
    const double step = (ellipse_arclength(theta) - s) / speed;
    theta -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

SupportCurve SupportCurve::table(std::vector<Vec2> points, std::size_t resolution) {
  // Drop a duplicated closing point.
  if (points.size() >= 2 && points.front() == points.back()) points.pop_back();
  if (points.size() < 4) throw InvalidSupport("table support needs at least 4 points");
  for (const auto& p : points) {
    if (!is_finite(p)) throw InvalidSupport("table support has non-finite point");
  }
  const double signed_area = shoelace_area(points);
  if (signed_area == 0.0) throw InvalidSupport("table support encloses no area");
  if (signed_area < 0.0) std::reverse(points.begin() + 1, points.end());

  Spline sp;
  const std::size_t n = points.size();
  sp.y = points;
  sp.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sp.h[i] = distance(points[i], points[(i + 1) % n]);
    if (!(sp.h[i] > 0.0)) throw InvalidSupport("table support has repeated points");
  }
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  sp.mx = periodic_spline_moments(sp.h, xs);
  sp.my = periodic_spline_moments(sp.h, ys);

  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + sp.piece_length(i, 0.0, sp.h[i]);

  SupportCurve s;
  s.kind_ = Kind::table;
  s.length_ = cum[n];
  s.sample_.resize(resolution);
  const double ds = s.length_ / static_cast<double>(resolution);
  std::size_t piece = 0;
  for (std::size_t k = 0; k < resolution; ++k) {
    const double target = ds * static_cast<double>(k);
    while (piece + 1 < n && cum[piece + 1] <= target) ++piece;
    // Invert arclength on this piece: Newton with bisection fallback.
    double lo = 0.0, hi = sp.h[piece];
    double u = sp.h[piece] * (target - cum[piece]) / (cum[piece + 1] - cum[piece]);
    for (int it = 0; it < 60; ++it) {
      const double f = cum[piece] + sp.piece_length(piece, 0.0, u) - target;
      if (f > 0.0) hi = u; else lo = u;
      double next = u - f / sp.speed(piece, u);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) < 1e-15 * sp.h[piece]) {
        u = next;
        break;
      }
      u = next;
    }
    Vec2 p, d1, d2;
    sp.eval(piece, u, p, d1, d2);
    const double v = norm(d1);
    SupportPoint& sp_out = s.sample_[k];
    sp_out.point = p;
    sp_out.tangent = d1 / v;
    sp_out.normal = rotate_ccw(sp_out.tangent);
    sp_out.curvature = cross(d1, d2) / (v * v * v);
  }
  return s;
}

void SupportCurve::build_sample(std::size_t resolution) {
  if (resolution < 16) throw InvalidSupport("support resolution too small");
  sample_.resize(resolution);
  const double ds = length_ / static_cast<double>(resolution);
  for (std::size_t k = 0; k < resolution; ++k) sample_[k] = eval(ds * static_cast<double>(k));
}

double SupportCurve::wrap(double s) const { return positive_mod(s, length_); }

SupportPoint SupportCurve::eval(double s) const {
  SupportPoint out;
  switch (kind_) {
    case Kind::circle: {
      const double phi = s / ra_;
      const Vec2 u{std::cos(phi), std::sin(phi)};
      out.point = center_ + ra_ * u;
      out.tangent = rotate_ccw(u);
      out.normal = -u;
      out.curvature = 1.0 / ra_;
      return out;
    }
    case Kind::ellipse: {
      const double theta = ellipse_theta(wrap(s));
      const double st = std::sin(theta), ct = std::cos(theta);
      const Vec2 d{-ra_ * st, rb_ * ct};
      const double v = norm(d);
      out.point = center_ + Vec2{ra_ * ct, rb_ * st};
      out.tangent = d / v;
      out.normal = rotate_ccw(out.tangent);
      out.curvature = ra_ * rb_ / (v * v * v);
      return out;
    }
    case Kind::table: {
      const std::size_t n = sample_.size();
      const double ds = sample_spacing();
      const double x = wrap(s) / ds;
      std::size_t k = static_cast<std::size_t>(std::floor(x));
      if (k >= n) k = n - 1;
      const double u = x - static_cast<double>(k);
      const SupportPoint& p0 = sample_[k];
      const SupportPoint& p1 = sample_[(k + 1) % n];
      const double u2 = u * u, u3 = u2 * u;
      const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
      const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
      const double g00 = 6 * u2 - 6 * u, g10 = 3 * u2 - 4 * u + 1;
      const double g01 = -6 * u2 + 6 * u, g11 = 3 * u2 - 2 * u;
      out.point = h00 * p0.point + (h10 * ds) * p0.tangent + h01 * p1.point + (h11 * ds) * p1.tangent;
      const Vec2 d = (g00 / ds) * p0.point + g10 * p0.tangent + (g01 / ds) * p1.point + g11 * p1.tangent;
      out.tangent = normalized(d);
      out.normal = rotate_ccw(out.tangent);
      out.curvature = (1.0 - u) * p0.curvature + u * p1.curvature;
      return out;
    }
  }
  return out;
}

bool SupportCurve::contains(const Vec2& q) const {
  switch (kind_) {
    case Kind::circle:
      return distance(q, center_) < ra_;
    case Kind::ellipse: {
      const Vec2 d = q - center_;
      return (d.x * d.x) / (ra_ * ra_) + (d.y * d.y) / (rb_ * rb_) < 1.0;
    }
    case Kind::table: {
      bool inside = false;
      const std::size_t n = sample_.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& pi = sample_[i].point;
        const Vec2& pj = sample_[j].point;
        if ((pi.y > q.y) != (pj.y > q.y) &&
            q.x < (pj.x - pi.x) * (q.y - pi.y) / (pj.y - pi.y) + pi.x) {
          inside = !inside;
        }
      }
      return inside;
    }
  }
  return false;
}

std::vector<Vec2> SupportCurve::arc_polyline(double a, double b) const {
  if (!(b > a)) throw DomainError("arc_polyline needs a < b");
  const double ds = sample_spacing();
  const std::size_t n = sample_.size();
  const double guard = 1e-9 * ds;
  std::vector<Vec2> out;
  out.push_back(eval(a).point);
  const double first = std::floor(a / ds) + 1.0;
  for (double k = first; k * ds < b - guard; k += 1.0) {
    if (k * ds <= a + guard) continue;
    const auto idx = static_cast<long long>(k);
    const auto wrapped = static_cast<std::size_t>(((idx % static_cast<long long>(n)) + n) % n);
    out.push_back(sample_[wrapped].point);
  }
  out.push_back(eval(b).point);
  return out;
}

double SupportCurve::turning(double a, double b) const {
  if (kind_ == Kind::circle) return (b - a) / ra_;
  const double span = b - a;
  const auto panels = static_cast<std::size_t>(std::ceil(std::abs(span) / (16.0 * sample_spacing()))) + 1;
  return numerics::integrate([&](double s) { return eval(s).curvature; }, a, b, panels);
}

SupportMetrics metrics(const SupportCurve& sigma) {
  const auto& smp = sigma.sample();
  const std::size_t n = smp.size();
  const double L = sigma.total_length();
  const double ds = sigma.sample_spacing();
  SupportMetrics m;
  for (const auto& p : smp) {
    if (p.curvature < -1e-8) throw InvalidSupport("support curve is not convex");
    m.kappa_max = std::max(m.kappa_max, p.curvature);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m.diameter = std::max(m.diameter, distance(smp[i].point, smp[j].point));
    }
  }

  // Unwrapped tangent angle over two periods.
  std::vector<double> phi(2 * n + 1);
  phi[0] = std::atan2(smp[0].tangent.y, smp[0].tangent.x);
  for (std::size_t k = 1; k <= 2 * n; ++k) {
    phi[k] = phi[k - 1] + oriented_angle(smp[(k - 1) % n].tangent, smp[k % n].tangent);
  }
  auto angle_at = [&](double s) {
    // s in [0, 2L)
    auto k = static_cast<std::size_t>(std::floor(s / ds));
    k = std::min(k, 2 * n - 1);
    return phi[k] + oriented_angle(smp[k % n].tangent, sigma.eval(s).tangent);
  };
  // Parameter in (s, s + L) whose tangent is anti-parallel to the tangent at s.
  auto partner = [&](double s) {
    const double target = angle_at(s) + kPi;
    double lo = s, hi = s + L;
    const auto it = std::lower_bound(phi.begin(), phi.end(), target);
    const auto k = static_cast<std::size_t>(it - phi.begin());
    if (k > 0 && k <= 2 * n) {
      lo = std::max(lo, ds * static_cast<double>(k - 1));
      hi = std::min(hi, ds * static_cast<double>(k));
    }
    for (int it2 = 0; it2 < 60 && hi - lo > 1e-13 * L; ++it2) {
      const double mid = 0.5 * (lo + hi);
      if (angle_at(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto width = [&](double s) { return distance(sigma.eval(s).point, sigma.eval(partner(s)).point); };

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  // Coarse pass: partner interpolated between sample nodes.
  auto coarse_width = [&](std::size_t i) {
    const double target = phi[i] + kPi;
    const auto it = std::lower_bound(phi.begin() + static_cast<long>(i), phi.end(), target);
    const auto k = static_cast<std::size_t>(std::max<long>(1, it - phi.begin()));
    const double span = phi[k] - phi[k - 1];
    const double frac = span > 0.0 ? std::clamp((target - phi[k - 1]) / span, 0.0, 1.0) : 0.0;
    const Vec2 q = smp[(k - 1) % n].point + frac * (smp[k % n].point - smp[(k - 1) % n].point);
    return distance(smp[i].point, q);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double w = coarse_width(i);
    if (w < best) {
      best = w;
      best_i = i;
    }
  }
  // Golden-section refinement around the best sample; shifted by L to keep s >= 0.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = L + ds * (static_cast<double>(best_i) - 1.0);
  double hi = L + ds * (static_cast<double>(best_i) + 1.0);
  auto width_mod = [&](double s) { return width(sigma.wrap(s)); };
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = width_mod(x1), f2 = width_mod(x2);
  while (hi - lo > 1e-8 * ds) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = width_mod(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = width_mod(x2);
    }
  }
  m.sigma_d = std::min(best, std::min(f1, f2));
  return m;
}

double project(const SupportCurve& sigma, const Vec2& q) {
  const auto& smp = sigma.sample();
  const std::size_t n = smp.size();
  const double ds = sigma.sample_spacing();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double d = distance(q, smp[k].point);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  // Safeguarded Newton on g(s) = <Σf(s) − q, Στ(s)>, increasing near the minimizer.
  double lo = ds * (static_cast<double>(best) - 1.0);
  double hi = ds * (static_cast<double>(best) + 1.0);
  double s = ds * static_cast<double>(best);
  auto g = [&](const SupportPoint& p) { return dot(p.point - q, p.tangent); };
  for (int it = 0; it < 100; ++it) {
    const SupportPoint p = sigma.eval(s);
    const double gv = g(p);
    if (gv > 0.0) hi = s; else lo = s;
    const double dg = 1.0 + p.curvature * dot(p.point - q, p.normal);
    double next = dg > 0.0 ? s - gv / dg : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step <= 1e-15 * sigma.total_length()) break;
  }
  const SupportPoint p = sigma.eval(s);
  const double depth = dot(q - p.point, p.normal);
  if (depth > 1e-12 * sigma.total_length() && sigma.contains(q)) {
    throw DomainError("project: point lies inside the support curve");
  }
  return sigma.wrap(s);
}

LiftUpdate advance_lift(const BoundaryLift& lift, double kappa_a, double kappa_b, double kappa_bar,
                        double dt) {
  if (!(dt > 0.0)) throw DomainError("advance_lift needs dt > 0");
  LiftUpdate out;
  out.lift.a = lift.a + dt * (kappa_a - kappa_bar);
  out.lift.b = lift.b - dt * (kappa_b - kappa_bar);
  out.collision = out.lift.b - out.lift.a <= 0.0;
  return out;
}

}  // namespace arcflow
