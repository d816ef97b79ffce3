#include "arcflow/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "arcflow/errors.hpp"
#include "arcflow/numerics.hpp"

namespace arcflow {

namespace {

constexpr double kCollinearTol = 1e-12;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

Vec2 reflect_across(const Vec2& p, const Vec2& origin, const Vec2& line_dir) {
  const Vec2 d = normalized(line_dir);
  const Vec2 v = p - origin;
  return origin + 2.0 * dot(v, d) * d - v;
}

// Curvature at node 0 from a cubic through nodes 0..3 in chordal arclength.
double one_sided_curvature(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3) {
  const std::array<double, 4> s{0.0, distance(p0, p1), distance(p0, p1) + distance(p1, p2),
                                distance(p0, p1) + distance(p1, p2) + distance(p2, p3)};
  const auto w = numerics::fd_weights(s, 0.0, 2);
  const std::array<Vec2, 4> p{p0, p1, p2, p3};
  Vec2 d1, d2;
  for (std::size_t j = 0; j < 4; ++j) {
    d1 += w[1][j] * p[j];
    d2 += w[2][j] * p[j];
  }
  const double speed = norm(d1);
  return cross(d1, d2) / (speed * speed * speed);
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a;
  const Vec2 v = c - a;
  const double o = cross(u, v);
  if (std::abs(o) <= kCollinearTol * norm(u) * norm(v)) return 0;
  return o > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double ee = dot(e, e);
  const double t = ee > 0.0 ? std::clamp(dot(p - a, e) / ee, 0.0, 1.0) : 0.0;
  return distance(p, a + t * e);
}

}  // namespace

DiscreteCurve::DiscreteCurve(std::vector<Vec2> nodes, bool closed)
    : nodes_(std::move(nodes)), closed_(closed) {
  const std::size_t min_nodes = closed_ ? 3 : 2;
  if (nodes_.size() < min_nodes) {
    throw InvalidCurve("curve needs at least " + std::to_string(min_nodes) + " nodes, got " +
                       std::to_string(nodes_.size()));
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!is_finite(nodes_[i])) throw InvalidCurve("non-finite node " + std::to_string(i));
  }
  for (std::size_t i = 0; i < segment_count(); ++i) {
    if (!(norm(segment(i)) > 0.0)) {
      throw InvalidCurve("zero-length segment at node " + std::to_string(i));
    }
  }
}

Vec2 DiscreteCurve::segment(std::size_t i) const {
  const std::size_t j = (i + 1 == nodes_.size()) ? 0 : i + 1;
  return nodes_[j] - nodes_[i];
}

double DiscreteCurve::length() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) sum += norm(segment(i));
  return sum;
}

double DiscreteCurve::max_segment_length() const {
  double h = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) h = std::max(h, norm(segment(i)));
  return h;
}

double DiscreteCurve::min_segment_length() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segment_count(); ++i) h = std::min(h, norm(segment(i)));
  return h;
}

DiscreteCurve DiscreteCurve::reversed() const {
  std::vector<Vec2> r(nodes_.rbegin(), nodes_.rend());
  return DiscreteCurve(std::move(r), closed_);
}

DiscreteCurve DiscreteCurve::transformed(double angle, Vec2 shift) const {
  std::vector<Vec2> r;
  r.reserve(nodes_.size());
  for (const auto& p : nodes_) r.push_back(rotate(p, angle) + shift);
  return DiscreteCurve(std::move(r), closed_);
}

double CurvatureSamples::integral() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += values[i] * weights[i];
  return sum;
}

double CurvatureSamples::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

double CurvatureSamples::min() const { return *std::min_element(values.begin(), values.end()); }
double CurvatureSamples::max() const { return *std::max_element(values.begin(), values.end()); }

double CurvatureSamples::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> arclength_table(const DiscreteCurve& curve) {
  std::vector<double> s(curve.segment_count() + 1, 0.0);
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const double len = norm(curve.segment(i));
    if (!(len > 0.0)) throw InvalidCurve("zero-length segment at node " + std::to_string(i));
    s[i + 1] = s[i] + len;
  }
  return s;
}

std::vector<double> arclength_weights(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const std::size_t m = curve.segment_count();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double half = 0.5 * norm(curve.segment(i));
    w[i] += half;
    w[(i + 1) % n] += half;
  }
  return w;
}

double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a;
  const Vec2 v = c - b;
  const double cr = cross(u, v);
  if (cr == 0.0) return 0.0;
  return 2.0 * cr / (norm(u) * norm(v) * distance(a, c));
}

CurvatureSamples curvature(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  CurvatureSamples out;
  out.weights = arclength_weights(curve);
  out.values.assign(n, 0.0);
  if (curve.closed()) {
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] = menger_curvature(p[(i + n - 1) % n], p[i], p[(i + 1) % n]);
    }
    return out;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) out.values[i] = menger_curvature(p[i - 1], p[i], p[i + 1]);
  if (n == 3) {
    out.values[0] = out.values[2] = out.values[1];
  } else if (n >= 4) {
    out.values[0] = one_sided_curvature(p[0], p[1], p[2], p[3]);
    // Reversal flips the sign of the one-sided estimate.
    out.values[n - 1] = -one_sided_curvature(p[n - 1], p[n - 2], p[n - 3], p[n - 4]);
  }
  return out;
}

CurvatureSamples curvature(const DiscreteCurve& curve, const EndpointMirrors& mirrors) {
  if (curve.closed()) throw InvalidInput("endpoint mirrors need an open curve");
  CurvatureSamples out = curvature(curve);
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  const Vec2 g0 = reflect_across(p[1], p[0], mirrors.start_line);
  const Vec2 g1 = reflect_across(p[n - 2], p[n - 1], mirrors.end_line);
  out.values[0] = menger_curvature(g0, p[0], p[1]);
  out.values[n - 1] = menger_curvature(p[n - 2], p[n - 1], g1);
  return out;
}

std::vector<Vec2> node_tangents(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  const std::size_t m = curve.segment_count();
  std::vector<Vec2> unit(m), t(n);
  std::vector<double> len(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e = curve.segment(i);
    len[i] = norm(e);
    unit[i] = e / len[i];
  }
  auto circum = [&](std::size_t prev, std::size_t next) {
    return normalized(unit[prev] * len[next] + unit[next] * len[prev]);
  };
  if (curve.closed()) {
    for (std::size_t i = 0; i < n; ++i) t[i] = circum((i + m - 1) % m, i);
    return t;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) t[i] = circum(i - 1, i);
  if (n == 2) {
    t[0] = t[1] = unit[0];
    return t;
  }
  const double k1 = menger_curvature(p[0], p[1], p[2]);
  const double kn = menger_curvature(p[n - 3], p[n - 2], p[n - 1]);
  t[0] = rotate(unit[0], -std::asin(clamp_unit(0.5 * len[0] * k1)));
  t[n - 1] = rotate(unit[m - 1], std::asin(clamp_unit(0.5 * len[m - 1] * kn)));
  return t;
}

std::vector<Vec2> node_normals(const DiscreteCurve& curve) {
  auto t = node_tangents(curve);
  for (auto& v : t) v = rotate_ccw(v);
  return t;
}

double total_turning(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  const std::size_t m = curve.segment_count();
  double sum = 0.0;
  if (curve.closed()) {
    for (std::size_t i = 0; i < m; ++i) sum += oriented_angle(curve.segment(i), curve.segment((i + 1) % m));
    return sum;
  }
  if (n < 3) return 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) sum += oriented_angle(curve.segment(i), curve.segment(i + 1));
  const double k1 = menger_curvature(p[0], p[1], p[2]);
  const double kn = menger_curvature(p[n - 3], p[n - 2], p[n - 1]);
  sum += std::asin(clamp_unit(0.5 * norm(curve.segment(0)) * k1));
  sum += std::asin(clamp_unit(0.5 * norm(curve.segment(m - 1)) * kn));
  return sum;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool self_intersects(const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  const std::size_t m = curve.segment_count();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 2; j < m; ++j) {
      if (curve.closed() && i == 0 && j == m - 1) continue;
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return true;
    }
  }
  return false;
}

DiscreteCurve resample_uniform(const DiscreteCurve& curve, std::size_t n) {
  if (n < 4) throw DomainError("resample_uniform needs n >= 4");
  const auto& p = curve.nodes();
  const auto s = arclength_table(curve);
  const double total = s.back();
  const std::size_t intervals = curve.closed() ? n : n - 1;
  std::vector<Vec2> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(intervals);
    while (seg + 1 < curve.segment_count() && s[seg + 1] <= target) ++seg;
    const Vec2 a = p[seg];
    const double frac = (target - s[seg]) / (s[seg + 1] - s[seg]);
    out.push_back(frac == 0.0 ? a : a + frac * curve.segment(seg));
  }
  if (!curve.closed()) out.back() = p.back();
  return DiscreteCurve(std::move(out), curve.closed());
}

double distance_to_polyline(const Vec2& q, const DiscreteCurve& curve) {
  const auto& p = curve.nodes();
  const std::size_t n = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    best = std::min(best, point_segment_distance(q, p[i], p[(i + 1) % n]));
  }
  return best;
}

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  double d = 0.0;
  for (const auto& q : a.nodes()) d = std::max(d, distance_to_polyline(q, b));
  for (const auto& q : b.nodes()) d = std::max(d, distance_to_polyline(q, a));
  return d;
}

double shoelace_area(const std::vector<Vec2>& nodes) {
  const std::size_t n = nodes.size();
  if (n < 3) return 0.0;
  const Vec2 o = nodes[0];
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) sum += cross(nodes[i] - o, nodes[i + 1] - o);
  return 0.5 * sum;
}

}  // namespace arcflow
