#pragma once

#include <cstddef>
#include <vector>

#include "arcflow/geometry.hpp"

namespace arcflow {

struct SupportPoint {
  Vec2 point;
  Vec2 tangent;
  Vec2 normal;  // J * tangent, points into the enclosed domain
  double curvature = 0.0;
};

struct SupportMetrics {
  double kappa_max = 0.0;
  double sigma_d = 0.0;
  double diameter = 0.0;
};

/// Arclength positions of the two endpoints on the periodic extension of the
/// support parametrization.
struct BoundaryLift {
  double a = 0.0;
  double b = 0.0;
};

struct LiftUpdate {
  BoundaryLift lift;
  bool collision = false;
};

/// Closed convex curve, positively oriented and parametrized by arclength.
class SupportCurve {
 public:
  enum class Kind { circle, ellipse, table };

  static constexpr std::size_t kDefaultResolution = 4096;

  /// Starts at center + (radius, 0).
  static SupportCurve circle(double radius, Vec2 center = {},
                             std::size_t resolution = kDefaultResolution);
  /// Axis-aligned ellipse; starts at center + (a, 0).
  static SupportCurve ellipse(double a, double b, Vec2 center = {},
                              std::size_t resolution = kDefaultResolution);
  /// Periodic cubic spline through `points`, resampled at equal arclength.
  /// Clockwise input is reversed. Starts at the first point.
  static SupportCurve table(std::vector<Vec2> points, std::size_t resolution = kDefaultResolution);

  Kind kind() const { return kind_; }
  double total_length() const { return length_; }
  /// Circle radius or ellipse semi-axes; zero for tables.
  double radius() const { return ra_; }
  double semi_a() const { return ra_; }
  double semi_b() const { return rb_; }
  Vec2 center() const { return center_; }

  SupportPoint eval(double s) const;
  Vec2 point(double s) const { return eval(s).point; }
  double wrap(double s) const;

  /// True if q lies strictly inside the bounded domain.
  bool contains(const Vec2& q) const;

  /// Dense equal-arclength sample (resolution nodes, spacing total_length/resolution).
  const std::vector<SupportPoint>& sample() const { return sample_; }
  double sample_spacing() const { return length_ / static_cast<double>(sample_.size()); }

  /// Polyline Σf(a), sample nodes strictly between, Σf(b); requires a < b.
  std::vector<Vec2> arc_polyline(double a, double b) const;

  /// Integral of the support curvature over [a, b].
  double turning(double a, double b) const;

 private:
  SupportCurve() = default;
  void build_sample(std::size_t resolution);
  double ellipse_arclength(double theta) const;
  double ellipse_theta(double s) const;

  Kind kind_ = Kind::circle;
  double length_ = 0.0;
  double ra_ = 0.0;
  double rb_ = 0.0;
  Vec2 center_;
  double ellipse_offset_ = 0.0;
  std::vector<SupportPoint> sample_;
};

SupportMetrics metrics(const SupportCurve& sigma);

/// Arclength parameter in [0, L) of the closest point of Σ to q.
/// Throws DomainError if q is strictly inside Σ.
double project(const SupportCurve& sigma, const Vec2& q);

/// One explicit step of the endpoint law da/dt = κ(a) − κ̄, db/dt = −(κ(b) − κ̄).
LiftUpdate advance_lift(const BoundaryLift& lift, double kappa_a, double kappa_b, double kappa_bar,
                        double dt);

}  // namespace arcflow
