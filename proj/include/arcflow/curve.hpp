#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "arcflow/geometry.hpp"

namespace arcflow {

/// Ordered polyline sample of a planar curve. Normal convention: nu = J tau.
class DiscreteCurve {
 public:
  DiscreteCurve() = default;
  /// Throws InvalidCurve on non-finite nodes, repeated consecutive nodes,
  /// or fewer than 2 (open) / 3 (closed) nodes.
  DiscreteCurve(std::vector<Vec2> nodes, bool closed);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t segment_count() const { return closed_ ? nodes_.size() : nodes_.size() - 1; }
  const Vec2& operator[](std::size_t i) const { return nodes_[i]; }
  const Vec2& front() const { return nodes_.front(); }
  const Vec2& back() const { return nodes_.back(); }

  /// Segment i runs from node i to node i+1 (wrapping for closed curves).
  Vec2 segment(std::size_t i) const;
  double length() const;
  double max_segment_length() const;
  double min_segment_length() const;

  DiscreteCurve reversed() const;
  /// Rotation by `angle` about the origin followed by translation.
  DiscreteCurve transformed(double angle, Vec2 shift) const;

 private:
  std::vector<Vec2> nodes_;
  bool closed_ = false;
};

struct CurvatureSamples {
  std::vector<double> values;
  std::vector<double> weights;

  double integral() const;
  double total_weight() const;
  double min() const;
  double max() const;
  double max_abs() const;
};

/// Lines through the endpoints of an open curve across which a ghost node is
/// mirrored. Each direction is the tangent of the boundary line.
struct EndpointMirrors {
  Vec2 start_line;
  Vec2 end_line;
};

std::vector<double> arclength_table(const DiscreteCurve& curve);

/// Per-node arclength quadrature weights (half of each adjacent segment).
std::vector<double> arclength_weights(const DiscreteCurve& curve);

/// Signed curvature of the circle through a, b, c; 0 for collinear points.
double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c);

CurvatureSamples curvature(const DiscreteCurve& curve);

/// Open-curve curvature where the endpoint values come from the Menger circle
/// through (ghost, endpoint, neighbour), the ghost being the neighbour
/// reflected across the given boundary line.
CurvatureSamples curvature(const DiscreteCurve& curve, const EndpointMirrors& mirrors);

/// Unit tangent per node: circumcircle tangent inside, circle-extrapolated at
/// open ends.
std::vector<Vec2> node_tangents(const DiscreteCurve& curve);
std::vector<Vec2> node_normals(const DiscreteCurve& curve);

double total_turning(const DiscreteCurve& curve);

bool self_intersects(const DiscreteCurve& curve);

DiscreteCurve resample_uniform(const DiscreteCurve& curve, std::size_t n);

/// Distance from p to the polyline.
double distance_to_polyline(const Vec2& p, const DiscreteCurve& curve);
/// Symmetric node-to-polyline Hausdorff distance.
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b);

/// Shoelace area of the closed polygon through the nodes.
double shoelace_area(const std::vector<Vec2>& nodes);

/// Intersection test for segments [p1,p2] and [q1,q2], touching counts.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2);

}  // namespace arcflow
