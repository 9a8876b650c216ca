#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vemrcp {

using Point2 = Eigen::Vector2d;

/// Raised when a polygon cannot be processed (self-intersection, zero-length
/// edge, degenerate triangulation).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Free-standing polygon helpers. Polygons are vertex cycles; the closing edge
// (last -> first) is implicit.

double signed_area(std::span<const Point2> polygon);
Point2 area_centroid(std::span<const Point2> polygon);

/// Unit normal of the edge a -> b pointing to its right, i.e. outward for a
/// counterclockwise cycle.
Point2 outward_normal(const Point2& a, const Point2& b);

/// 2D cross product of (b - a) and (c - a); positive for a left turn.
inline double orient2d(const Point2& a, const Point2& b, const Point2& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2);

/// True when no two non-adjacent edges touch and no edge has zero length.
bool is_simple_polygon(std::span<const Point2> polygon);

/// Ear-clipping triangulation of a counterclockwise simple polygon. Returns
/// local vertex indices. `start` rotates the vertex where the ear search
/// begins, which yields a different (equally valid) triangulation.
/// Zero-area ears produced by collinear vertices are dropped.
std::vector<std::array<int, 3>> ear_clip(std::span<const Point2> polygon, int start = 0);

/// Sutherland-Hodgman clip of a polygon against the half plane
/// {x : (x - origin) . normal <= 0}.
std::vector<Point2> clip_half_plane(std::span<const Point2> polygon, const Point2& origin, const Point2& normal);

}  // namespace vemrcp
