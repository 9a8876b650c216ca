#include "vemrcp/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vemrcp {

double signed_area(std::span<const Point2> polygon)
{
    const std::size_t n = polygon.size();
    if (n < 3)
        return 0.0;
    const Point2 origin = polygon[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point2 a = polygon[i] - origin;
        const Point2 b = polygon[i + 1] - origin;
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

Point2 area_centroid(std::span<const Point2> polygon)
{
    // Shift to the first vertex so that far-from-origin cells keep precision.
    const std::size_t n = polygon.size();
    const Point2 origin = polygon[0];
    double twice_area = 0.0;
    Point2 acc = Point2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = polygon[i] - origin;
        const Point2 b = polygon[(i + 1) % n] - origin;
        const double cross = a.x() * b.y() - b.x() * a.y();
        twice_area += cross;
        acc += cross * (a + b);
    }
    if (twice_area == 0.0)
        throw GeometryError("centroid of a zero-area polygon");
    return origin + acc / (3.0 * twice_area);
}

Point2 outward_normal(const Point2& a, const Point2& b)
{
    const Point2 t = b - a;
    const double length = t.norm();
    if (length == 0.0)
        throw GeometryError("zero-length edge has no normal");
    return Point2(t.y(), -t.x()) / length;
}

namespace {

int sign_with_tol(double v, double tol)
{
    return v > tol ? 1 : (v < -tol ? -1 : 0);
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y()
        && p.y() <= std::max(a.y(), b.y());
}

double polygon_scale(std::span<const Point2> polygon)
{
    Eigen::AlignedBox2d box;
    for (const auto& p : polygon)
        box.extend(p);
    return box.diagonal().norm();
}

}  // namespace

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2)
{
    const double scale = std::max({(p2 - p1).norm(), (q2 - q1).norm(), 1e-300});
    const double tol = 1e-14 * scale * scale;
    const int d1 = sign_with_tol(orient2d(q1, q2, p1), tol);
    const int d2 = sign_with_tol(orient2d(q1, q2, p2), tol);
    const int d3 = sign_with_tol(orient2d(p1, p2, q1), tol);
    const int d4 = sign_with_tol(orient2d(p1, p2, q2), tol);
    if (d1 * d2 < 0 && d3 * d4 < 0)
        return true;
    if (d1 == 0 && on_segment(q1, q2, p1))
        return true;
    if (d2 == 0 && on_segment(q1, q2, p2))
        return true;
    if (d3 == 0 && on_segment(p1, p2, q1))
        return true;
    if (d4 == 0 && on_segment(p1, p2, q2))
        return true;
    return false;
}

bool is_simple_polygon(std::span<const Point2> polygon)
{
    const std::size_t n = polygon.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i)
        if ((polygon[(i + 1) % n] - polygon[i]).norm() == 0.0)
            return false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i1 = (i + 1) % n;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t j1 = (j + 1) % n;
            if (j == i1 || i == j1)
                continue;
            if (segments_intersect(polygon[i], polygon[i1], polygon[j], polygon[j1]))
                return false;
        }
    }
    return true;
}

std::vector<std::array<int, 3>> ear_clip(std::span<const Point2> polygon, int start)
{
    const int n = static_cast<int>(polygon.size());
    if (n < 3)
        throw GeometryError("cannot triangulate a polygon with fewer than 3 vertices");

    const double scale = polygon_scale(polygon);
    const double tol = 1e-14 * scale * scale;

    std::vector<int> remaining(n);
    for (int k = 0; k < n; ++k)
        remaining[k] = ((k + start) % n + n) % n;

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(n - 2);

    auto is_ear = [&](std::size_t k) {
        const std::size_t m = remaining.size();
        const int ip = remaining[(k + m - 1) % m];
        const int i = remaining[k];
        const int in = remaining[(k + 1) % m];
        const Point2& a = polygon[ip];
        const Point2& b = polygon[i];
        const Point2& c = polygon[in];
        if (orient2d(a, b, c) <= tol)
            return false;
        for (const int j : remaining) {
            if (j == ip || j == i || j == in)
                continue;
            const Point2& p = polygon[j];
            if (p == a || p == b || p == c)
                continue;
            if (orient2d(a, b, p) >= -tol && orient2d(b, c, p) >= -tol && orient2d(c, a, p) >= -tol)
                return false;
        }
        return true;
    };

    while (remaining.size() > 3) {
        const std::size_t m = remaining.size();
        bool clipped = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (is_ear(k)) {
                triangles.push_back({remaining[(k + m - 1) % m], remaining[k], remaining[(k + 1) % m]});
                remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
                clipped = true;
                break;
            }
        }
        if (clipped)
            continue;
        // No proper ear: drop a collinear vertex, which contributes no area.
        for (std::size_t k = 0; k < m; ++k) {
            const Point2& a = polygon[remaining[(k + m - 1) % m]];
            const Point2& b = polygon[remaining[k]];
            const Point2& c = polygon[remaining[(k + 1) % m]];
            if (std::abs(orient2d(a, b, c)) <= tol && (b - a).dot(c - b) > 0.0) {
                remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
                clipped = true;
                break;
            }
        }
        if (!clipped)
            throw GeometryError("ear clipping failed: polygon is not simple or not counterclockwise");
    }
    if (orient2d(polygon[remaining[0]], polygon[remaining[1]], polygon[remaining[2]]) > tol)
        triangles.push_back({remaining[0], remaining[1], remaining[2]});
    if (triangles.empty())
        throw GeometryError("ear clipping produced no triangles");
    return triangles;
}

std::vector<Point2> clip_half_plane(std::span<const Point2> polygon, const Point2& origin, const Point2& normal)
{
    std::vector<Point2> out;
    const std::size_t n = polygon.size();
    if (n == 0)
        return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& cur = polygon[i];
        const Point2& nxt = polygon[(i + 1) % n];
        const double dc = (cur - origin).dot(normal);
        const double dn = (nxt - origin).dot(normal);
        if (dc <= 0.0)
            out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            const double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

}  // namespace vemrcp
