#include "vemrcp/quadrature.hpp"

#include <array>
#include <cmath>

namespace vemrcp {

namespace {

struct BarycentricPoint {
    double l1, l2, l3, w;
};

const std::array<BarycentricPoint, 7>& degree5_rule()
{
    static const std::array<BarycentricPoint, 7> rule = [] {
        const double s = std::sqrt(15.0);
        const double a1 = (6.0 - s) / 21.0;
        const double a2 = (6.0 + s) / 21.0;
        const double w1 = (155.0 - s) / 1200.0;
        const double w2 = (155.0 + s) / 1200.0;
        const double b1 = 1.0 - 2.0 * a1;
        const double b2 = 1.0 - 2.0 * a2;
        return std::array<BarycentricPoint, 7>{{
            {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
            {a1, a1, b1, w1},
            {a1, b1, a1, w1},
            {b1, a1, a1, w1},
            {a2, a2, b2, w2},
            {a2, b2, a2, w2},
            {b2, a2, a2, w2},
        }};
    }();
    return rule;
}

}  // namespace

QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c)
{
    const double area = 0.5 * orient2d(a, b, c);
    QuadratureRule rule;
    rule.reserve(7);
    for (const auto& q : degree5_rule())
        rule.push_back({q.l1 * a + q.l2 * b + q.l3 * c, q.w * area});
    return rule;
}

QuadratureRule cell_quadrature(const PolygonalMesh& mesh, int cell, int start)
{
    QuadratureRule rule;
    for (const auto& t : triangulate_polygon(mesh, cell, start)) {
        const auto tri = triangle_quadrature(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
        rule.insert(rule.end(), tri.begin(), tri.end());
    }
    return rule;
}

double polygon_quadrature(const PolygonalMesh& mesh, int cell, const std::function<double(const Point2&)>& integrand)
{
    double sum = 0.0;
    for (const auto& q : cell_quadrature(mesh, cell))
        sum += q.weight * integrand(q.point);
    return sum;
}

}  // namespace vemrcp
