#include "vemrcp/manufactured.hpp"

#include <array>
#include <cmath>
#include <memory>

namespace vemrcp {

namespace {

/// Displacement with its first and second derivatives at a point.
struct Jet {
    Eigen::Vector2d u;
    // du[i] = (d/dx, d/dy) of component i
    std::array<Eigen::Vector2d, 2> du;
    // d2u[i] = (xx, xy, yy) of component i
    std::array<Eigen::Vector3d, 2> d2u;
};

using JetFunction = std::function<Jet(const Point2&)>;

ManufacturedCase from_jet(std::optional<TestId> id, const LameMaterial& material, JetFunction jet)
{
    auto shared = std::make_shared<JetFunction>(std::move(jet));
    const Eigen::Matrix3d C = elastic_matrix(material);
    const double l = material.lambda;
    const double m = material.mu;

    ManufacturedCase mc;
    mc.id = id;
    mc.material = material;
    mc.displacement = [shared](const Point2& p) { return (*shared)(p).u; };
    auto strain = [shared](const Point2& p) {
        const Jet j = (*shared)(p);
        return StrainVector(j.du[0].x(), j.du[1].y(), j.du[0].y() + j.du[1].x());
    };
    mc.strain = strain;
    mc.stress = [strain, C](const Point2& p) { return StressVector(C * strain(p)); };
    mc.body_force = [shared, l, m](const Point2& p) {
        const Jet j = (*shared)(p);
        const auto& u = j.d2u[0];
        const auto& v = j.d2u[1];
        return Eigen::Vector2d(-((l + 2 * m) * u[0] + m * u[2] + (l + m) * v[1]),
                               -((l + 2 * m) * v[2] + m * v[0] + (l + m) * u[1]));
    };
    return mc;
}

Jet test_a(const Point2& p)
{
    const double x = p.x(), y = p.y();
    Jet j;
    j.u = {x * x * x - 3 * x * y * y, y * y * y - 3 * x * x * y};
    j.du[0] = {3 * x * x - 3 * y * y, -6 * x * y};
    j.du[1] = {-6 * x * y, 3 * y * y - 3 * x * x};
    j.d2u[0] = {6 * x, -6 * y, -6 * x};
    j.d2u[1] = {-6 * y, -6 * x, 6 * y};
    return j;
}

// s = sin(pi x) sin(pi y) and its derivatives.
struct SineProduct {
    double s, sx, sy, sxx, sxy, syy;
};

SineProduct sine_product(const Point2& p)
{
    const double sx = std::sin(M_PI * p.x()), cx = std::cos(M_PI * p.x());
    const double sy = std::sin(M_PI * p.y()), cy = std::cos(M_PI * p.y());
    const double pi2 = M_PI * M_PI;
    return {sx * sy, M_PI * cx * sy, M_PI * sx * cy, -pi2 * sx * sy, pi2 * cx * cy, -pi2 * sx * sy};
}

Jet test_b(const Point2& p)
{
    const SineProduct f = sine_product(p);
    Jet j;
    j.u = {f.s, f.s};
    j.du[0] = j.du[1] = {f.sx, f.sy};
    j.d2u[0] = j.d2u[1] = {f.sxx, f.sxy, f.syy};
    return j;
}

Jet test_c(const Point2& p)
{
    const double x = p.x(), y = p.y();
    const SineProduct f = sine_product(p);
    Jet j;
    j.u = {x * y * f.s, 0.0};
    j.du[0] = {y * f.s + x * y * f.sx, x * f.s + x * y * f.sy};
    j.du[1] = {0.0, 0.0};
    j.d2u[0] = {2 * y * f.sx + x * y * f.sxx,  //
                f.s + x * f.sx + y * f.sy + x * y * f.sxy,
                2 * x * f.sy + x * y * f.syy};
    j.d2u[1] = Eigen::Vector3d::Zero();
    return j;
}

}  // namespace

std::string_view test_name(TestId id)
{
    switch (id) {
    case TestId::A: return "a";
    case TestId::B: return "b";
    case TestId::C: return "c";
    }
    return "?";
}

std::optional<TestId> parse_test(std::string_view name)
{
    if (name == "a")
        return TestId::A;
    if (name == "b")
        return TestId::B;
    if (name == "c")
        return TestId::C;
    return std::nullopt;
}

ManufacturedCase manufactured_case(TestId id, const LameMaterial& material)
{
    switch (id) {
    case TestId::A: {
        // u is harmonic and divergence free, so mu lap u + (lambda + mu) grad div u
        // vanishes for every material; return exact zeros rather than a
        // cancellation residue.
        ManufacturedCase mc = from_jet(id, material, test_a);
        mc.body_force = [](const Point2&) { return Eigen::Vector2d::Zero().eval(); };
        return mc;
    }
    case TestId::B: return from_jet(id, material, test_b);
    case TestId::C: return from_jet(id, material, test_c);
    }
    throw std::invalid_argument("unknown manufactured test id");
}

ManufacturedCase linear_case(const LameMaterial& material, const std::array<double, 6>& c)
{
    return from_jet(std::nullopt, material, [c](const Point2& p) {
        Jet j;
        j.u = {c[0] + c[1] * p.x() + c[2] * p.y(), c[3] + c[4] * p.x() + c[5] * p.y()};
        j.du[0] = {c[1], c[2]};
        j.du[1] = {c[4], c[5]};
        j.d2u[0] = j.d2u[1] = Eigen::Vector3d::Zero();
        return j;
    });
}

}  // namespace vemrcp
