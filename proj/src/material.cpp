#include "vemrcp/material.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace vemrcp {

namespace {

void require_valid(const LameMaterial& m)
{
    if (!m.is_valid())
        throw MaterialError(
            fmt::format("elastic matrix is not positive definite for lambda = {}, mu = {}", m.lambda, m.mu));
}

}  // namespace

Eigen::Matrix3d elastic_matrix(const LameMaterial& material)
{
    require_valid(material);
    const double l = material.lambda;
    const double m = material.mu;
    Eigen::Matrix3d c;
    c << l + 2 * m, l, 0,  //
        l, l + 2 * m, 0,   //
        0, 0, m;
    return c;
}

Eigen::Matrix3d compliance_matrix(const LameMaterial& material)
{
    require_valid(material);
    // Closed-form inverse of the 2x2 normal block; shear decouples.
    const double a = material.lambda + 2 * material.mu;
    const double b = material.lambda;
    const double det = a * a - b * b;
    Eigen::Matrix3d s;
    s << a / det, -b / det, 0,  //
        -b / det, a / det, 0,   //
        0, 0, 1.0 / material.mu;
    return s;
}

double von_mises(const StressVector& stress, const LameMaterial& material)
{
    const double sx = stress[0];
    const double sy = stress[1];
    const double txy = stress[2];
    const double sz = material.poisson_ratio() * (sx + sy);
    const double j2 = sx * sx + sy * sy + sz * sz - sx * sy - sy * sz - sz * sx + 3.0 * txy * txy;
    return std::sqrt(std::max(j2, 0.0));
}

}  // namespace vemrcp
