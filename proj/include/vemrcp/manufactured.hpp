#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>

#include "vemrcp/material.hpp"
#include "vemrcp/vem.hpp"

namespace vemrcp {

enum class TestId { A, B, C };

std::string_view test_name(TestId id);
std::optional<TestId> parse_test(std::string_view name);

/// Exact displacement with its strain, stress and balancing body force
/// (b = -div sigma).
struct ManufacturedCase {
    std::optional<TestId> id;  // empty for the linear patch-test field
    LameMaterial material;
    VectorField displacement;
    std::function<StrainVector(const Point2&)> strain;
    std::function<StressVector(const Point2&)> stress;
    VectorField body_force;
};

/// Test a: u = (x^3 - 3xy^2, y^3 - 3x^2 y), harmonic, zero body force.
/// Test b: u_x = u_y = sin(pi x) sin(pi y).
/// Test c: u_x = x y sin(pi x) sin(pi y), u_y = 0.
ManufacturedCase manufactured_case(TestId id, const LameMaterial& material);

/// u = (c0 + c1 x + c2 y, c3 + c4 x + c5 y): constant stress, zero body force.
ManufacturedCase linear_case(const LameMaterial& material,
                             const std::array<double, 6>& c = {0.1, 0.3, -0.2, -0.05, 0.15, 0.4});

}  // namespace vemrcp
