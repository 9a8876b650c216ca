#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vemrcp/manufactured.hpp"
#include "vemrcp/mesh.hpp"
#include "vemrcp/rcp.hpp"

namespace vemrcp {

enum class RecoveryMethod { VEM = 0, RCP0 = 1, RCP1 = 2 };
inline constexpr std::array<RecoveryMethod, 3> kAllMethods{RecoveryMethod::VEM, RecoveryMethod::RCP0,
                                                           RecoveryMethod::RCP1};

std::string_view method_name(RecoveryMethod method);
std::optional<RecoveryMethod> parse_method(std::string_view name);

using StressProvider = std::function<StressVector(int cell, const Point2&)>;
using StressFunction = std::function<StressVector(const Point2&)>;

/// E = sum over cells of the integral of (s_ex - s)^T C^-1 (s_ex - s),
/// squared (no root). `triangulation_start` rotates the ear-clip start vertex.
double energy_error_norm(const PolygonalMesh& mesh, const LameMaterial& material, const StressFunction& exact,
                         const StressProvider& approx, int triangulation_start = 0);

double energy_error_norm(const PolygonalMesh& mesh, const ManufacturedCase& mc, const StressProvider& approx);

/// Solution of one manufactured case on one mesh with all requested stress
/// recoveries.
struct LevelSolution {
    VemSolution vem;
    std::vector<StressVector> vem_stress;
    std::optional<RecoveredStressField> rcp0;
    std::optional<RecoveredStressField> rcp1;
};

LevelSolution solve_level(const PolygonalMesh& mesh, const ManufacturedCase& mc,
                          const std::vector<RecoveryMethod>& methods);

StressProvider stress_provider(const LevelSolution& level, RecoveryMethod method);

struct ConvergenceRecord {
    TestId test = TestId::A;
    MeshFamily family = MeshFamily::QuadS;
    int level = 0;  // mesh subdivisions
    double h_e = 0.0;
    int dofs = 0;
    // Indexed by RecoveryMethod; NaN when the method was not requested.
    std::array<double, 3> error{std::nan(""), std::nan(""), std::nan("")};
    double time_s = 0.0;
    int rcp1_fallbacks = 0;
    std::string failure;  // non-empty when the level failed

    double error_of(RecoveryMethod m) const { return error[static_cast<std::size_t>(m)]; }
};

struct StudyOptions {
    TestId test = TestId::A;
    MeshFamily family = MeshFamily::QuadS;
    std::vector<int> subdivisions{8, 16, 32, 64};
    LameMaterial material;
    std::vector<RecoveryMethod> methods{kAllMethods.begin(), kAllMethods.end()};
    std::uint64_t seed = 0;
    /// Used instead of generation when the family is External.
    std::optional<PolygonalMesh> external_mesh;
};

/// One record per level; a failing level is recorded and the study continues.
std::vector<ConvergenceRecord> run_convergence_study(const StudyOptions& options);

struct RateEstimate {
    double slope = std::nan("");
    bool monotone = true;  // error strictly decreasing with h
    int points = 0;
};

/// Least-squares slope of log E against log h over records with a finite,
/// positive error for `method`.
RateEstimate observed_rate(const std::vector<ConvergenceRecord>& records, RecoveryMethod method);

/// Linear displacement field with zero body force, solved on the given mesh.
struct PatchTestResult {
    double displacement_error = 0.0;  // max over interior vertices, relative to max |u|
    std::array<double, 3> error{};    // E per RecoveryMethod
};

/// Coefficients (a0, a1, a2, b0, b1, b2) of u = a0 + a1 x + a2 y,
/// v = b0 + b1 x + b2 y used by the patch test.
inline constexpr std::array<double, 6> kPatchTestCoefficients{0.1, 0.3, -0.2, -0.05, 0.15, 0.4};

PatchTestResult run_patch_test(const PolygonalMesh& mesh, const LameMaterial& material = {});

}  // namespace vemrcp
