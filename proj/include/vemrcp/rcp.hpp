#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vemrcp/material.hpp"
#include "vemrcp/mesh.hpp"
#include "vemrcp/quadrature.hpp"
#include "vemrcp/vem.hpp"

namespace vemrcp {

using StressModes = Eigen::Matrix<double, 3, 7>;
using Matrix7d = Eigen::Matrix<double, 7, 7>;
using Vector7d = Eigen::Matrix<double, 7, 1>;

class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double condition) : std::runtime_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// Linear self-equilibrated stress modes expressed in the local coordinates
/// xi = (x - center.x) / scale, eta = (y - center.y) / scale.
struct StressModeBasis {
    Point2 center = Point2::Zero();
    double scale = 1.0;
};

/// Columns: three constant modes, then (eta, 0, 0), (0, xi, 0),
/// (xi, 0, -eta), (0, eta, -xi). Every column is divergence free.
StressModes stress_modes_at(const StressModeBasis& basis, const Point2& point);

/// Centroid and diameter of the union of the patch cells.
StressModeBasis patch_basis(const PolygonalMesh& mesh, const ElementPatch& patch);

/// Closed-form particular solution supplied by the caller; must satisfy
/// div sigma_p + b = 0.
using ParticularField = std::function<StressVector(const Point2&)>;

/// Antiderivative of a body force frozen at the cell centroid:
/// sigma_p = (-b_x (x - x_c), -b_y (y - y_c), 0), so div sigma_p = -b.
struct CellParticular {
    Point2 origin = Point2::Zero();
    Eigen::Vector2d body_force = Eigen::Vector2d::Zero();

    StressVector at(const Point2& p) const
    {
        return {-body_force.x() * (p.x() - origin.x()), -body_force.y() * (p.y() - origin.y()), 0.0};
    }
};

/// Particular stress over a patch. A single field is used for every member
/// cell: the body force sampled at the central cell's centroid. Per-member
/// samples would make sigma_p jump by O(h) between cells, which the linear
/// modes cannot absorb. When `analytic` is set it replaces the sampled field.
struct ParticularStress {
    CellParticular sampled;
    ParticularField analytic;

    StressVector at(const Point2& p) const { return analytic ? analytic(p) : sampled.at(p); }
};

CellParticular cell_particular(const PolygonalMesh& mesh, int cell, const VectorField& body_force);

ParticularStress particular_solution(const PolygonalMesh& mesh, const ElementPatch& patch,
                                     const VectorField& body_force, const ParticularField& analytic = {});

/// Sum over the patch cells of the integral of P^T C^-1 P. Throws
/// ConditioningError when the condition number exceeds 1e12.
Matrix7d compute_H(const PolygonalMesh& mesh, const ElementPatch& patch, const StressModeBasis& basis,
                   const LameMaterial& material);

/// Outer-boundary integral of P^T N_E^T u (two-point Gauss per edge, u linear
/// between vertex dofs) minus the patch integral of P^T C^-1 sigma_p.
Vector7d compute_g(const PolygonalMesh& mesh, const ElementPatch& patch, const StressModeBasis& basis,
                   const LameMaterial& material, const Eigen::VectorXd& displacement,
                   const ParticularStress& particular);

Vector7d solve_patch(const Matrix7d& H, const Vector7d& g);

enum class RecoveryKind { RCP0, RCP1 };

struct CellRecovery {
    Vector7d beta = Vector7d::Zero();
    StressModeBasis basis;
    CellParticular particular;
    PatchKind patch_kind = PatchKind::Patch0;
    bool fell_back = false;  // Patch1 was ill-conditioned; Patch0 used instead
    bool failed = false;     // no patch could be solved
};

struct RecoveredStressField {
    std::vector<CellRecovery> cells;
    ParticularField analytic;
    std::vector<std::string> diagnostics;

    int fallback_count() const;
    int failure_count() const;
};

struct RecoveryOptions {
    ParticularField analytic_particular;
};

/// The stress of each cell comes from the patch centred on that cell.
RecoveredStressField recover_field(const PolygonalMesh& mesh, const LameMaterial& material,
                                   const Eigen::VectorXd& displacement, const VectorField& body_force,
                                   RecoveryKind kind, const RecoveryOptions& options = {});

/// P(point) beta + sigma_p(point) for the given cell.
StressVector evaluate_recovered_stress(const RecoveredStressField& field, int cell, const Point2& point);

}  // namespace vemrcp
