#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vemrcp/material.hpp"
#include "vemrcp/mesh.hpp"

namespace vemrcp {

using VectorField = std::function<Eigen::Vector2d(const Point2&)>;

class VemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public VemError {
public:
    SolverError(const std::string& what, double residual) : VemError(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// First-order element matrices. Local dofs are ordered (u1, v1, u2, v2, ...)
/// over the cell's counterclockwise vertices.
struct ElementOperators {
    int cell = -1;
    int n = 0;
    double area = 0.0;
    Eigen::Matrix3d G;
    Eigen::MatrixXd B;     // 3 x 2n
    Eigen::MatrixXd Pi_m;  // 3 x 2n, maps dofs to the constant strain
    Eigen::MatrixXd Kc;    // 2n x 2n, rank 3
    Eigen::MatrixXd Ks;    // 2n x 2n, vanishes on linear fields
    Eigen::MatrixXd K;     // Kc + Ks, rank 2n - 3
};

/// G = integral of (N^P)^T N^P; N^P is the identity for constant strains, so
/// G = |E| I.
Eigen::Matrix3d compute_G(const PolygonalMesh& mesh, int cell);

/// Boundary integral of (N_E N^P)^T N^V. The virtual trace is linear on
/// each edge, so an edge of length L adds (L/2) N_E^T to both endpoints.
Eigen::MatrixXd compute_B(const PolygonalMesh& mesh, int cell);

Eigen::MatrixXd compute_Pi_m(const Eigen::Matrix3d& G, const Eigen::MatrixXd& B);

/// Kc = |E| Pi_m^T C Pi_m.
Eigen::MatrixXd consistency_stiffness(const Eigen::MatrixXd& Pi_m, const Eigen::Matrix3d& C, double area);

/// Ks = tau (I - P_L)^T (I - P_L) where P_L is the least-squares projector
/// onto vertex samples of the six linear vector fields and
/// tau = scale * trace(Kc) / 2.
Eigen::MatrixXd stabilization_stiffness(const PolygonalMesh& mesh, int cell, const Eigen::MatrixXd& Kc,
                                        double scale = 1.0);

ElementOperators element_operators(const PolygonalMesh& mesh, int cell, const LameMaterial& material,
                                   double stabilization_scale = 1.0);

/// Each vertex receives (|E| / n) b(centroid).
Eigen::VectorXd element_load_vector(const PolygonalMesh& mesh, int cell, const VectorField& body_force);

struct AssemblyOptions {
    double stabilization_scale = 1.0;
};

/// Global dofs are (u_v, v_v) at 2v, 2v + 1.
struct GlobalSystem {
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd f;
    std::vector<ElementOperators> elements;
};

/// `body_force` may be empty (no load).
GlobalSystem assemble_global(const PolygonalMesh& mesh, const LameMaterial& material, const VectorField& body_force,
                             const AssemblyOptions& options = {});

using BoundaryValues = std::map<int, Eigen::Vector2d>;

/// Samples `displacement` at every boundary vertex.
BoundaryValues boundary_values_from(const PolygonalMesh& mesh, const VectorField& displacement);

struct ConstrainedSystem {
    Eigen::SparseMatrix<double> K_free;
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;
    Eigen::VectorXd prescribed;  // full length; zero on free dofs
};

/// Strong elimination of prescribed dofs. Every boundary vertex of `mesh`
/// must appear in `values`.
ConstrainedSystem apply_dirichlet(const PolygonalMesh& mesh, const GlobalSystem& system, const BoundaryValues& values);

/// Returns the full global dof vector; throws SolverError when the relative
/// residual exceeds 1e-10.
Eigen::VectorXd solve_system(const ConstrainedSystem& system);

Eigen::VectorXd gather_local_dofs(const PolygonalMesh& mesh, int cell, const Eigen::VectorXd& global);

/// sigma = C Pi_m dofs, constant over the cell.
StressVector element_stress_vem(const Eigen::MatrixXd& Pi_m, const Eigen::Matrix3d& C,
                                const Eigen::VectorXd& local_dofs);

struct VemSolution {
    GlobalSystem system;
    Eigen::VectorXd displacement;
};

/// Assemble, impose `boundary_displacement` on all boundary vertices, solve.
VemSolution solve_elasticity(const PolygonalMesh& mesh, const LameMaterial& material, const VectorField& body_force,
                             const VectorField& boundary_displacement, const AssemblyOptions& options = {});

/// Per-cell VEM stresses of a solved system.
std::vector<StressVector> vem_stresses(const PolygonalMesh& mesh, const LameMaterial& material,
                                       const VemSolution& solution);

}  // namespace vemrcp
