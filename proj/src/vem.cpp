#include "vemrcp/vem.hpp"

#include <cmath>

#include <fmt/format.h>

#include "vemrcp/parallel.hpp"

namespace vemrcp {

Eigen::Matrix3d compute_G(const PolygonalMesh& mesh, int cell)
{
    return polygon_area(mesh, cell) * Eigen::Matrix3d::Identity();
}

Eigen::MatrixXd compute_B(const PolygonalMesh& mesh, int cell)
{
    const auto& cyc = mesh.cell(cell);
    const int n = static_cast<int>(cyc.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * n);
    for (int k = 0; k < n; ++k) {
        const int k1 = (k + 1) % n;
        const Point2 t = mesh.vertex(cyc[k1]) - mesh.vertex(cyc[k]);
        const double half = 0.5 * t.norm();
        const Point2 nrm = edge_outward_normal(mesh, cell, k);
        // N_E^T = [[nx, 0], [0, ny], [ny, nx]]
        Eigen::Matrix<double, 3, 2> ne_t;
        ne_t << nrm.x(), 0.0, 0.0, nrm.y(), nrm.y(), nrm.x();
        B.middleCols<2>(2 * k) += half * ne_t;
        B.middleCols<2>(2 * k1) += half * ne_t;
    }
    return B;
}

Eigen::MatrixXd compute_Pi_m(const Eigen::Matrix3d& G, const Eigen::MatrixXd& B)
{
    const Eigen::LLT<Eigen::Matrix3d> llt(G);
    if (llt.info() != Eigen::Success || !(G.diagonal().minCoeff() > 0.0))
        throw VemError("projection matrix G is singular (degenerate cell)");
    return llt.solve(B);
}

Eigen::MatrixXd consistency_stiffness(const Eigen::MatrixXd& Pi_m, const Eigen::Matrix3d& C, double area)
{
    Eigen::MatrixXd Kc = area * Pi_m.transpose() * C * Pi_m;
    return 0.5 * (Kc + Kc.transpose());
}

Eigen::MatrixXd stabilization_stiffness(const PolygonalMesh& mesh, int cell, const Eigen::MatrixXd& Kc, double scale)
{
    const auto& cyc = mesh.cell(cell);
    const int n = static_cast<int>(cyc.size());
    const Point2 center = polygon_centroid(mesh, cell);
    const double diameter = polygon_diameter(mesh, cell);

    // Vertex samples of {(1,0), (0,1), (-y,x), (x,0), (0,y), (y,x)} in
    // centred, scaled coordinates (same span as in global coordinates).
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, 6);
    for (int k = 0; k < n; ++k) {
        const Point2 p = (mesh.vertex(cyc[k]) - center) / diameter;
        D.row(2 * k) << 1.0, 0.0, -p.y(), p.x(), 0.0, p.y();
        D.row(2 * k + 1) << 0.0, 1.0, p.x(), 0.0, p.y(), p.x();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    qr.setThreshold(1e-10);
    if (qr.rank() < 6)
        throw VemError(fmt::format("cell {}: linear fields are not resolved by its vertices (rank {} < 6)", cell,
                                   qr.rank()));
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, 6);
    Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(2 * n, 2 * n) - Q * Q.transpose();
    const double tau = scale * 0.5 * Kc.trace();
    Eigen::MatrixXd Ks = tau * complement.transpose() * complement;
    return 0.5 * (Ks + Ks.transpose());
}

ElementOperators element_operators(const PolygonalMesh& mesh, int cell, const LameMaterial& material,
                                   double stabilization_scale)
{
    ElementOperators op;
    op.cell = cell;
    op.n = static_cast<int>(mesh.cell(cell).size());
    op.area = polygon_area(mesh, cell);
    op.G = compute_G(mesh, cell);
    op.B = compute_B(mesh, cell);
    op.Pi_m = compute_Pi_m(op.G, op.B);
    op.Kc = consistency_stiffness(op.Pi_m, elastic_matrix(material), op.area);
    op.Ks = stabilization_stiffness(mesh, cell, op.Kc, stabilization_scale);
    op.K = op.Kc + op.Ks;
    return op;
}

Eigen::VectorXd element_load_vector(const PolygonalMesh& mesh, int cell, const VectorField& body_force)
{
    const int n = static_cast<int>(mesh.cell(cell).size());
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * n);
    if (!body_force)
        return f;
    const Eigen::Vector2d b = body_force(polygon_centroid(mesh, cell));
    const double share = polygon_area(mesh, cell) / n;
    for (int k = 0; k < n; ++k)
        f.segment<2>(2 * k) = share * b;
    return f;
}

GlobalSystem assemble_global(const PolygonalMesh& mesh, const LameMaterial& material, const VectorField& body_force,
                             const AssemblyOptions& options)
{
    const int nc = mesh.num_cells();
    const int ndof = 2 * mesh.num_vertices();
    GlobalSystem sys;
    sys.elements.resize(nc);
    std::vector<Eigen::VectorXd> loads(nc);
    parallel_for(static_cast<std::size_t>(nc), [&](std::size_t c) {
        const int cell = static_cast<int>(c);
        sys.elements[c] = element_operators(mesh, cell, material, options.stabilization_scale);
        loads[c] = element_load_vector(mesh, cell, body_force);
    });

    // Scatter in fixed cell order for reproducible sums.
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t reserve = 0;
    for (const auto& op : sys.elements)
        reserve += static_cast<std::size_t>(4 * op.n * op.n);
    triplets.reserve(reserve);
    sys.f = Eigen::VectorXd::Zero(ndof);
    for (int c = 0; c < nc; ++c) {
        const auto& cyc = mesh.cell(c);
        const auto& K = sys.elements[c].K;
        const int n = static_cast<int>(cyc.size());
        for (int a = 0; a < 2 * n; ++a) {
            const int ga = 2 * cyc[a / 2] + a % 2;
            sys.f[ga] += loads[c][a];
            for (int b = 0; b < 2 * n; ++b)
                triplets.emplace_back(ga, 2 * cyc[b / 2] + b % 2, K(a, b));
        }
    }
    sys.K.resize(ndof, ndof);
    sys.K.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

BoundaryValues boundary_values_from(const PolygonalMesh& mesh, const VectorField& displacement)
{
    BoundaryValues values;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (mesh.is_boundary_vertex(v))
            values.emplace(v, displacement(mesh.vertex(v)));
    return values;
}

ConstrainedSystem apply_dirichlet(const PolygonalMesh& mesh, const GlobalSystem& system, const BoundaryValues& values)
{
    if (values.empty())
        throw VemError("no Dirichlet values: the structure is unconstrained");
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (mesh.is_boundary_vertex(v) && values.find(v) == values.end())
            throw VemError(fmt::format("boundary vertex {} has no prescribed displacement", v));

    const int ndof = static_cast<int>(system.f.size());
    ConstrainedSystem out;
    out.prescribed = Eigen::VectorXd::Zero(ndof);
    std::vector<std::uint8_t> fixed(ndof, 0);
    for (const auto& [v, u] : values) {
        if (v < 0 || 2 * v + 1 >= ndof)
            throw VemError(fmt::format("Dirichlet value for vertex {} out of range", v));
        out.prescribed.segment<2>(2 * v) = u;
        fixed[2 * v] = fixed[2 * v + 1] = 1;
    }
    std::vector<int> free_index(ndof, -1);
    for (int d = 0; d < ndof; ++d)
        if (!fixed[d]) {
            free_index[d] = static_cast<int>(out.free_dofs.size());
            out.free_dofs.push_back(d);
        }
    const int nfree = static_cast<int>(out.free_dofs.size());

    const Eigen::VectorXd lifted = system.f - system.K * out.prescribed;
    out.rhs.resize(nfree);
    for (int i = 0; i < nfree; ++i)
        out.rhs[i] = lifted[out.free_dofs[i]];

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(system.K.nonZeros()));
    for (int col = 0; col < system.K.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.K, col); it; ++it) {
            const int r = free_index[it.row()];
            const int c = free_index[it.col()];
            if (r >= 0 && c >= 0)
                triplets.emplace_back(r, c, it.value());
        }
    out.K_free.resize(nfree, nfree);
    out.K_free.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

Eigen::VectorXd solve_system(const ConstrainedSystem& system)
{
    Eigen::VectorXd full = system.prescribed;
    if (system.free_dofs.empty())
        return full;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(system.K_free);
    if (solver.info() != Eigen::Success)
        throw SolverError("factorization of the free-dof stiffness failed (matrix not SPD?)",
                          std::numeric_limits<double>::infinity());
    Eigen::VectorXd x = solver.solve(system.rhs);
    const double rhs_norm = std::max(system.rhs.norm(), std::numeric_limits<double>::min());
    Eigen::VectorXd r = system.rhs - system.K_free * x;
    // One step of iterative refinement.
    if (r.norm() > 1e-12 * rhs_norm) {
        x += solver.solve(r);
        r = system.rhs - system.K_free * x;
    }
    const double residual = system.rhs.norm() == 0.0 ? r.norm() : r.norm() / rhs_norm;
    if (!(residual <= 1e-10))
        throw SolverError(fmt::format("linear solve residual {:.3e} exceeds 1e-10", residual), residual);
    for (std::size_t i = 0; i < system.free_dofs.size(); ++i)
        full[system.free_dofs[i]] = x[static_cast<Eigen::Index>(i)];
    return full;
}

Eigen::VectorXd gather_local_dofs(const PolygonalMesh& mesh, int cell, const Eigen::VectorXd& global)
{
    const auto& cyc = mesh.cell(cell);
    Eigen::VectorXd local(2 * cyc.size());
    for (std::size_t k = 0; k < cyc.size(); ++k)
        local.segment<2>(2 * static_cast<Eigen::Index>(k)) = global.segment<2>(2 * cyc[k]);
    return local;
}

StressVector element_stress_vem(const Eigen::MatrixXd& Pi_m, const Eigen::Matrix3d& C,
                                const Eigen::VectorXd& local_dofs)
{
    return C * (Pi_m * local_dofs);
}

VemSolution solve_elasticity(const PolygonalMesh& mesh, const LameMaterial& material, const VectorField& body_force,
                             const VectorField& boundary_displacement, const AssemblyOptions& options)
{
    VemSolution sol;
    sol.system = assemble_global(mesh, material, body_force, options);
    const auto constrained = apply_dirichlet(mesh, sol.system, boundary_values_from(mesh, boundary_displacement));
    sol.displacement = solve_system(constrained);
    return sol;
}

std::vector<StressVector> vem_stresses(const PolygonalMesh& mesh, const LameMaterial& material,
                                       const VemSolution& solution)
{
    const Eigen::Matrix3d C = elastic_matrix(material);
    std::vector<StressVector> out(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c)
        out[c] = element_stress_vem(solution.system.elements[c].Pi_m, C,
                                    gather_local_dofs(mesh, c, solution.displacement));
    return out;
}

}  // namespace vemrcp
