#include "vemrcp/rcp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vemrcp/parallel.hpp"

namespace vemrcp {

namespace {

constexpr double kMaxCondition = 1e12;

using RuleLookup = std::function<const QuadratureRule&(int)>;

Matrix7d assemble_H(const ElementPatch& patch, const StressModeBasis& basis, const Eigen::Matrix3d& S,
                    const RuleLookup& rule_of)
{
    Matrix7d H = Matrix7d::Zero();
    for (const int c : patch.member_cells)
        for (const auto& q : rule_of(c)) {
            const StressModes P = stress_modes_at(basis, q.point);
            H.noalias() += q.weight * (P.transpose() * S * P);
        }
    H = 0.5 * (H + H.transpose()).eval();

    const Eigen::SelfAdjointEigenSolver<Matrix7d> eig(H, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= kMaxCondition))
        throw ConditioningError(fmt::format("patch of cell {}: H condition number {:.3e} exceeds {:.0e}",
                                            patch.central_cell, condition, kMaxCondition),
                                condition);
    return H;
}

Vector7d assemble_g(const PolygonalMesh& mesh, const ElementPatch& patch, const StressModeBasis& basis,
                    const Eigen::Matrix3d& S, const Eigen::VectorXd& displacement,
                    const ParticularStress& particular, const RuleLookup& rule_of)
{
    static const double gauss_offset = 0.5 / std::sqrt(3.0);
    Vector7d g = Vector7d::Zero();
    const auto& members = patch.member_cells;
    auto is_member = [&](int c) { return c >= 0 && std::binary_search(members.begin(), members.end(), c); };

    for (const int c : members) {
        const auto& cyc = mesh.cell(c);
        const int n = static_cast<int>(cyc.size());
        for (int k = 0; k < n; ++k) {
            if (is_member(mesh.edge_neighbor(c, k)))
                continue;
            const int va = cyc[k];
            const int vb = cyc[(k + 1) % n];
            const Point2& a = mesh.vertex(va);
            const Point2& b = mesh.vertex(vb);
            const Point2 nrm = outward_normal(a, b);
            const double half_length = 0.5 * (b - a).norm();
            const Eigen::Vector2d ua = displacement.segment<2>(2 * va);
            const Eigen::Vector2d ub = displacement.segment<2>(2 * vb);
            for (const double t : {0.5 - gauss_offset, 0.5 + gauss_offset}) {
                const Point2 x = (1.0 - t) * a + t * b;
                const Eigen::Vector2d u = (1.0 - t) * ua + t * ub;
                const Eigen::Vector3d traction_work(nrm.x() * u.x(), nrm.y() * u.y(), nrm.y() * u.x() + nrm.x() * u.y());
                g.noalias() += half_length * (stress_modes_at(basis, x).transpose() * traction_work);
            }
        }
        for (const auto& q : rule_of(c)) {
            const StressModes P = stress_modes_at(basis, q.point);
            g.noalias() -= q.weight * (P.transpose() * (S * particular.at(q.point)));
        }
    }
    return g;
}

RuleLookup own_rules(const PolygonalMesh& mesh, const ElementPatch& patch, std::vector<QuadratureRule>& storage)
{
    storage.clear();
    for (const int c : patch.member_cells)
        storage.push_back(cell_quadrature(mesh, c));
    return [&patch, &storage](int c) -> const QuadratureRule& {
        const auto it = std::lower_bound(patch.member_cells.begin(), patch.member_cells.end(), c);
        return storage[static_cast<std::size_t>(it - patch.member_cells.begin())];
    };
}

}  // namespace

StressModes stress_modes_at(const StressModeBasis& basis, const Point2& point)
{
    const double xi = (point.x() - basis.center.x()) / basis.scale;
    const double eta = (point.y() - basis.center.y()) / basis.scale;
    StressModes P;
    P << 1, 0, 0, eta, 0, xi, 0,  //
        0, 1, 0, 0, xi, 0, eta,   //
        0, 0, 1, 0, 0, -eta, -xi;
    return P;
}

StressModeBasis patch_basis(const PolygonalMesh& mesh, const ElementPatch& patch)
{
    double area = 0.0;
    Point2 moment = Point2::Zero();
    std::vector<int> verts;
    for (const int c : patch.member_cells) {
        const double a = polygon_area(mesh, c);
        area += a;
        moment += a * polygon_centroid(mesh, c);
        verts.insert(verts.end(), mesh.cell(c).begin(), mesh.cell(c).end());
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    double diameter = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            diameter = std::max(diameter, (mesh.vertex(verts[i]) - mesh.vertex(verts[j])).norm());
    return {moment / area, diameter};
}

CellParticular cell_particular(const PolygonalMesh& mesh, int cell, const VectorField& body_force)
{
    CellParticular p;
    p.origin = polygon_centroid(mesh, cell);
    if (body_force)
        p.body_force = body_force(p.origin);
    return p;
}

ParticularStress particular_solution(const PolygonalMesh& mesh, const ElementPatch& patch,
                                     const VectorField& body_force, const ParticularField& analytic)
{
    ParticularStress out;
    out.analytic = analytic;
    out.sampled = cell_particular(mesh, patch.central_cell, body_force);
    return out;
}

Matrix7d compute_H(const PolygonalMesh& mesh, const ElementPatch& patch, const StressModeBasis& basis,
                   const LameMaterial& material)
{
    std::vector<QuadratureRule> storage;
    return assemble_H(patch, basis, compliance_matrix(material), own_rules(mesh, patch, storage));
}

Vector7d compute_g(const PolygonalMesh& mesh, const ElementPatch& patch, const StressModeBasis& basis,
                   const LameMaterial& material, const Eigen::VectorXd& displacement,
                   const ParticularStress& particular)
{
    std::vector<QuadratureRule> storage;
    return assemble_g(mesh, patch, basis, compliance_matrix(material), displacement, particular,
                      own_rules(mesh, patch, storage));
}

Vector7d solve_patch(const Matrix7d& H, const Vector7d& g)
{
    const double g_norm = g.norm();
    if (g_norm == 0.0)
        return Vector7d::Zero();
    const Eigen::LLT<Matrix7d> llt(H);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("patch matrix H is not positive definite", std::numeric_limits<double>::infinity());
    Vector7d beta = llt.solve(g);
    Vector7d r = g - H * beta;
    if (r.norm() > 1e-12 * g_norm) {
        beta += llt.solve(r);
        r = g - H * beta;
    }
    if (!beta.allFinite())
        throw ConditioningError("patch solution is not finite", std::numeric_limits<double>::infinity());
    return beta;
}

int RecoveredStressField::fallback_count() const
{
    return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.fell_back; }));
}

int RecoveredStressField::failure_count() const
{
    return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.failed; }));
}

RecoveredStressField recover_field(const PolygonalMesh& mesh, const LameMaterial& material,
                                   const Eigen::VectorXd& displacement, const VectorField& body_force,
                                   RecoveryKind kind, const RecoveryOptions& options)
{
    const int nc = mesh.num_cells();
    const Eigen::Matrix3d S = compliance_matrix(material);

    std::vector<QuadratureRule> rules(nc);
    std::vector<CellParticular> particulars(nc);
    parallel_for(static_cast<std::size_t>(nc), [&](std::size_t c) {
        rules[c] = cell_quadrature(mesh, static_cast<int>(c));
        particulars[c] = cell_particular(mesh, static_cast<int>(c), body_force);
    });
    const RuleLookup rule_of = [&rules](int c) -> const QuadratureRule& { return rules[c]; };

    RecoveredStressField field;
    field.analytic = options.analytic_particular;
    field.cells.resize(nc);
    std::vector<std::string> messages(nc);

    auto solve_on = [&](const ElementPatch& patch, CellRecovery& out) {
        ParticularStress particular;
        particular.analytic = options.analytic_particular;
        particular.sampled = particulars[patch.central_cell];
        const StressModeBasis basis = patch_basis(mesh, patch);
        const Matrix7d H = assemble_H(patch, basis, S, rule_of);
        const Vector7d g = assemble_g(mesh, patch, basis, S, displacement, particular, rule_of);
        out.beta = solve_patch(H, g);
        out.basis = basis;
        out.patch_kind = patch.kind;
    };

    parallel_for(static_cast<std::size_t>(nc), [&](std::size_t index) {
        const int cell = static_cast<int>(index);
        CellRecovery& out = field.cells[index];
        out.particular = particulars[index];
        const PatchKind requested = kind == RecoveryKind::RCP0 ? PatchKind::Patch0 : PatchKind::Patch1;
        try {
            solve_on(build_patch(mesh, cell, requested), out);
            return;
        } catch (const ConditioningError& e) {
            messages[index] = e.what();
        }
        if (requested != PatchKind::Patch0) {
            try {
                solve_on(build_patch(mesh, cell, PatchKind::Patch0), out);
                out.fell_back = true;
                messages[index] += "; fell back to Patch0";
                return;
            } catch (const ConditioningError& e) {
                messages[index] += fmt::format("; Patch0 also failed: {}", e.what());
            }
        }
        out.failed = true;
        out.beta.setConstant(std::numeric_limits<double>::quiet_NaN());
    });
    for (const auto& m : messages)
        if (!m.empty())
            field.diagnostics.push_back(m);
    return field;
}

StressVector evaluate_recovered_stress(const RecoveredStressField& field, int cell, const Point2& point)
{
    const CellRecovery& rec = field.cells[cell];
    const StressVector particular = field.analytic ? field.analytic(point) : rec.particular.at(point);
    return stress_modes_at(rec.basis, point) * rec.beta + particular;
}

}  // namespace vemrcp
