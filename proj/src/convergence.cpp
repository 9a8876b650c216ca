#include "vemrcp/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "vemrcp/mesh_generators.hpp"
#include "vemrcp/parallel.hpp"

namespace vemrcp {

std::string_view method_name(RecoveryMethod method)
{
    switch (method) {
    case RecoveryMethod::VEM: return "vem";
    case RecoveryMethod::RCP0: return "rcp0";
    case RecoveryMethod::RCP1: return "rcp1";
    }
    return "?";
}

std::optional<RecoveryMethod> parse_method(std::string_view name)
{
    for (const auto m : kAllMethods)
        if (method_name(m) == name)
            return m;
    return std::nullopt;
}

double energy_error_norm(const PolygonalMesh& mesh, const LameMaterial& material, const StressFunction& exact,
                         const StressProvider& approx, int triangulation_start)
{
    const Eigen::Matrix3d S = compliance_matrix(material);
    std::vector<double> per_cell(mesh.num_cells(), 0.0);
    parallel_for(per_cell.size(), [&](std::size_t c) {
        const int cell = static_cast<int>(c);
        double sum = 0.0;
        for (const auto& q : cell_quadrature(mesh, cell, triangulation_start)) {
            const StressVector e = exact(q.point) - approx(cell, q.point);
            sum += q.weight * e.dot(S * e);
        }
        per_cell[c] = sum;
    });
    double total = 0.0;
    for (const double v : per_cell)
        total += v;
    return total;
}

double energy_error_norm(const PolygonalMesh& mesh, const ManufacturedCase& mc, const StressProvider& approx)
{
    return energy_error_norm(mesh, mc.material, mc.stress, approx);
}

LevelSolution solve_level(const PolygonalMesh& mesh, const ManufacturedCase& mc,
                          const std::vector<RecoveryMethod>& methods)
{
    LevelSolution out;
    out.vem = solve_elasticity(mesh, mc.material, mc.body_force, mc.displacement);
    out.vem_stress = vem_stresses(mesh, mc.material, out.vem);
    auto wants = [&](RecoveryMethod m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
    if (wants(RecoveryMethod::RCP0))
        out.rcp0 = recover_field(mesh, mc.material, out.vem.displacement, mc.body_force, RecoveryKind::RCP0);
    if (wants(RecoveryMethod::RCP1))
        out.rcp1 = recover_field(mesh, mc.material, out.vem.displacement, mc.body_force, RecoveryKind::RCP1);
    return out;
}

StressProvider stress_provider(const LevelSolution& level, RecoveryMethod method)
{
    switch (method) {
    case RecoveryMethod::VEM:
        return [&level](int cell, const Point2&) { return level.vem_stress[cell]; };
    case RecoveryMethod::RCP0:
        if (!level.rcp0)
            throw std::logic_error("RCP0 was not computed for this level");
        return [&level](int cell, const Point2& p) { return evaluate_recovered_stress(*level.rcp0, cell, p); };
    case RecoveryMethod::RCP1:
        if (!level.rcp1)
            throw std::logic_error("RCP1 was not computed for this level");
        return [&level](int cell, const Point2& p) { return evaluate_recovered_stress(*level.rcp1, cell, p); };
    }
    throw std::logic_error("unknown recovery method");
}

std::vector<ConvergenceRecord> run_convergence_study(const StudyOptions& options)
{
    const ManufacturedCase mc = manufactured_case(options.test, options.material);
    std::vector<ConvergenceRecord> records;
    const bool external = options.family == MeshFamily::External;
    const std::vector<int> levels = external ? std::vector<int>{0} : options.subdivisions;
    for (const int n : levels) {
        ConvergenceRecord rec;
        rec.test = options.test;
        rec.family = options.family;
        rec.level = n;
        const auto start = std::chrono::steady_clock::now();
        try {
            if (external && !options.external_mesh)
                throw MeshError("external family requested without a mesh");
            const PolygonalMesh mesh = external ? *options.external_mesh : generate_mesh(options.family, n, options.seed);
            rec.h_e = mesh.average_edge_length();
            rec.dofs = 2 * mesh.num_vertices();
            const LevelSolution level = solve_level(mesh, mc, options.methods);
            for (const auto m : options.methods)
                rec.error[static_cast<std::size_t>(m)] = energy_error_norm(mesh, mc, stress_provider(level, m));
            if (level.rcp1)
                rec.rcp1_fallbacks = level.rcp1->fallback_count();
            for (const auto* field : {level.rcp0 ? &*level.rcp0 : nullptr, level.rcp1 ? &*level.rcp1 : nullptr})
                if (field && field->failure_count() > 0)
                    rec.failure = fmt::format("{} cells could not be recovered: {}", field->failure_count(),
                                              field->diagnostics.front());
        } catch (const std::exception& e) {
            rec.failure = e.what();
        }
        rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records.push_back(std::move(rec));
    }
    return records;
}

PatchTestResult run_patch_test(const PolygonalMesh& mesh, const LameMaterial& material)
{
    const ManufacturedCase mc = linear_case(material, kPatchTestCoefficients);
    const LevelSolution level = solve_level(mesh, mc, {kAllMethods.begin(), kAllMethods.end()});
    PatchTestResult out;
    double scale = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        scale = std::max(scale, mc.displacement(mesh.vertex(v)).norm());
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (!mesh.is_boundary_vertex(v)) {
            const Eigen::Vector2d e = level.vem.displacement.segment<2>(2 * v) - mc.displacement(mesh.vertex(v));
            out.displacement_error = std::max(out.displacement_error, e.norm() / scale);
        }
    for (const auto m : kAllMethods)
        out.error[static_cast<std::size_t>(m)] = energy_error_norm(mesh, mc, stress_provider(level, m));
    return out;
}

RateEstimate observed_rate(const std::vector<ConvergenceRecord>& records, RecoveryMethod method)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records) {
        const double e = r.error_of(method);
        if (std::isfinite(e) && e > 0.0 && r.h_e > 0.0)
            pts.emplace_back(std::log(r.h_e), std::log(e));
    }
    RateEstimate est;
    est.points = static_cast<int>(pts.size());
    if (pts.size() < 2)
        return est;
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    est.slope = sxy / sxx;

    auto sorted = pts;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (!(sorted[i].second < sorted[i - 1].second))
            est.monotone = false;
    return est;
}

}  // namespace vemrcp
