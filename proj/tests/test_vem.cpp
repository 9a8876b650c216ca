#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vemrcp/manufactured.hpp"
#include "vemrcp/mesh_generators.hpp"
#include "vemrcp/quadrature.hpp"
#include "vemrcp/vem.hpp"

using namespace vemrcp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd sample(const PolygonalMesh& mesh, int cell, const std::function<Eigen::Vector2d(const Point2&)>& u)
{
    const auto& cyc = mesh.cell(cell);
    VectorXd d(2 * cyc.size());
    for (std::size_t k = 0; k < cyc.size(); ++k)
        d.segment<2>(2 * k) = u(mesh.vertex(cyc[k]));
    return d;
}

int rank_of(const MatrixXd& M)
{
    const Eigen::JacobiSVD<MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        r += s[i] > 1e-10 * s[0];
    return r;
}

const PolygonalMesh& hexagon()
{
    static const PolygonalMesh m = oracle::single_cell(
        {{0.1, 0.0}, {0.6, 0.05}, {0.9, 0.4}, {0.7, 0.9}, {0.25, 0.8}, {0.0, 0.45}});
    return m;
}

const std::vector<std::function<Eigen::Vector2d(const Point2&)>> kRigid{
    [](const Point2&) { return Eigen::Vector2d(1, 0); },
    [](const Point2&) { return Eigen::Vector2d(0, 1); },
    [](const Point2& p) { return Eigen::Vector2d(-p.y(), p.x()); },
};

}  // namespace

TEST_CASE("G, B and the projector")
{
    const auto sq = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK((compute_G(sq, 0) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
    const auto tri = oracle::single_cell({{0, 0}, {1, 0}, {0, 1}});
    CHECK((compute_G(tri, 0) - 0.5 * Eigen::Matrix3d::Identity()).norm() < 1e-15);

    const MatrixXd B = compute_B(sq, 0);
    CHECK((B * sample(sq, 0, [](const Point2& p) { return Eigen::Vector2d(p.x(), 0); }) - Eigen::Vector3d(1, 0, 0))
              .norm() < 1e-15);
    for (const auto& r : kRigid)
        CHECK((B * sample(sq, 0, r)).norm() < 1e-15);

    SUBCASE("G matches quadrature of the identity")
    {
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 3, 4);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                const Eigen::Matrix3d Gq =
                    integrate(cell_quadrature(mesh, c), [](const Point2&) { return Eigen::Matrix3d::Identity().eval(); });
                CHECK((compute_G(mesh, c) - Gq).norm() < 1e-13);
            }
        }
    }
    SUBCASE("projector consistency on linear fields")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(-1, 1);
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 3, 2);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                const auto G = compute_G(mesh, c);
                const MatrixXd Bc = compute_B(mesh, c);
                const MatrixXd Pi = compute_Pi_m(G, Bc);
                CHECK((G * Pi - Bc).norm() <= 1e-12 * Bc.norm());
                CHECK((Pi - Bc / polygon_area(mesh, c)).norm() <= 1e-12 * Pi.norm());
                const double a = U(rng), b = U(rng), cc = U(rng), d = U(rng), e = U(rng), f = U(rng);
                const VectorXd v = sample(mesh, c, [&](const Point2& p) {
                    return Eigen::Vector2d(a + b * p.x() + cc * p.y(), d + e * p.x() + f * p.y());
                });
                CHECK((Pi * v - Eigen::Vector3d(b, f, cc + e)).norm() < 1e-12);
                for (const auto& r : kRigid)
                    CHECK((Pi * sample(mesh, c, r)).norm() < 1e-12);
            }
        }
    }
    SUBCASE("degenerate cell")
    {
        CHECK_THROWS_AS(compute_Pi_m(Eigen::Matrix3d::Zero(), MatrixXd::Zero(3, 6)), VemError);
    }
}

TEST_CASE("element stiffness")
{
    const LameMaterial mat{1, 1};
    const auto sq = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto op = element_operators(sq, 0, mat);
    const VectorXd ux = sample(sq, 0, [](const Point2& p) { return Eigen::Vector2d(p.x(), 0); });
    CHECK(ux.dot(op.Kc * ux) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK((op.Ks * ux).norm() < 1e-12);
    CHECK((element_stress_vem(op.Pi_m, elastic_matrix(mat), ux) - Eigen::Vector3d(3, 1, 0)).norm() < 1e-14);
    for (const auto& r : kRigid)
        CHECK(element_stress_vem(op.Pi_m, elastic_matrix(mat), sample(sq, 0, r)).norm() < 1e-14);

    const auto hop = element_operators(hexagon(), 0, mat);
    CHECK(rank_of(hop.Kc) == 3);
    CHECK(rank_of(hop.K) == 9);
    CHECK((hop.K - hop.K.transpose()).norm() <= 1e-13 * hop.K.norm());
    for (const auto& r : kRigid) {
        CHECK((hop.Kc * sample(hexagon(), 0, r)).norm() < 1e-12);
        CHECK((hop.K * sample(hexagon(), 0, r)).norm() < 1e-12);
    }

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 20; ++i) {
        const double a = U(rng), b = U(rng), c = U(rng), d = U(rng), e = U(rng), f = U(rng);
        const VectorXd v = sample(hexagon(), 0, [&](const Point2& p) {
            return Eigen::Vector2d(a + b * p.x() + c * p.y(), d + e * p.x() + f * p.y());
        });
        CHECK((hop.Ks * v).norm() < 1e-12);
    }

    const auto tri = oracle::single_cell({{0.1, 0.2}, {0.9, 0.3}, {0.4, 0.8}});
    CHECK(element_operators(tri, 0, mat).Ks.norm() < 1e-12);

    SUBCASE("rank on every family")
    {
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 3, 6);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                const auto o = element_operators(mesh, c, {2, 0.5});
                CHECK(rank_of(o.Kc) == 3);
                CHECK(rank_of(o.K) == 2 * o.n - 3);
            }
        }
    }
}

TEST_CASE("element load vector")
{
    const auto sq = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(element_load_vector(sq, 0, {}).norm() == 0.0);
    CHECK(element_load_vector(sq, 0, [](const Point2&) { return Eigen::Vector2d(0, 0); }).norm() == 0.0);
    const VectorXd f = element_load_vector(sq, 0, [](const Point2&) { return Eigen::Vector2d(1, 0); });
    CHECK((f - (VectorXd(8) << 0.25, 0, 0.25, 0, 0.25, 0, 0.25, 0).finished()).norm() < 1e-15);

    const auto b = [](const Point2& p) { return Eigen::Vector2d(std::sin(p.x()), p.y() * p.y()); };
    const VectorXd fh = element_load_vector(hexagon(), 0, b);
    Eigen::Vector2d total(0, 0);
    for (int k = 0; k < 6; ++k)
        total += fh.segment<2>(2 * k);
    CHECK((total - polygon_area(hexagon(), 0) * b(polygon_centroid(hexagon(), 0))).norm() < 1e-14);
}

TEST_CASE("assembly and Dirichlet elimination")
{
    const LameMaterial mat{1, 1};
    const auto one = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto sys1 = assemble_global(one, mat, {});
    CHECK((MatrixXd(sys1.K) - element_operators(one, 0, mat).K).norm() < 1e-14);

    const auto mesh = generate_mesh(MeshFamily::ConcU, 3, 1);
    const auto sys = assemble_global(mesh, mat, {});
    const MatrixXd K(sys.K);
    CHECK((K - K.transpose()).norm() <= 1e-13 * K.norm());
    for (const auto& r : kRigid) {
        VectorXd v(2 * mesh.num_vertices());
        for (int i = 0; i < mesh.num_vertices(); ++i)
            v.segment<2>(2 * i) = r(mesh.vertex(i));
        CHECK((K * v).norm() < 1e-11);
    }

    SUBCASE("zero boundary values keep the free right-hand side")
    {
        const auto loaded = assemble_global(mesh, mat, [](const Point2& p) { return Eigen::Vector2d(p.x(), 1.0); });
        const auto cs = apply_dirichlet(mesh, loaded, boundary_values_from(mesh, [](const Point2&) {
                                            return Eigen::Vector2d::Zero();
                                        }));
        for (std::size_t i = 0; i < cs.free_dofs.size(); ++i)
            CHECK(cs.rhs[static_cast<Eigen::Index>(i)] == loaded.f[cs.free_dofs[i]]);
        const MatrixXd Kf(cs.K_free);
        CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(Kf).eigenvalues().minCoeff() > 0.0);
    }
    SUBCASE("fully constrained single cell")
    {
        const auto u = [](const Point2& p) { return Eigen::Vector2d(p.x() * p.y(), 2.0); };
        const auto cs = apply_dirichlet(one, sys1, boundary_values_from(one, u));
        CHECK(cs.free_dofs.empty());
        const VectorXd sol = solve_system(cs);
        for (int v = 0; v < 4; ++v)
            CHECK((sol.segment<2>(2 * v) - u(one.vertex(v))).norm() == 0.0);
    }
    SUBCASE("zero data gives zero")
    {
        const auto s = solve_elasticity(mesh, mat, {}, [](const Point2&) { return Eigen::Vector2d::Zero(); });
        CHECK(s.displacement.norm() == 0.0);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(apply_dirichlet(mesh, sys, {}), VemError);
        auto partial = boundary_values_from(mesh, [](const Point2&) { return Eigen::Vector2d::Zero(); });
        partial.erase(partial.begin());
        CHECK_THROWS_AS(apply_dirichlet(mesh, sys, partial), VemError);
    }
}

TEST_CASE("patch test on every family")
{
    for (const LameMaterial mat : {LameMaterial{1, 1}, LameMaterial{10, 0.3}}) {
        const auto lin = linear_case(mat);
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 6, 8);
            const auto sol = solve_elasticity(mesh, mat, lin.body_force, lin.displacement);
            for (int v = 0; v < mesh.num_vertices(); ++v)
                CHECK((sol.displacement.segment<2>(2 * v) - lin.displacement(mesh.vertex(v))).norm() < 1e-10);
            const auto stress = vem_stresses(mesh, mat, sol);
            for (int c = 0; c < mesh.num_cells(); ++c)
                CHECK((stress[c] - lin.stress(mesh.vertex(0))).norm() < 1e-9);

            // stabilization scaling has no effect on the linear solution
            for (const double scale : {0.1, 10.0}) {
                const auto scaled = solve_elasticity(mesh, mat, lin.body_force, lin.displacement, {scale});
                CHECK((scaled.displacement - sol.displacement).norm() <= 1e-10 * sol.displacement.norm());
            }
        }
    }
}

TEST_CASE("triangle meshes reproduce constant-strain finite elements")
{
    const LameMaterial mat{1.7, 0.6};
    for (const auto family : {MeshFamily::TriS, MeshFamily::TriU})
        for (const auto id : {TestId::A, TestId::B, TestId::C}) {
            const auto mesh = generate_mesh(family, 8, 3);
            const auto mc = manufactured_case(id, mat);
            const auto vem = solve_elasticity(mesh, mat, mc.body_force, mc.displacement);
            const auto cst = oracle::cst_solve(mesh, mat, mc.body_force, mc.displacement);
            const MatrixXd K(vem.system.K);
            CHECK((K - cst.K).norm() <= 1e-10 * cst.K.norm());
            CHECK((vem.displacement - cst.u).norm() <= 1e-10 * cst.u.norm());
            const auto stress = vem_stresses(mesh, mat, vem);
            double diff = 0.0, ref = 0.0;
            for (int c = 0; c < mesh.num_cells(); ++c) {
                diff = std::max(diff, (stress[c] - cst.stress[c]).norm());
                ref = std::max(ref, cst.stress[c].norm());
            }
            CHECK(diff <= 1e-10 * ref);
        }
}
