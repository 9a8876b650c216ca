#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "vemrcp/mesh_generators.hpp"
#include "vemrcp/parallel.hpp"
#include "vemrcp/quadrature.hpp"

using namespace vemrcp;

TEST_CASE("triangle rule is exact to degree 5")
{
    // Reference triangle: integral of x^i y^j = i! j! / (i + j + 2)!
    auto fact = [](int n) {
        double f = 1;
        for (int k = 2; k <= n; ++k)
            f *= k;
        return f;
    };
    const auto rule = triangle_quadrature({0, 0}, {1, 0}, {0, 1});
    CHECK(rule.size() == 7);
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; i + j <= 5; ++j) {
            const double exact = fact(i) * fact(j) / fact(i + j + 2);
            const double q = integrate(rule, [&](const Point2& p) { return std::pow(p.x(), i) * std::pow(p.y(), j); });
            CHECK(std::abs(q - exact) <= 1e-13 * std::max(exact, 1e-3));
        }
    // degree 6 is not exact
    const double q6 = integrate(rule, [](const Point2& p) { return std::pow(p.x(), 6); });
    CHECK(std::abs(q6 - fact(6) / fact(8)) > 1e-8);
}

TEST_CASE("polygon quadrature")
{
    const auto sq = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(polygon_quadrature(sq, 0, [](const Point2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(polygon_quadrature(sq, 0, [](const Point2& p) { return p.x() * p.x() * p.y() * p.y(); }) ==
          doctest::Approx(1.0 / 9).epsilon(1e-12));

    auto sinsin = [](const Point2& p) { return std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()); };
    const double exact = 4.0 / (M_PI * M_PI);
    CHECK(std::abs(polygon_quadrature(sq, 0, sinsin) - exact) < 0.05);
    const auto fine = generate_mesh(MeshFamily::QuadS, 8);
    double sum = 0.0;
    for (int c = 0; c < fine.num_cells(); ++c)
        sum += polygon_quadrature(fine, c, sinsin);
    CHECK(std::abs(sum - exact) < 1e-6);

    SUBCASE("weights sum to the area on every family")
    {
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 4, 1);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                double w = 0.0;
                for (const auto& q : cell_quadrature(mesh, c))
                    w += q.weight;
                CHECK(std::abs(w - polygon_area(mesh, c)) <= 1e-13);
            }
        }
    }
    SUBCASE("vector integrands")
    {
        const Eigen::Vector3d v =
            integrate(cell_quadrature(sq, 0), [](const Point2& p) { return Eigen::Vector3d(1.0, p.x(), p.y() * p.y()); });
        CHECK((v - Eigen::Vector3d(1.0, 0.5, 1.0 / 3)).norm() < 1e-14);
    }
}

TEST_CASE("parallel_for")
{
    std::vector<int> out(1000, 0);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == static_cast<int>(i * i % 97));
    parallel_for(0, [](std::size_t) { FAIL("no calls expected"); });
    CHECK(worker_count() >= 1);

    CHECK_THROWS_WITH_AS(parallel_for(100,
                                      [](std::size_t i) {
                                          if (i == 10)
                                              throw std::runtime_error("boom 10");
                                      }),
                         "boom 10", std::runtime_error);

    setenv("VEMRCP_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    std::atomic<int> calls{0};
    parallel_for(50, [&](std::size_t) { ++calls; });
    CHECK(calls == 50);
    unsetenv("VEMRCP_THREADS");
}
