#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "vemrcp/geometry.hpp"
#include "vemrcp/mesh.hpp"
#include "vemrcp/mesh_generators.hpp"

using namespace vemrcp;
using oracle::Vector2d;

namespace {

PolygonalMesh unit_square() { return oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

double triangulated_area(const PolygonalMesh& mesh, int cell, int start = 0)
{
    double sum = 0.0;
    for (const auto& t : triangulate_polygon(mesh, cell, start))
        sum += oracle::shoelace({mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])});
    return sum;
}

Point2 triangulated_centroid(const PolygonalMesh& mesh, int cell)
{
    double area = 0.0;
    Point2 m = Point2::Zero();
    for (const auto& t : triangulate_polygon(mesh, cell)) {
        const double a = oracle::shoelace({mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])});
        area += a;
        m += a * (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0;
    }
    return m / area;
}

}  // namespace

TEST_CASE("polygon area and centroid")
{
    const auto sq = unit_square();
    CHECK(polygon_area(sq, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((polygon_centroid(sq, 0) - Point2(0.5, 0.5)).norm() < 1e-15);

    const auto tri = oracle::single_cell({{0, 0}, {1, 0}, {0, 1}});
    CHECK(polygon_area(tri, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK((polygon_centroid(tri, 0) - Point2(1.0 / 3, 1.0 / 3)).norm() < 1e-15);

    // concave quadrilateral scaled into the unit square
    const auto conc = oracle::single_cell({{0, 0}, {0.5, 0}, {0.25, 0.125}, {0, 0.5}});
    CHECK(polygon_area(conc, 0) == doctest::Approx(triangulated_area(conc, 0)).epsilon(1e-12));

    // L-shaped hexagon
    const auto ell = oracle::single_cell({{0, 0}, {0.5, 0}, {0.5, 0.25}, {0.25, 0.25}, {0.25, 0.5}, {0, 0.5}});
    CHECK(polygon_area(ell, 0) == doctest::Approx(3.0 / 16).epsilon(1e-14));
    CHECK((polygon_centroid(ell, 0) - triangulated_centroid(ell, 0)).norm() < 1e-14);
}

TEST_CASE("outward normals")
{
    const auto sq = unit_square();
    CHECK((edge_outward_normal(sq, 0, 0) - Point2(0, -1)).norm() < 1e-15);
    CHECK((edge_outward_normal(sq, 0, 1) - Point2(1, 0)).norm() < 1e-15);
    const auto tri = oracle::single_cell({{0, 0}, {1, 1}, {0, 1}});
    CHECK((edge_outward_normal(tri, 0, 0) - Point2(1, -1) / std::sqrt(2.0)).norm() < 1e-15);

    SUBCASE("closed boundary integral of n vanishes")
    {
        for (const auto family : generated_families()) {
            const auto mesh = generate_mesh(family, 5, 3);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                Point2 s = Point2::Zero();
                const int n = static_cast<int>(mesh.cell(c).size());
                for (int k = 0; k < n; ++k) {
                    const double len = (mesh.vertex(mesh.cell(c)[(k + 1) % n]) - mesh.vertex(mesh.cell(c)[k])).norm();
                    const Point2 nrm = edge_outward_normal(mesh, c, k);
                    CHECK(nrm.norm() == doctest::Approx(1.0).epsilon(1e-14));
                    s += len * nrm;
                }
                CHECK(s.norm() < 1e-12);
            }
        }
    }
    SUBCASE("zero-length edge is rejected")
    {
        CHECK_THROWS(outward_normal(Point2(0.2, 0.2), Point2(0.2, 0.2)));
    }
}

TEST_CASE("triangulation")
{
    const auto tri = oracle::single_cell({{0, 0}, {1, 0}, {0, 1}});
    const auto t = triangulate_polygon(tri, 0);
    REQUIRE(t.size() == 1);
    CHECK(std::set<int>{t[0][0], t[0][1], t[0][2]} == std::set<int>{0, 1, 2});

    const auto quad = oracle::single_cell({{0, 0}, {1, 0}, {1.2, 0.8}, {0.1, 1}});
    CHECK(triangulate_polygon(quad, 0).size() == 2);
    CHECK(triangulated_area(quad, 0) == doctest::Approx(polygon_area(quad, 0)).epsilon(1e-14));

    const auto hex = oracle::single_cell({{0, 0}, {1, 0}, {1, 1}, {0.5, 0.3}, {0, 1}, {-0.2, 0.5}});
    for (int start = 0; start < 6; ++start) {
        CHECK(triangulate_polygon(hex, 0, start).size() == 4);
        CHECK(triangulated_area(hex, 0, start) == doctest::Approx(polygon_area(hex, 0)).epsilon(1e-14));
    }

    SUBCASE("1000 random simple polygons")
    {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> k(3, 14);
        for (int i = 0; i < 1000; ++i) {
            const auto p = oracle::random_star_polygon(rng, k(rng));
            const auto mesh = oracle::single_cell(p);
            const double area = oracle::shoelace(p);
            REQUIRE(area > 0.0);
            const auto tris = triangulate_polygon(mesh, 0, i % static_cast<int>(p.size()));
            CHECK(tris.size() <= p.size() - 2);
            CHECK(std::abs(triangulated_area(mesh, 0, i % static_cast<int>(p.size())) - area) <= 1e-12 * area);
            CHECK(std::abs(polygon_area(mesh, 0) - area) <= 1e-12 * area);
        }
    }
    SUBCASE("self-intersecting polygon is rejected")
    {
        const std::vector<Point2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
        CHECK_FALSE(is_simple_polygon(bowtie));
    }
}

TEST_CASE("patches")
{
    const auto mesh = oracle::grid(3);
    const auto p0 = build_patch(mesh, 4, PatchKind::Patch0);
    CHECK(p0.member_cells == std::vector<int>{4});
    CHECK(p0.kind == PatchKind::Patch0);

    auto brute = [&](int c) {
        std::vector<int> out;
        for (int o = 0; o < mesh.num_cells(); ++o) {
            bool share = false;
            for (const int a : mesh.cell(o))
                for (const int b : mesh.cell(c))
                    share = share || a == b;
            if (share)
                out.push_back(o);
        }
        return out;
    };
    const auto interior = build_patch(mesh, 4, PatchKind::Patch1);
    CHECK(interior.kind == PatchKind::Patch1);
    CHECK(interior.member_cells.size() == 9);
    CHECK(interior.member_cells == brute(4));
    const auto corner = build_patch(mesh, 0, PatchKind::Patch1);
    CHECK(corner.kind == PatchKind::Patch1B);
    CHECK(corner.member_cells.size() == 4);
    CHECK(corner.member_cells == brute(0));

    SUBCASE("adjacency is symmetric on an unstructured mesh")
    {
        const auto poly = generate_mesh(MeshFamily::PolyU, 5, 9);
        std::vector<std::set<int>> members(poly.num_cells());
        for (int c = 0; c < poly.num_cells(); ++c) {
            const auto p = build_patch(poly, c, PatchKind::Patch1);
            members[c] = {p.member_cells.begin(), p.member_cells.end()};
            CHECK(members[c].count(c) == 1);
            bool touches = false;
            for (const int v : poly.cell(c))
                touches = touches || poly.is_boundary_vertex(v);
            CHECK((p.kind == PatchKind::Patch1B) == touches);
        }
        for (int a = 0; a < poly.num_cells(); ++a)
            for (const int b : members[a])
                CHECK(members[b].count(a) == 1);
    }
}

TEST_CASE("average edge length")
{
    CHECK(unit_square().average_edge_length() == doctest::Approx(1.0));
    CHECK(generate_mesh(MeshFamily::QuadS, 2).average_edge_length() == doctest::Approx(0.5).epsilon(1e-15));
    const double expected = (12 * 0.5 + 4 * std::sqrt(0.5)) / 16;
    CHECK(generate_mesh(MeshFamily::TriS, 2).average_edge_length() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("mesh validation")
{
    CHECK(validate_mesh(oracle::grid(4)).ok);

    SUBCASE("overlapping cells")
    {
        const std::vector<Point2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        const PolygonalMesh twice(v, {{0, 1, 2, 3}, {0, 1, 2, 3}});
        CHECK_FALSE(validate_mesh(twice).ok);
    }
    SUBCASE("dangling edge: a gap in the tiling")
    {
        // Two squares that touch only at a vertex of a 2x1 box region: missing cells leave
        // edges with a single incident cell inside the domain.
        const std::vector<Point2> v{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}, {0, 2}, {1, 2}, {2, 2}};
        const PolygonalMesh gap(v, {{0, 1, 4, 3}, {4, 5, 8, 7}});
        const auto r = validate_mesh(gap);
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.message.empty());
    }
    SUBCASE("clockwise cell")
    {
        const std::vector<Point2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        const PolygonalMesh cw(v, {{0, 3, 2, 1}});
        const auto r = validate_mesh(cw);
        CHECK_FALSE(r.ok);
        CHECK(r.offending_cell == 0);
    }
}

TEST_CASE("mesh text format")
{
    LoadLog log;
    const auto m = parse_mesh("pmesh 1\n# unit square\n4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n", &log);
    CHECK(m.num_cells() == 1);
    CHECK(polygon_area(m, 0) == doctest::Approx(1.0));
    CHECK(log.warnings.empty());
    for (int v = 0; v < 4; ++v)
        CHECK(m.is_boundary_vertex(v));

    LoadLog cw_log;
    const auto cw = parse_mesh("pmesh 1\n4 1\n0 0\n1 0\n1 1\n0 1\n4 0 3 2 1\n", &cw_log);
    CHECK(polygon_area(cw, 0) == doctest::Approx(1.0));
    CHECK(cw_log.warnings.size() == 1);

    try {
        parse_mesh("pmesh 1\n4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 7\n");
        FAIL("expected a parse error");
    } catch (const MeshParseError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_mesh("pmesh 2\n"), MeshParseError);
    CHECK_THROWS_AS(parse_mesh("pmesh 1\n4 1\n0 0\n1 0\n"), MeshParseError);

    SUBCASE("round trip through a file")
    {
        const auto mesh = generate_mesh(MeshFamily::ConcU, 4, 5);
        const auto path = std::filesystem::temp_directory_path() / "vemrcp_roundtrip.pmesh";
        save_mesh(mesh, path);
        const auto back = load_mesh(path);
        std::filesystem::remove(path);
        REQUIRE(back.num_vertices() == mesh.num_vertices());
        CHECK(back.cells() == mesh.cells());
        for (int v = 0; v < mesh.num_vertices(); ++v)
            CHECK(back.vertex(v) == mesh.vertex(v));
    }
    SUBCASE("file that tiles incorrectly fails validation")
    {
        CHECK_THROWS_AS(parse_mesh("pmesh 1\n4 2\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n4 0 1 2 3\n"), MeshError);
    }
}
