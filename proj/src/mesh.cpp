#include "vemrcp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

namespace vemrcp {

namespace {

constexpr std::array<std::pair<MeshFamily, std::string_view>, 9> kFamilyNames{{
    {MeshFamily::TriS, "tri-s"},
    {MeshFamily::QuadS, "quad-s"},
    {MeshFamily::HexS, "hex-s"},
    {MeshFamily::ConcS, "conc-s"},
    {MeshFamily::TriU, "tri-u"},
    {MeshFamily::QuadU, "quad-u"},
    {MeshFamily::PolyU, "poly-u"},
    {MeshFamily::ConcU, "conc-u"},
    {MeshFamily::External, "external"},
}};

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

}  // namespace

std::string_view family_name(MeshFamily family)
{
    for (const auto& [f, name] : kFamilyNames)
        if (f == family)
            return name;
    return "unknown";
}

std::optional<MeshFamily> parse_family(std::string_view name)
{
    for (const auto& [f, n] : kFamilyNames)
        if (n == name)
            return f;
    return std::nullopt;
}

const std::vector<MeshFamily>& generated_families()
{
    static const std::vector<MeshFamily> families{MeshFamily::TriS, MeshFamily::QuadS, MeshFamily::HexS,
                                                  MeshFamily::ConcS, MeshFamily::TriU, MeshFamily::QuadU,
                                                  MeshFamily::PolyU, MeshFamily::ConcU};
    return families;
}

PolygonalMesh::PolygonalMesh(std::vector<Point2> vertices, std::vector<std::vector<int>> cells, MeshFamily family)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), family_(family)
{
    const int nv = num_vertices();
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (cells_[c].size() < 3)
            throw MeshError(fmt::format("cell {} has fewer than 3 vertices", c));
        for (const int v : cells_[c])
            if (v < 0 || v >= nv)
                throw MeshError(fmt::format("cell {} references vertex {} out of range [0, {})", c, v, nv));
    }

    std::unordered_map<std::uint64_t, int> edge_index;
    edge_index.reserve(cells_.size() * 4);
    cell_edges_.resize(cells_.size());
    vertex_cells_.assign(nv, {});
    for (int c = 0; c < num_cells(); ++c) {
        const auto& cyc = cells_[c];
        const int n = static_cast<int>(cyc.size());
        cell_edges_[c].resize(n);
        for (int k = 0; k < n; ++k) {
            const int a = cyc[k];
            const int b = cyc[(k + 1) % n];
            auto [it, inserted] = edge_index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
            if (inserted)
                edges_.push_back(MeshEdge{std::min(a, b), std::max(a, b), {-1, -1}, 0});
            MeshEdge& e = edges_[it->second];
            if (e.incidence < 2)
                e.cells[e.incidence] = c;
            ++e.incidence;
            cell_edges_[c][k] = it->second;
            auto& vc = vertex_cells_[a];
            if (vc.empty() || vc.back() != c)
                vc.push_back(c);
        }
    }
    for (auto& vc : vertex_cells_) {
        std::sort(vc.begin(), vc.end());
        vc.erase(std::unique(vc.begin(), vc.end()), vc.end());
    }

    boundary_flags_.assign(nv, 0);
    double total = 0.0;
    for (const auto& e : edges_) {
        if (e.is_boundary()) {
            boundary_flags_[e.v0] = 1;
            boundary_flags_[e.v1] = 1;
        }
        total += (vertices_[e.v1] - vertices_[e.v0]).norm();
    }
    average_edge_length_ = edges_.empty() ? 0.0 : total / static_cast<double>(edges_.size());
}

std::vector<Point2> PolygonalMesh::cell_points(int c) const
{
    std::vector<Point2> pts;
    pts.reserve(cells_[c].size());
    for (const int v : cells_[c])
        pts.push_back(vertices_[v]);
    return pts;
}

int PolygonalMesh::edge_neighbor(int c, int k) const
{
    const MeshEdge& e = edges_[cell_edges_[c][k]];
    if (e.incidence != 2)
        return -1;
    return e.cells[0] == c ? e.cells[1] : e.cells[0];
}

PolygonalMesh PolygonalMesh::translated(const Point2& offset) const
{
    std::vector<Point2> moved = vertices_;
    for (auto& p : moved)
        p += offset;
    return PolygonalMesh(std::move(moved), cells_, family_);
}

double polygon_area(const PolygonalMesh& mesh, int cell)
{
    return signed_area(mesh.cell_points(cell));
}

Point2 polygon_centroid(const PolygonalMesh& mesh, int cell)
{
    return area_centroid(mesh.cell_points(cell));
}

Point2 edge_outward_normal(const PolygonalMesh& mesh, int cell, int edge)
{
    const auto& cyc = mesh.cell(cell);
    const int n = static_cast<int>(cyc.size());
    return outward_normal(mesh.vertex(cyc[edge]), mesh.vertex(cyc[(edge + 1) % n]));
}

std::vector<std::array<int, 3>> triangulate_polygon(const PolygonalMesh& mesh, int cell, int start)
{
    const auto pts = mesh.cell_points(cell);
    if (!is_simple_polygon(pts))
        throw GeometryError(fmt::format("cell {} is not a simple polygon", cell));
    auto local = ear_clip(pts, start);
    const auto& cyc = mesh.cell(cell);
    for (auto& tri : local)
        for (auto& v : tri)
            v = cyc[v];
    return local;
}

double average_edge_length(const PolygonalMesh& mesh)
{
    return mesh.average_edge_length();
}

double polygon_diameter(const PolygonalMesh& mesh, int cell)
{
    const auto& cyc = mesh.cell(cell);
    double d = 0.0;
    for (std::size_t i = 0; i < cyc.size(); ++i)
        for (std::size_t j = i + 1; j < cyc.size(); ++j)
            d = std::max(d, (mesh.vertex(cyc[i]) - mesh.vertex(cyc[j])).norm());
    return d;
}

ElementPatch build_patch(const PolygonalMesh& mesh, int cell, PatchKind kind)
{
    ElementPatch patch;
    patch.central_cell = cell;
    if (kind == PatchKind::Patch0) {
        patch.member_cells = {cell};
        patch.kind = PatchKind::Patch0;
        return patch;
    }
    bool touches_boundary = false;
    for (const int v : mesh.cell(cell)) {
        touches_boundary = touches_boundary || mesh.is_boundary_vertex(v);
        const auto& vc = mesh.vertex_cells(v);
        patch.member_cells.insert(patch.member_cells.end(), vc.begin(), vc.end());
    }
    std::sort(patch.member_cells.begin(), patch.member_cells.end());
    patch.member_cells.erase(std::unique(patch.member_cells.begin(), patch.member_cells.end()),
                             patch.member_cells.end());
    patch.kind = touches_boundary ? PatchKind::Patch1B : PatchKind::Patch1;
    return patch;
}

ValidationReport validate_mesh(const PolygonalMesh& mesh)
{
    auto fail = [](std::string msg, int cell = -1) { return ValidationReport{false, std::move(msg), cell}; };

    if (mesh.num_cells() == 0)
        return fail("mesh has no cells");
    for (const auto& p : mesh.vertices())
        if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
            return fail("non-finite vertex coordinate");

    Eigen::AlignedBox2d box;
    for (const auto& p : mesh.vertices())
        box.extend(p);
    const double extent = box.diagonal().norm();

    double area_sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        auto cyc = mesh.cell(c);
        std::sort(cyc.begin(), cyc.end());
        if (std::adjacent_find(cyc.begin(), cyc.end()) != cyc.end())
            return fail(fmt::format("cell {} repeats a vertex", c), c);
        const auto pts = mesh.cell_points(c);
        if (!is_simple_polygon(pts))
            return fail(fmt::format("cell {} is not a simple polygon", c), c);
        const double a = signed_area(pts);
        if (!(a > 0.0))
            return fail(fmt::format("cell {} has non-positive signed area {}", c, a), c);
        area_sum += a;
    }

    // Each interior edge must be traversed once in each direction.
    std::map<std::pair<int, int>, int> directed;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& cyc = mesh.cell(c);
        const std::size_t n = cyc.size();
        for (std::size_t k = 0; k < n; ++k)
            if (++directed[{cyc[k], cyc[(k + 1) % n]}] > 1)
                return fail(fmt::format("cell {} repeats a directed edge ({}, {})", c, cyc[k], cyc[(k + 1) % n]), c);
    }

    const double border_tol = 1e-12 * std::max(extent, 1.0);
    auto on_border = [&](const Point2& p) {
        return std::abs(p.x() - box.min().x()) <= border_tol || std::abs(p.x() - box.max().x()) <= border_tol
            || std::abs(p.y() - box.min().y()) <= border_tol || std::abs(p.y() - box.max().y()) <= border_tol;
    };
    for (const auto& e : mesh.edges()) {
        if (e.incidence > 2)
            return fail(fmt::format("edge ({}, {}) is shared by {} cells", e.v0, e.v1, e.incidence), e.cells[0]);
        if (e.incidence == 1) {
            const Point2& a = mesh.vertex(e.v0);
            const Point2& b = mesh.vertex(e.v1);
            const bool same_side = (std::abs(a.x() - b.x()) <= border_tol && on_border(a) && on_border(b)
                                    && (std::abs(a.x() - box.min().x()) <= border_tol
                                        || std::abs(a.x() - box.max().x()) <= border_tol))
                || (std::abs(a.y() - b.y()) <= border_tol && on_border(a) && on_border(b)
                    && (std::abs(a.y() - box.min().y()) <= border_tol
                        || std::abs(a.y() - box.max().y()) <= border_tol));
            if (!same_side)
                return fail(fmt::format("dangling edge ({}, {}) of cell {} is not on the domain border", e.v0, e.v1,
                                        e.cells[0]),
                            e.cells[0]);
        } else {
            if (directed.count({e.v0, e.v1}) != 1 || directed.count({e.v1, e.v0}) != 1)
                return fail(fmt::format("interior edge ({}, {}) is not traversed in opposite directions", e.v0, e.v1),
                            e.cells[0]);
        }
    }

    const double domain_area = box.volume();
    if (std::abs(area_sum - domain_area) > 1e-10 * domain_area)
        return fail(fmt::format("cell areas sum to {:.15g}, domain area is {:.15g}", area_sum, domain_area));

    std::vector<std::uint8_t> used(mesh.num_vertices(), 0);
    for (const auto& cyc : mesh.cells())
        for (const int v : cyc)
            used[v] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end())
        return fail("mesh has vertices not used by any cell");

    const long euler = static_cast<long>(mesh.num_vertices()) - mesh.num_edges() + mesh.num_cells();
    if (euler != 1)
        return fail(fmt::format("Euler characteristic V - E + F = {} (expected 1)", euler));

    return {};
}

}  // namespace vemrcp
