#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vemrcp/geometry.hpp"

namespace vemrcp {

enum class MeshFamily { TriS, QuadS, HexS, ConcS, TriU, QuadU, PolyU, ConcU, External };

/// Canonical CLI spelling, e.g. "hex-s".
std::string_view family_name(MeshFamily family);
std::optional<MeshFamily> parse_family(std::string_view name);
/// The eight generated families, structured first.
const std::vector<MeshFamily>& generated_families();

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A unique undirected edge with its (one or two) incident cells.
struct MeshEdge {
    int v0 = -1;
    int v1 = -1;
    std::array<int, 2> cells{-1, -1};
    int incidence = 0;  // number of cell sides on this edge; 2 for interior edges
    bool is_boundary() const { return incidence == 1; }
};

/// Conforming polygonal mesh. Immutable after construction; topology
/// (unique edges, boundary flags, vertex-to-cell incidence) is derived from
/// the cells, never taken from input.
class PolygonalMesh {
public:
    PolygonalMesh() = default;
    PolygonalMesh(std::vector<Point2> vertices, std::vector<std::vector<int>> cells,
                  MeshFamily family = MeshFamily::External);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Point2>& vertices() const { return vertices_; }
    const Point2& vertex(int v) const { return vertices_[v]; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    const std::vector<int>& cell(int c) const { return cells_[c]; }
    std::vector<Point2> cell_points(int c) const;

    const std::vector<MeshEdge>& edges() const { return edges_; }
    /// Global edge index of local edge k (vertex k -> k+1) of cell c.
    int cell_edge(int c, int k) const { return cell_edges_[c][k]; }
    /// Cell across local edge k of cell c, or -1 on the boundary.
    int edge_neighbor(int c, int k) const;

    bool is_boundary_vertex(int v) const { return boundary_flags_[v] != 0; }
    const std::vector<std::uint8_t>& boundary_vertex_flags() const { return boundary_flags_; }
    const std::vector<int>& vertex_cells(int v) const { return vertex_cells_[v]; }

    MeshFamily family() const { return family_; }
    double average_edge_length() const { return average_edge_length_; }

    /// Copy with every vertex shifted by `offset`.
    PolygonalMesh translated(const Point2& offset) const;

private:
    std::vector<Point2> vertices_;
    std::vector<std::vector<int>> cells_;
    MeshFamily family_ = MeshFamily::External;

    std::vector<MeshEdge> edges_;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<std::uint8_t> boundary_flags_;
    std::vector<std::vector<int>> vertex_cells_;
    double average_edge_length_ = 0.0;
};

double polygon_area(const PolygonalMesh& mesh, int cell);
Point2 polygon_centroid(const PolygonalMesh& mesh, int cell);
/// Outward unit normal of local edge `edge` (vertex edge -> edge+1) of `cell`.
Point2 edge_outward_normal(const PolygonalMesh& mesh, int cell, int edge);
/// Ear-clipping triangulation with global vertex indices.
std::vector<std::array<int, 3>> triangulate_polygon(const PolygonalMesh& mesh, int cell, int start = 0);
double average_edge_length(const PolygonalMesh& mesh);
/// Largest distance between any two vertices of the cell.
double polygon_diameter(const PolygonalMesh& mesh, int cell);

enum class PatchKind { Patch0, Patch1, Patch1B };

struct ElementPatch {
    int central_cell = -1;
    std::vector<int> member_cells;  // sorted, includes central_cell
    PatchKind kind = PatchKind::Patch0;
};

/// Patch1 requests are promoted to Patch1B when the central cell touches the
/// boundary; Patch1B requests on interior cells are demoted to Patch1.
ElementPatch build_patch(const PolygonalMesh& mesh, int cell, PatchKind kind);

struct ValidationReport {
    bool ok = true;
    std::string message;
    int offending_cell = -1;
};

/// Checks the mesh invariants against the rectangle spanned by the vertices:
/// simple counterclockwise cells, area tiling, edge multiplicities, boundary
/// edges on the rectangle border, and the Euler characteristic.
ValidationReport validate_mesh(const PolygonalMesh& mesh);

class MeshParseError : public MeshError {
public:
    MeshParseError(const std::string& what, int line) : MeshError(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Diagnostics produced while loading (e.g. orientation fixes).
struct LoadLog {
    std::vector<std::string> warnings;
};

PolygonalMesh load_mesh(const std::filesystem::path& path, LoadLog* log = nullptr);
PolygonalMesh parse_mesh(std::string_view text, LoadLog* log = nullptr);
void save_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const PolygonalMesh& mesh);

}  // namespace vemrcp
