#include "vemrcp/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

namespace vemrcp {

namespace {

/// Collects polygons, merging coincident vertices within a tolerance.
class MeshBuilder {
public:
    explicit MeshBuilder(double tol) : tol_(tol), bucket_(4.0 * tol) {}

    int vertex_id(Point2 p)
    {
        snap(p);
        const long long kx = std::llround(p.x() / bucket_);
        const long long ky = std::llround(p.y() / bucket_);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = buckets_.find(key(kx + dx, ky + dy));
                if (it == buckets_.end())
                    continue;
                for (const int id : it->second)
                    if ((vertices_[id] - p).norm() <= tol_)
                        return id;
            }
        const int id = static_cast<int>(vertices_.size());
        vertices_.push_back(p);
        buckets_[key(kx, ky)].push_back(id);
        return id;
    }

    void add_polygon(const std::vector<Point2>& pts)
    {
        std::vector<int> cyc;
        cyc.reserve(pts.size());
        for (const auto& p : pts) {
            const int id = vertex_id(p);
            if (cyc.empty() || cyc.back() != id)
                cyc.push_back(id);
        }
        while (cyc.size() > 1 && cyc.front() == cyc.back())
            cyc.pop_back();
        if (cyc.size() < 3)
            return;
        std::vector<Point2> merged;
        for (const int v : cyc)
            merged.push_back(vertices_[v]);
        const double a = signed_area(merged);
        if (std::abs(a) <= 1e-14)
            return;
        if (a < 0.0)
            std::reverse(cyc.begin(), cyc.end());
        cells_.push_back(std::move(cyc));
    }

    PolygonalMesh build(MeshFamily family)
    {
        // Drop vertices that only appeared in discarded slivers.
        std::vector<int> remap(vertices_.size(), -1);
        std::vector<Point2> used;
        for (auto& cyc : cells_)
            for (auto& v : cyc) {
                if (remap[v] < 0) {
                    remap[v] = static_cast<int>(used.size());
                    used.push_back(vertices_[v]);
                }
                v = remap[v];
            }
        return PolygonalMesh(std::move(used), std::move(cells_), family);
    }

private:
    static std::uint64_t key(long long kx, long long ky)
    {
        return (static_cast<std::uint64_t>(kx) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(ky);
    }

    void snap(Point2& p) const
    {
        for (int d = 0; d < 2; ++d) {
            if (std::abs(p[d]) <= 1e-12)
                p[d] = 0.0;
            else if (std::abs(p[d] - 1.0) <= 1e-12)
                p[d] = 1.0;
        }
    }

    double tol_;
    double bucket_;
    std::vector<Point2> vertices_;
    std::vector<std::vector<int>> cells_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

constexpr double kMergeTol = 1e-10;

double grid(int i, int n)
{
    return static_cast<double>(i) / static_cast<double>(n);
}

std::vector<Point2> unit_square()
{
    return {Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)};
}

std::vector<Point2> clip_to_unit_square(std::vector<Point2> poly)
{
    poly = clip_half_plane(poly, Point2(0, 0), Point2(-1, 0));
    poly = clip_half_plane(poly, Point2(0, 0), Point2(0, -1));
    poly = clip_half_plane(poly, Point2(1, 1), Point2(1, 0));
    poly = clip_half_plane(poly, Point2(1, 1), Point2(0, 1));
    return poly;
}

PolygonalMesh quad_grid(int n, const std::vector<Point2>& nodes, MeshFamily family)
{
    MeshBuilder b(kMergeTol);
    auto node = [&](int i, int j) { return nodes[static_cast<std::size_t>(j) * (n + 1) + i]; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            b.add_polygon({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
    return b.build(family);
}

std::vector<Point2> regular_nodes(int n)
{
    std::vector<Point2> nodes;
    nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            nodes.emplace_back(grid(i, n), grid(j, n));
    return nodes;
}

std::vector<Point2> jittered_nodes(int n, std::uint64_t seed)
{
    auto nodes = regular_nodes(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25 / n, 0.25 / n);
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            auto& p = nodes[static_cast<std::size_t>(j) * (n + 1) + i];
            p.x() += jitter(rng);
            p.y() += jitter(rng);
        }
    return nodes;
}

PolygonalMesh make_tri_s(int n)
{
    MeshBuilder b(kMergeTol);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 p00(grid(i, n), grid(j, n));
            const Point2 p10(grid(i + 1, n), grid(j, n));
            const Point2 p11(grid(i + 1, n), grid(j + 1, n));
            const Point2 p01(grid(i, n), grid(j + 1, n));
            b.add_polygon({p00, p10, p11});
            b.add_polygon({p00, p11, p01});
        }
    return b.build(MeshFamily::TriS);
}

// Flat-topped hexagons; columns at x = i/n, even columns centred on y = j/m and
// odd columns on (j + 1/2)/m, so the square's sides cut hexagons through their
// centres or along their flat edges and no slivers appear.
PolygonalMesh make_hex_s(int n)
{
    const double a = 2.0 / (3.0 * n);
    const int m = std::max(1, static_cast<int>(std::lround(3.0 * n / (2.0 * std::sqrt(3.0)))));
    const double d = 1.0 / m;
    MeshBuilder b(kMergeTol);
    for (int i = 0; i <= n; ++i) {
        const double cx = grid(i, n);
        const bool odd = (i % 2) == 1;
        const int rows = odd ? m : m + 1;
        for (int j = 0; j < rows; ++j) {
            const double cy = odd ? (j + 0.5) * d : grid(j, m);
            std::vector<Point2> hex{Point2(cx + a, cy),           Point2(cx + a / 2, cy + d / 2),
                                    Point2(cx - a / 2, cy + d / 2), Point2(cx - a, cy),
                                    Point2(cx - a / 2, cy - d / 2), Point2(cx + a / 2, cy - d / 2)};
            b.add_polygon(clip_to_unit_square(std::move(hex)));
        }
    }
    return b.build(MeshFamily::HexS);
}

// Chevron pattern: cells with even i + j pull the midpoint of one horizontal
// edge into themselves (concave), the neighbour across that edge bulges
// (convex).
PolygonalMesh make_conc_s(int n)
{
    const double h = 1.0 / n;
    const double depth = 0.3 * h;
    // midpoint_y[j][i]: displaced midpoint on grid line y = j/n of column i, NaN if none.
    std::vector<std::vector<double>> midpoint_y(n + 1, std::vector<double>(n, std::nan("")));
    if (n > 1) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if ((i + j) % 2 != 0)
                    continue;
                if (j < n - 1)
                    midpoint_y[j + 1][i] = grid(j + 1, n) - depth;
                else
                    midpoint_y[j][i] = grid(j, n) + depth;
            }
    }
    MeshBuilder b(kMergeTol);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double xm = (grid(i, n) + grid(i + 1, n)) / 2;
            std::vector<Point2> poly{Point2(grid(i, n), grid(j, n))};
            if (!std::isnan(midpoint_y[j][i]))
                poly.emplace_back(xm, midpoint_y[j][i]);
            poly.emplace_back(grid(i + 1, n), grid(j, n));
            poly.emplace_back(grid(i + 1, n), grid(j + 1, n));
            if (!std::isnan(midpoint_y[j + 1][i]))
                poly.emplace_back(xm, midpoint_y[j + 1][i]);
            poly.emplace_back(grid(i, n), grid(j + 1, n));
            b.add_polygon(poly);
        }
    return b.build(MeshFamily::ConcS);
}

// ---------------------------------------------------------------------------
// Delaunay (Bowyer-Watson) over Poisson-disk samples

double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx);
}

std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& input)
{
    std::vector<Point2> pts = input;
    const int np = static_cast<int>(pts.size());
    // Super triangle well outside [0,1]^2.
    pts.emplace_back(-50.0, -50.0);
    pts.emplace_back(100.0, -50.0);
    pts.emplace_back(0.5, 100.0);

    std::vector<std::array<int, 3>> tris{{np, np + 1, np + 2}};
    std::vector<std::array<int, 3>> keep;
    std::vector<std::pair<int, int>> cavity_edges;
    for (int p = 0; p < np; ++p) {
        keep.clear();
        cavity_edges.clear();
        for (const auto& t : tris) {
            if (incircle(pts[t[0]], pts[t[1]], pts[t[2]], pts[p]) > 0.0) {
                for (int k = 0; k < 3; ++k)
                    cavity_edges.emplace_back(t[k], t[(k + 1) % 3]);
            } else {
                keep.push_back(t);
            }
        }
        // Cavity boundary = edges seen once.
        std::sort(cavity_edges.begin(), cavity_edges.end(), [](const auto& l, const auto& r) {
            return std::minmax(l.first, l.second) < std::minmax(r.first, r.second);
        });
        for (std::size_t k = 0; k < cavity_edges.size();) {
            std::size_t next = k + 1;
            const auto key = std::minmax(cavity_edges[k].first, cavity_edges[k].second);
            while (next < cavity_edges.size()
                   && std::minmax(cavity_edges[next].first, cavity_edges[next].second) == key)
                ++next;
            if (next - k == 1)
                keep.push_back({cavity_edges[k].first, cavity_edges[k].second, p});
            k = next;
        }
        tris.swap(keep);
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris)
        if (t[0] < np && t[1] < np && t[2] < np)
            out.push_back(t);
    return out;
}

std::vector<Point2> poisson_disk_points(int n, std::uint64_t seed)
{
    const double r = 1.0 / n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Boundary samples slide along their side so that the symmetric layout does
    // not produce cocircular point sets.
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) {
        const double s = i == 0 ? 0.0 : 0.15 * r * (2.0 * unit(rng) - 1.0);
        const double t = grid(i, n) + s;
        pts.emplace_back(t, 0.0);
        pts.emplace_back(1.0, t);
        pts.emplace_back(1.0 - t, 1.0);
        pts.emplace_back(0.0, 1.0 - t);
    }

    const double cell = r / std::sqrt(2.0);
    const int gn = static_cast<int>(std::ceil(1.0 / cell)) + 1;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gn) * gn);
    auto bucket_of = [&](const Point2& p) {
        const int bx = std::clamp(static_cast<int>(p.x() / cell), 0, gn - 1);
        const int by = std::clamp(static_cast<int>(p.y() / cell), 0, gn - 1);
        return std::pair{bx, by};
    };
    auto insert = [&](const Point2& p) {
        const auto [bx, by] = bucket_of(p);
        buckets[static_cast<std::size_t>(by) * gn + bx].push_back(static_cast<int>(pts.size()));
        pts.push_back(p);
    };
    auto far_enough = [&](const Point2& p) {
        const auto [bx, by] = bucket_of(p);
        for (int y = std::max(0, by - 2); y <= std::min(gn - 1, by + 2); ++y)
            for (int x = std::max(0, bx - 2); x <= std::min(gn - 1, bx + 2); ++x)
                for (const int id : buckets[static_cast<std::size_t>(y) * gn + x])
                    if ((pts[id] - p).squaredNorm() < r * r)
                        return false;
        return true;
    };

    std::vector<Point2> boundary;
    boundary.swap(pts);
    for (const auto& p : boundary)
        insert(p);

    std::vector<int> active(pts.size());
    for (std::size_t k = 0; k < active.size(); ++k)
        active[k] = static_cast<int>(k);
    constexpr int kAttempts = 30;
    const double margin = 0.5 * r;
    while (!active.empty()) {
        const auto slot = static_cast<std::size_t>(unit(rng) * static_cast<double>(active.size()))
            % active.size();
        const Point2 base = pts[active[slot]];
        bool found = false;
        for (int k = 0; k < kAttempts && !found; ++k) {
            const double radius = r * (1.0 + unit(rng));
            const double angle = 2.0 * M_PI * unit(rng);
            const Point2 cand = base + radius * Point2(std::cos(angle), std::sin(angle));
            if (cand.x() < margin || cand.x() > 1.0 - margin || cand.y() < margin || cand.y() > 1.0 - margin)
                continue;
            if (!far_enough(cand))
                continue;
            active.push_back(static_cast<int>(pts.size()));
            insert(cand);
            found = true;
        }
        if (!found) {
            active[slot] = active.back();
            active.pop_back();
        }
    }
    return pts;
}

PolygonalMesh make_tri_u(int n, std::uint64_t seed)
{
    const auto pts = poisson_disk_points(n, seed);
    MeshBuilder b(kMergeTol);
    for (const auto& t : delaunay(pts))
        b.add_polygon({pts[t[0]], pts[t[1]], pts[t[2]]});
    return b.build(MeshFamily::TriU);
}

// ---------------------------------------------------------------------------
// Clipped Voronoi with Lloyd relaxation

class SiteGrid {
public:
    SiteGrid(const std::vector<Point2>& sites, int cells_per_side)
        : sites_(sites), n_(cells_per_side), buckets_(static_cast<std::size_t>(n_) * n_)
    {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const auto [bx, by] = bucket_of(sites[i]);
            buckets_[static_cast<std::size_t>(by) * n_ + bx].push_back(static_cast<int>(i));
        }
    }

    std::vector<Point2> cell(int site) const
    {
        const Point2& s = sites_[site];
        auto poly = unit_square();
        const auto [bx, by] = bucket_of(s);
        const double width = 1.0 / n_;
        for (int ring = 0; ring <= n_; ++ring) {
            for (int y = by - ring; y <= by + ring; ++y)
                for (int x = bx - ring; x <= bx + ring; ++x) {
                    if (std::max(std::abs(x - bx), std::abs(y - by)) != ring)
                        continue;
                    if (x < 0 || y < 0 || x >= n_ || y >= n_)
                        continue;
                    for (const int other : buckets_[static_cast<std::size_t>(y) * n_ + x]) {
                        if (other == site)
                            continue;
                        const Point2 dir = sites_[other] - s;
                        poly = clip_half_plane(poly, 0.5 * (s + sites_[other]), dir);
                    }
                }
            double reach = 0.0;
            for (const auto& p : poly)
                reach = std::max(reach, (p - s).norm());
            // Sites beyond this ring are at least ring * width away.
            if (ring * width >= 2.0 * reach)
                break;
        }
        return poly;
    }

private:
    std::pair<int, int> bucket_of(const Point2& p) const
    {
        return {std::clamp(static_cast<int>(p.x() * n_), 0, n_ - 1), std::clamp(static_cast<int>(p.y() * n_), 0, n_ - 1)};
    }

    const std::vector<Point2>& sites_;
    int n_;
    std::vector<std::vector<int>> buckets_;
};

PolygonalMesh make_poly_u(int n, std::uint64_t seed)
{
    const int count = n * n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point2> sites(count);
    for (auto& s : sites) {
        const double x = unit(rng);
        const double y = unit(rng);
        s = Point2(x, y);
    }
    constexpr int kLloydIterations = 20;
    for (int it = 0; it < kLloydIterations; ++it) {
        const SiteGrid grid_index(sites, n);
        std::vector<Point2> moved(count);
        for (int i = 0; i < count; ++i) {
            const auto poly = grid_index.cell(i);
            moved[i] = poly.size() >= 3 ? area_centroid(poly) : sites[i];
        }
        sites.swap(moved);
    }
    const SiteGrid grid_index(sites, n);
    MeshBuilder b(1e-9);
    for (int i = 0; i < count; ++i)
        b.add_polygon(grid_index.cell(i));
    return b.build(MeshFamily::PolyU);
}

// Each jittered quad is split by a zig-zag cut between the midpoints of its
// bottom and top edges into two concave hexagons.
PolygonalMesh make_conc_u(int n, std::uint64_t seed)
{
    const auto nodes = jittered_nodes(n, seed);
    auto node = [&](int i, int j) { return nodes[static_cast<std::size_t>(j) * (n + 1) + i]; };
    MeshBuilder b(kMergeTol);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 v0 = node(i, j), v1 = node(i + 1, j), v2 = node(i + 1, j + 1), v3 = node(i, j + 1);
            const Point2 mb = 0.5 * (v0 + v1);
            const Point2 mt = 0.5 * (v3 + v2);
            const Point2 offset = 0.15 * 0.5 * ((v1 - v0) + (v2 - v3));
            const Point2 p1 = mb + (mt - mb) / 3.0 + offset;
            const Point2 p2 = mb + 2.0 * (mt - mb) / 3.0 - offset;
            b.add_polygon({v0, mb, p1, p2, mt, v3});
            b.add_polygon({mb, v1, v2, mt, p2, p1});
        }
    return b.build(MeshFamily::ConcU);
}

}  // namespace

PolygonalMesh generate_mesh(MeshFamily family, int subdivisions, std::uint64_t seed)
{
    if (subdivisions < 1)
        throw MeshGenerationError(fmt::format("subdivisions must be >= 1, got {}", subdivisions));
    const int n = subdivisions;
    PolygonalMesh mesh;
    switch (family) {
    case MeshFamily::TriS: mesh = make_tri_s(n); break;
    case MeshFamily::QuadS: mesh = quad_grid(n, regular_nodes(n), MeshFamily::QuadS); break;
    case MeshFamily::HexS: mesh = make_hex_s(n); break;
    case MeshFamily::ConcS: mesh = make_conc_s(n); break;
    case MeshFamily::TriU: mesh = make_tri_u(n, seed); break;
    case MeshFamily::QuadU: mesh = quad_grid(n, jittered_nodes(n, seed), MeshFamily::QuadU); break;
    case MeshFamily::PolyU: mesh = make_poly_u(n, seed); break;
    case MeshFamily::ConcU: mesh = make_conc_u(n, seed); break;
    case MeshFamily::External:
        throw MeshGenerationError("the external family is loaded from a file, not generated");
    }
    if (const auto report = validate_mesh(mesh); !report.ok)
        throw MeshGenerationError(fmt::format("{} mesh (n = {}, seed = {}) failed validation: {} (cell {})",
                                              family_name(family), n, seed, report.message, report.offending_cell));
    return mesh;
}

}  // namespace vemrcp
