#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "vemrcp/mesh.hpp"

namespace vemrcp {

namespace {

struct Line {
    int number;
    std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text)
{
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])))
                ++j;
            if (j > i)
                line.tokens.push_back(raw.substr(i, j - i));
            i = j;
        }
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
        pos = end + 1;
    }
    return lines;
}

template <typename T>
T parse_number(std::string_view token, int line)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw MeshParseError(fmt::format("line {}: cannot parse '{}' as a number", line, token), line);
    return value;
}

}  // namespace

PolygonalMesh parse_mesh(std::string_view text, LoadLog* log)
{
    const auto lines = tokenize(text);
    std::size_t cursor = 0;
    auto next = [&](const char* what) -> const Line& {
        if (cursor >= lines.size()) {
            const int last = lines.empty() ? 0 : lines.back().number;
            throw MeshParseError(fmt::format("line {}: unexpected end of file, expected {}", last + 1, what), last + 1);
        }
        return lines[cursor++];
    };

    const Line& header = next("header");
    if (header.tokens.size() != 2 || header.tokens[0] != "pmesh" || header.tokens[1] != "1")
        throw MeshParseError(fmt::format("line {}: expected header 'pmesh 1'", header.number), header.number);

    const Line& counts = next("vertex and cell counts");
    if (counts.tokens.size() != 2)
        throw MeshParseError(fmt::format("line {}: expected '<nv> <nc>'", counts.number), counts.number);
    const int nv = parse_number<int>(counts.tokens[0], counts.number);
    const int nc = parse_number<int>(counts.tokens[1], counts.number);
    if (nv < 3 || nc < 1)
        throw MeshParseError(fmt::format("line {}: need at least 3 vertices and 1 cell", counts.number),
                             counts.number);

    std::vector<Point2> vertices;
    vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        const Line& l = next("vertex coordinates");
        if (l.tokens.size() != 2)
            throw MeshParseError(fmt::format("line {}: vertex {} needs exactly 2 coordinates", l.number, i), l.number);
        vertices.emplace_back(parse_number<double>(l.tokens[0], l.number), parse_number<double>(l.tokens[1], l.number));
    }

    std::vector<std::vector<int>> cells;
    cells.reserve(nc);
    for (int c = 0; c < nc; ++c) {
        const Line& l = next("cell");
        const int k = parse_number<int>(l.tokens[0], l.number);
        if (k < 3 || static_cast<int>(l.tokens.size()) != k + 1)
            throw MeshParseError(fmt::format("line {}: cell {} declares {} vertices but lists {}", l.number, c, k,
                                             l.tokens.size() - 1),
                                 l.number);
        std::vector<int> cyc(k);
        for (int i = 0; i < k; ++i) {
            cyc[i] = parse_number<int>(l.tokens[i + 1], l.number);
            if (cyc[i] < 0 || cyc[i] >= nv)
                throw MeshParseError(
                    fmt::format("line {}: cell {} references vertex {} out of range [0, {})", l.number, c, cyc[i], nv),
                    l.number);
        }
        std::vector<Point2> pts;
        for (const int v : cyc)
            pts.push_back(vertices[v]);
        if (signed_area(pts) < 0.0) {
            std::reverse(cyc.begin(), cyc.end());
            if (log)
                log->warnings.push_back(fmt::format("cell {} was clockwise; orientation reversed", c));
        }
        cells.push_back(std::move(cyc));
    }
    if (cursor != lines.size())
        throw MeshParseError(fmt::format("line {}: trailing content after the last cell", lines[cursor].number),
                             lines[cursor].number);

    PolygonalMesh mesh(std::move(vertices), std::move(cells), MeshFamily::External);
    if (const auto report = validate_mesh(mesh); !report.ok)
        throw MeshError(fmt::format("invalid mesh (cell {}): {}", report.offending_cell, report.message));
    return mesh;
}

PolygonalMesh load_mesh(const std::filesystem::path& path, LoadLog* log)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError(fmt::format("cannot open mesh file '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_mesh(buffer.str(), log);
}

std::string format_mesh(const PolygonalMesh& mesh)
{
    std::string out = fmt::format("pmesh 1\n{} {}\n", mesh.num_vertices(), mesh.num_cells());
    for (const auto& p : mesh.vertices())
        out += fmt::format("{:.17g} {:.17g}\n", p.x(), p.y());
    for (const auto& cyc : mesh.cells()) {
        out += fmt::format("{}", cyc.size());
        for (const int v : cyc)
            out += fmt::format(" {}", v);
        out += '\n';
    }
    return out;
}

void save_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw MeshError(fmt::format("cannot write mesh file '{}'", path.string()));
    out << format_mesh(mesh);
    if (!out)
        throw MeshError(fmt::format("error while writing '{}'", path.string()));
}

}  // namespace vemrcp
