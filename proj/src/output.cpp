#include "vemrcp/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace vemrcp {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw OutputError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    if (!out)
        throw OutputError(fmt::format("write to '{}' failed", path.string()));
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw OutputError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string real(double v)
{
    return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            return out;
        pos = next + 1;
    }
}

template <typename T>
T parse_number(std::string_view field, int line, std::string_view column)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw OutputError(fmt::format("line {}: bad {} value '{}'", line, column, field));
    return value;
}

double parse_optional_real(std::string_view field, int line, std::string_view column)
{
    return field.empty() ? std::nan("") : parse_number<double>(field, line, column);
}

}  // namespace

std::string format_csv(const std::vector<ConvergenceRecord>& records, const CsvOptions& options)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : records)
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", test_name(r.test), family_name(r.family), r.level,
                           real(r.h_e), r.dofs, real(r.error[0]), real(r.error[1]), real(r.error[2]),
                           options.include_timing ? real(r.time_s) : std::string("0"));
    return out;
}

void write_csv(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& path,
               const CsvOptions& options)
{
    write_text(path, format_csv(records, options));
}

std::vector<ConvergenceRecord> parse_csv(std::string_view text)
{
    std::vector<ConvergenceRecord> records;
    int line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw OutputError(fmt::format("line {}: unexpected CSV header '{}'", line_no, line));
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 9)
            throw OutputError(fmt::format("line {}: expected 9 fields, found {}", line_no, f.size()));
        ConvergenceRecord r;
        const auto test = parse_test(f[0]);
        const auto family = parse_family(f[1]);
        if (!test || !family)
            throw OutputError(fmt::format("line {}: unknown test or family", line_no));
        r.test = *test;
        r.family = *family;
        r.level = parse_number<int>(f[2], line_no, "level");
        r.h_e = parse_number<double>(f[3], line_no, "h_e");
        r.dofs = parse_number<int>(f[4], line_no, "dofs");
        for (std::size_t m = 0; m < 3; ++m)
            r.error[m] = parse_optional_real(f[5 + m], line_no, "error");
        r.time_s = parse_optional_real(f[8], line_no, "time_s");
        records.push_back(std::move(r));
    }
    if (!header_seen)
        throw OutputError("empty CSV");
    return records;
}

std::vector<ConvergenceRecord> read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_text(path));
}

std::string format_plot_data(const std::vector<ConvergenceRecord>& records)
{
    std::string out = "# h_e E_vem E_rcp0 E_rcp1\n";
    auto col = [](double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("NaN"); };
    for (const auto& r : records)
        out += fmt::format("{} {} {} {}\n", col(r.h_e), col(r.error[0]), col(r.error[1]), col(r.error[2]));
    return out;
}

void write_plot_data(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& path)
{
    write_text(path, format_plot_data(records));
}

std::string format_vtk(const PolygonalMesh& mesh, const CellFields& fields, const std::string& title)
{
    const int nc = mesh.num_cells();
    for (const auto& [name, values] : fields) {
        if (static_cast<int>(values.size()) != nc)
            throw OutputError(fmt::format("field '{}' has {} values for {} cells", name, values.size(), nc));
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
            throw OutputError(fmt::format("invalid VTK field name '{}'", name));
    }
    fmt::memory_buffer out;
    auto it = std::back_inserter(out);
    fmt::format_to(it, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID\n", title);
    fmt::format_to(it, "POINTS {} double\n", mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v)
        fmt::format_to(it, "{:.17g} {:.17g} 0\n", mesh.vertex(v).x(), mesh.vertex(v).y());
    std::size_t size = 0;
    for (int c = 0; c < nc; ++c)
        size += mesh.cell(c).size() + 1;
    fmt::format_to(it, "CELLS {} {}\n", nc, size);
    for (int c = 0; c < nc; ++c) {
        fmt::format_to(it, "{}", mesh.cell(c).size());
        for (const int v : mesh.cell(c))
            fmt::format_to(it, " {}", v);
        fmt::format_to(it, "\n");
    }
    fmt::format_to(it, "CELL_TYPES {}\n", nc);
    for (int c = 0; c < nc; ++c)
        fmt::format_to(it, "7\n");
    if (!fields.empty())
        fmt::format_to(it, "CELL_DATA {}\n", nc);
    for (const auto& [name, values] : fields) {
        fmt::format_to(it, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
        for (const double v : values)
            fmt::format_to(it, "{:.17g}\n", v);
    }
    return fmt::to_string(out);
}

void write_vtk(const PolygonalMesh& mesh, const CellFields& fields, const std::filesystem::path& path,
               const std::string& title)
{
    write_text(path, format_vtk(mesh, fields, title));
}

CellFields von_mises_fields(const PolygonalMesh& mesh, const ManufacturedCase& mc, const LevelSolution& level)
{
    CellFields fields;
    auto add = [&](const std::string& name, const StressProvider& provider) {
        std::vector<double> values(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c)
            values[c] = von_mises(provider(c, polygon_centroid(mesh, c)), mc.material);
        fields.emplace_back(name, std::move(values));
    };
    add("vm_vem", stress_provider(level, RecoveryMethod::VEM));
    if (level.rcp0)
        add("vm_rcp0", stress_provider(level, RecoveryMethod::RCP0));
    if (level.rcp1)
        add("vm_rcp1", stress_provider(level, RecoveryMethod::RCP1));
    add("vm_exact", [&](int, const Point2& p) { return mc.stress(p); });
    return fields;
}

}  // namespace vemrcp
