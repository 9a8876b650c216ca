#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vemrcp/convergence.hpp"
#include "vemrcp/mesh.hpp"

namespace vemrcp {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "test,family,level,h_e,dofs,E_vem,E_rcp0,E_rcp1,time_s";

struct CsvOptions {
    /// Wall times vary between runs; they are written as 0 unless requested
    /// so that repeated studies give identical files.
    bool include_timing = false;
};

/// Header plus one row per record. Reals use the shortest round-trip
/// representation; methods that were not run leave their column empty.
std::string format_csv(const std::vector<ConvergenceRecord>& records, const CsvOptions& options = {});
void write_csv(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& path,
               const CsvOptions& options = {});

std::vector<ConvergenceRecord> parse_csv(std::string_view text);
std::vector<ConvergenceRecord> read_csv(const std::filesystem::path& path);

/// Whitespace-separated columns `h_e E_vem E_rcp0 E_rcp1` for gnuplot, with
/// `NaN` for missing values.
std::string format_plot_data(const std::vector<ConvergenceRecord>& records);
void write_plot_data(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& path);

/// Named per-cell scalar fields; each must have one value per cell.
using CellFields = std::vector<std::pair<std::string, std::vector<double>>>;

/// Legacy ASCII VTK unstructured grid with polygon cells and CELL_DATA scalars.
std::string format_vtk(const PolygonalMesh& mesh, const CellFields& fields, const std::string& title = "vemrcp");
void write_vtk(const PolygonalMesh& mesh, const CellFields& fields, const std::filesystem::path& path,
               const std::string& title = "vemrcp");

/// von Mises fields vm_vem, vm_rcp0, vm_rcp1 (when computed) and vm_exact, all
/// evaluated at cell centroids.
CellFields von_mises_fields(const PolygonalMesh& mesh, const ManufacturedCase& mc, const LevelSolution& level);

}  // namespace vemrcp
