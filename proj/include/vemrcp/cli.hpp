#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vemrcp/convergence.hpp"

namespace vemrcp {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StudyConfig {
    TestId test = TestId::A;
    std::vector<MeshFamily> families;  // all generated families by default
    int levels = 4;
    int base_subdivisions = 8;  // level k uses base * 2^k subdivisions
    std::uint64_t seed = 0;
    std::vector<RecoveryMethod> methods{kAllMethods.begin(), kAllMethods.end()};
    LameMaterial material;
    std::optional<std::filesystem::path> mesh_file;
    std::filesystem::path out_dir = ".";
    bool patch_test = false;
    bool vtk = false;
    bool timing = false;

    std::vector<int> subdivisions() const;
};

/// Result of argument parsing: either a config or a request to print help.
struct ParsedArgs {
    StudyConfig config;
    bool help = false;
    std::string help_text;
};

/// Throws UsageError on unknown flags or invalid values.
ParsedArgs parse_config(const std::vector<std::string>& args);

/// Runs the configured study or patch test. Returns an ExitCode.
int run(const StudyConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (parse, run, map errors to exit codes).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vemrcp
