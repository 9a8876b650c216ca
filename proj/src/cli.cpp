#include "vemrcp/cli.hpp"

#include <cmath>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vemrcp/mesh_generators.hpp"
#include "vemrcp/output.hpp"

namespace vemrcp {

namespace {

constexpr double kPatchTestTolerance = 1e-18;
constexpr double kPatchTestDisplacementTolerance = 1e-10;

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = std::min(text.find(',', pos), text.size());
        if (next > pos)
            out.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::string format_error(double v)
{
    return std::isfinite(v) ? fmt::format("{:.4e}", v) : std::string("-");
}

int run_patch_test_mode(const StudyConfig& config, std::ostream& out)
{
    const int n = config.base_subdivisions;
    bool ok = true;
    fmt::print(out, "patch test: linear displacement, zero body force, n = {}\n", n);
    fmt::print(out, "{:<8} {:>12} {:>12} {:>12} {:>12}\n", "family", "rel |u|err", "E_vem", "E_rcp0", "E_rcp1");
    for (const auto family : generated_families()) {
        try {
            const PatchTestResult r = run_patch_test(generate_mesh(family, n, config.seed), config.material);
            const bool pass = r.displacement_error <= kPatchTestDisplacementTolerance &&
                              std::all_of(r.error.begin(), r.error.end(),
                                          [](double e) { return e <= kPatchTestTolerance; });
            ok = ok && pass;
            fmt::print(out, "{:<8} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}  {}\n", family_name(family),
                       r.displacement_error, r.error[0], r.error[1], r.error[2], pass ? "ok" : "FAIL");
        } catch (const std::exception& e) {
            ok = false;
            fmt::print(out, "{:<8} error: {}\n", family_name(family), e.what());
        }
    }
    fmt::print(out, "{}\n", ok ? "PASS" : "FAIL");
    return ok ? kExitOk : kExitFailure;
}

void print_study(const std::vector<ConvergenceRecord>& records, const StudyConfig& config, std::ostream& out)
{
    fmt::print(out, "{:>6} {:>10} {:>8} {:>12} {:>12} {:>12} {:>9}\n", "n", "h_e", "dofs", "E_vem", "E_rcp0",
               "E_rcp1", "time_s");
    for (const auto& r : records) {
        if (!r.failure.empty() && !std::isfinite(r.error[0])) {
            fmt::print(out, "{:>6} failed: {}\n", r.level, r.failure);
            continue;
        }
        fmt::print(out, "{:>6} {:>10.5f} {:>8} {:>12} {:>12} {:>12} {:>9.3f}\n", r.level, r.h_e, r.dofs,
                   format_error(r.error[0]), format_error(r.error[1]), format_error(r.error[2]), r.time_s);
        if (!r.failure.empty())
            fmt::print(out, "       warning: {}\n", r.failure);
        if (r.rcp1_fallbacks > 0)
            fmt::print(out, "       note: {} RCP1 patches fell back to Patch0\n", r.rcp1_fallbacks);
    }
    std::string rates = "  rate:";
    for (const auto m : config.methods) {
        const RateEstimate est = observed_rate(records, m);
        rates += fmt::format(" {}={}", method_name(m),
                             est.points >= 2 ? fmt::format("{:.3f}{}", est.slope, est.monotone ? "" : "(non-monotone)")
                                             : std::string("-"));
    }
    fmt::print(out, "{}\n", rates);
}

void export_vtk(const StudyConfig& config, MeshFamily family, const std::optional<PolygonalMesh>& external,
                const std::filesystem::path& path)
{
    const PolygonalMesh mesh =
        external ? *external : generate_mesh(family, config.subdivisions().back(), config.seed);
    const ManufacturedCase mc = manufactured_case(config.test, config.material);
    const LevelSolution level = solve_level(mesh, mc, config.methods);
    write_vtk(mesh, von_mises_fields(mesh, mc, level), path,
              fmt::format("von Mises stress, test {}, {}", test_name(config.test), family_name(family)));
}

}  // namespace

std::vector<int> StudyConfig::subdivisions() const
{
    std::vector<int> out;
    for (int k = 0; k < levels; ++k)
        out.push_back(base_subdivisions << k);
    return out;
}

ParsedArgs parse_config(const std::vector<std::string>& args)
{
    CLI::App app{"Virtual element elasticity with stress recovery by compatibility in patches", "vemrcp"};
    std::string test = "a";
    std::optional<std::string> families;
    std::string methods = "vem,rcp0,rcp1";
    std::string mesh_file;
    ParsedArgs parsed;
    StudyConfig& cfg = parsed.config;

    app.add_option("--test", test, "Manufactured test: a, b or c")->capture_default_str();
    app.add_option("--family", families, "Comma-separated mesh families (default: all generated)");
    app.add_option("--levels", cfg.levels, "Number of refinement levels")->capture_default_str();
    app.add_option("--base", cfg.base_subdivisions, "Subdivisions of the coarsest level")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for the unstructured generators")->capture_default_str();
    app.add_option("--methods", methods, "Comma-separated subset of vem,rcp0,rcp1")->capture_default_str();
    app.add_option("--lambda", cfg.material.lambda, "First Lame constant")->capture_default_str();
    app.add_option("--mu", cfg.material.mu, "Shear modulus")->capture_default_str();
    app.add_option("--mesh-file", mesh_file, "Run on a mesh read from this file instead of generated ones");
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--patch-test", cfg.patch_test, "Run the linear patch test on every family");
    app.add_flag("--vtk", cfg.vtk, "Export von Mises cell fields of the finest level");
    app.add_flag("--timing", cfg.timing, "Record wall times in the CSV (otherwise written as 0)");
    app.set_help_flag("-h,--help", "Print this help and exit");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        parsed.help = true;
        parsed.help_text = app.help();
        return parsed;
    } catch (const CLI::ParseError& e) {
        throw UsageError(fmt::format("{}\n\n{}", e.what(), app.help()));
    }

    const auto id = parse_test(test);
    if (!id)
        throw UsageError(fmt::format("unknown test '{}' (expected a, b or c)", test));
    cfg.test = *id;

    if (families) {
        for (const auto& name : split_list(*families)) {
            const auto f = parse_family(name);
            if (!f || *f == MeshFamily::External)
                throw UsageError(fmt::format("unknown mesh family '{}'", name));
            cfg.families.push_back(*f);
        }
        if (cfg.families.empty())
            throw UsageError("--family needs at least one mesh family");
    } else {
        cfg.families = generated_families();
    }

    cfg.methods.clear();
    for (const auto& name : split_list(methods)) {
        const auto m = parse_method(name);
        if (!m)
            throw UsageError(fmt::format("unknown method '{}' (expected vem, rcp0 or rcp1)", name));
        if (std::find(cfg.methods.begin(), cfg.methods.end(), *m) == cfg.methods.end())
            cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty())
        throw UsageError("--methods needs at least one method");
    std::sort(cfg.methods.begin(), cfg.methods.end());

    if (cfg.levels < 1)
        throw UsageError("--levels must be at least 1");
    if (cfg.base_subdivisions < 1 || (cfg.base_subdivisions << (cfg.levels - 1)) > 4096)
        throw UsageError("--base must be at least 1 and the finest level at most 4096 subdivisions");
    if (!cfg.material.is_valid())
        throw UsageError(fmt::format("invalid material: lambda = {}, mu = {} (need mu > 0 and lambda + mu > 0)",
                                     cfg.material.lambda, cfg.material.mu));
    if (!mesh_file.empty()) {
        cfg.mesh_file = mesh_file;
        cfg.families = {MeshFamily::External};
    }
    return parsed;
}

int run(const StudyConfig& config, std::ostream& out, std::ostream& err)
{
    if (config.patch_test)
        return run_patch_test_mode(config, out);

    std::optional<PolygonalMesh> external;
    if (config.mesh_file) {
        LoadLog log;
        external = load_mesh(*config.mesh_file, &log);
        for (const auto& w : log.warnings)
            fmt::print(err, "warning: {}\n", w);
    }
    std::filesystem::create_directories(config.out_dir);

    bool failed = false;
    for (const auto family : config.families) {
        StudyOptions opts;
        opts.test = config.test;
        opts.family = family;
        opts.subdivisions = config.subdivisions();
        opts.material = config.material;
        opts.methods = config.methods;
        opts.seed = config.seed;
        opts.external_mesh = external;

        fmt::print(out, "test {} on {}\n", test_name(config.test), family_name(family));
        const auto records = run_convergence_study(opts);
        print_study(records, config, out);

        const std::string stem = fmt::format("test{}_{}", test_name(config.test), family_name(family));
        write_csv(records, config.out_dir / (stem + ".csv"), {config.timing});
        write_plot_data(records, config.out_dir / (stem + ".dat"));
        for (const auto& r : records)
            if (!r.failure.empty()) {
                failed = true;
                fmt::print(err, "level {} of {}: {}\n", r.level, family_name(family), r.failure);
            }
        if (config.vtk) {
            const auto path = config.out_dir / (stem + ".vtk");
            try {
                export_vtk(config, family, external, path);
            } catch (const std::exception& e) {
                failed = true;
                fmt::print(err, "VTK export for {} failed: {}\n", family_name(family), e.what());
            }
        }
    }
    return failed ? kExitFailure : kExitOk;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    ParsedArgs parsed;
    try {
        parsed = parse_config(args);
    } catch (const UsageError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kExitUsage;
    }
    if (parsed.help) {
        fmt::print(out, "{}", parsed.help_text);
        return kExitOk;
    }
    try {
        return run(parsed.config, out, err);
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitFailure;
    }
}

}  // namespace vemrcp
