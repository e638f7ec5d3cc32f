#include "fracorder/config.hpp"
#include "fracorder/errors.hpp"
#include "fracorder/fraccalc.hpp"
#include "fracorder/io.hpp"
#include "fracorder/tables.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

namespace fs = std::filesystem;
using namespace fracorder;

namespace {

unsigned thread_count() {
    const char *env = std::getenv("FRACORDER_THREADS");
    if (env == nullptr || *env == '\0')
        return std::thread::hardware_concurrency();
    const double v = parse_double(env, "FRACORDER_THREADS");
    if (!(v >= 0.0) || v != static_cast<unsigned>(v))
        throw ConfigError("FRACORDER_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(v);
}

int cmd_estimate(const fs::path &config, const std::optional<fs::path> &out) {
    ExperimentConfig cfg = load_experiment_config(config);
    cfg.options.threads = thread_count();
    const fs::path dir = out ? *out : cfg.output_dir;

    EstimateReport rep;
    int code = 0;
    try {
        rep = run_pipeline(cfg.observation, cfg.basis, cfg.grids, cfg.fdo, cfg.options);
    } catch (const PipelineSelectionError &e) {
        rep = e.report();
        code = 2;
    }
    save_observation(dir / "observation.csv", cfg.observation, cfg.fdo);
    write_text(dir / "report.json", report_to_json(rep, cfg.observation, cfg.fdo).dump(2) + "\n");
    write_text(dir / "diagnostics.csv", diagnostics_csv(rep));
    fmt::print("{}\n", summary_line(rep));
    if (code != 0)
        fmt::print(stderr, "selection failed: {}\n", rep.failure);
    return code;
}

fs::path diff_path(const fs::path &out) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + "_vs_reference" + out.extension().string());
    return p;
}

int cmd_table(int id, const fs::path &out, const std::string &log_selection) {
    table_setup(id);
    PipelineOptions options;
    options.log_selection = log_selection_from_string(log_selection);
    options.threads = thread_count();
    const auto cells = run_table(id, options);
    write_text(out, table_csv(cells));
    write_text(diff_path(out), table_diff_csv(cells, reference_table(id)));
    fmt::print("table {}: {} rows -> {}\n", id, cells.size(), out.string());
    return 0;
}

int cmd_caputo(double nu, const fs::path &in, const fs::path &out) {
    const SampledFunction f = read_sampled_csv(in);
    write_text(out, sampled_csv(caputo_l1(f, nu), "t,caputo"));
    return 0;
}

int cmd_fode(const fs::path &config) {
    const FodeConfig cfg = load_fode_config(config);
    const FodeSolution sol = solve(cfg.problem, cfg.mesh);
    if (cfg.output)
        write_text(*cfg.output, solution_csv(sol));
    fmt::print("steps={} grading={} v_end={}\n", cfg.mesh.steps, format_double(cfg.mesh.grading),
               format_double(sol.values.back()));
    if (cfg.verify_linking)
        fmt::print("nu0_estimate={}\n", format_double(verify_linking(sol, cfg.problem)));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Leading-order reconstruction for multi-term fractional operators"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    auto *estimate = app.add_subcommand("estimate", "Estimate nu0 from a configured scenario");
    estimate->add_option("--config", config, "JSON experiment config")->required();
    estimate->add_option("--out", out, "Output directory (overrides output_dir)");

    int table_id = 0;
    std::string table_out;
    std::string log_selection = "reuse_ratio";
    auto *table = app.add_subcommand("table", "Reproduce one of the three reference tables");
    table->add_option("--id", table_id, "Table id (1, 2 or 3)")->required();
    table->add_option("--out", table_out, "Output CSV")->required();
    table->add_option("--log-selection", log_selection, "independent or reuse_ratio");

    double nu = 0.0;
    std::string caputo_in, caputo_out;
    auto *caputo = app.add_subcommand("caputo", "L1 Caputo derivative of a sampled function");
    caputo->add_option("--nu", nu, "Order in (0,1)")->required();
    caputo->add_option("--in", caputo_in, "Input CSV (t,value; t starts at 0)")->required();
    caputo->add_option("--out", caputo_out, "Output CSV")->required();

    std::string fode_config;
    auto *fode = app.add_subcommand("fode", "Solve a fractional Cauchy problem");
    fode->add_option("--config", fode_config, "JSON problem config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*estimate)
            return cmd_estimate(config, out.empty() ? std::nullopt : std::optional<fs::path>(out));
        if (*table)
            return cmd_table(table_id, table_out, log_selection);
        if (*caputo)
            return cmd_caputo(nu, caputo_in, caputo_out);
        if (*fode)
            return cmd_fode(fode_config);
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}
