#include "fracorder/config.hpp"

#include "fracorder/errors.hpp"
#include "fracorder/io.hpp"
#include "fracorder/tables.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fracorder {

using nlohmann::json;

namespace {

std::string path_of(std::string_view where, std::string_view key) {
    return where.empty() ? std::string(key) : fmt::format("{}.{}", where, key);
}

void reject_unknown(const json &j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object())
        throw ConfigError(fmt::format("'{}' must be an object", where.empty() ? "config" : where));
    for (const auto &item : j.items()) {
        bool ok = false;
        for (auto a : allowed)
            ok = ok || item.key() == a;
        if (!ok)
            throw ConfigError(fmt::format("unknown key '{}'", path_of(where, item.key())));
    }
}

double number(const json &j, std::string_view key, std::string_view where) {
    const auto &v = j.at(std::string(key));
    if (!v.is_number())
        throw ConfigError(fmt::format("'{}' must be a number", path_of(where, key)));
    return v.get<double>();
}

double number_or(const json &j, std::string_view key, double fallback, std::string_view where) {
    return j.contains(std::string(key)) ? number(j, key, where) : fallback;
}

std::size_t count_or(const json &j, std::string_view key, std::size_t fallback, std::string_view where) {
    if (!j.contains(std::string(key)))
        return fallback;
    const auto &v = j.at(std::string(key));
    if (!v.is_number_unsigned())
        throw ConfigError(fmt::format("'{}' must be a nonnegative integer", path_of(where, key)));
    return v.get<std::size_t>();
}

std::string text(const json &j, std::string_view key, std::string_view where) {
    const auto &v = j.at(std::string(key));
    if (!v.is_string())
        throw ConfigError(fmt::format("'{}' must be a string", path_of(where, key)));
    return v.get<std::string>();
}

std::vector<double> numbers(const json &j, std::string_view key, std::string_view where) {
    const auto &v = j.at(std::string(key));
    if (!v.is_array())
        throw ConfigError(fmt::format("'{}' must be a list of numbers", path_of(where, key)));
    std::vector<double> out;
    for (const auto &x : v) {
        if (!x.is_number())
            throw ConfigError(fmt::format("'{}' must be a list of numbers", path_of(where, key)));
        out.push_back(x.get<double>());
    }
    return out;
}

// Runs f, turning library errors into config errors that name the key.
template <class F>
auto guarded(std::string_view key, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(fmt::format("'{}': {}", key, e.what()));
    }
}

NoiseSpec parse_noise(const json &j) {
    reject_unknown(j, {"kind", "epsilon"}, "noise");
    NoiseSpec n;
    if (j.contains("kind"))
        n.kind = guarded("noise.kind", [&] { return noise_kind_from_string(text(j, "kind", "noise")); });
    n.epsilon = number_or(j, "epsilon", 0.0, "noise");
    if (!(n.epsilon >= 0.0))
        throw ConfigError("'noise.epsilon' must be nonnegative");
    return n;
}

TimeGrid parse_grid(const json &j) {
    if (j.is_string())
        return preset_grid(guarded("grid", [&] { return grid_preset_from_string(j.get<std::string>()); }));
    if (!j.is_array())
        throw ConfigError("'grid' must be a preset name or a list of times");
    std::vector<double> t;
    for (const auto &x : j) {
        if (!x.is_number())
            throw ConfigError("'grid' must be a list of numbers");
        t.push_back(x.get<double>());
    }
    return guarded("grid", [&] { return TimeGrid(std::move(t)); });
}

RegGrids parse_reg(const json &j, double t_end) {
    reject_unknown(j, {"lambda1", "xi1", "k1", "that1", "xi2", "k2"}, "reg");
    RegGrids g = RegGrids::defaults(t_end);
    g.lambda1 = number_or(j, "lambda1", g.lambda1, "reg");
    g.xi1 = number_or(j, "xi1", g.xi1, "reg");
    g.k1 = count_or(j, "k1", g.k1, "reg");
    g.that1 = number_or(j, "that1", g.that1, "reg");
    g.xi2 = number_or(j, "xi2", g.xi2, "reg");
    g.k2 = count_or(j, "k2", g.k2, "reg");
    if (!(g.lambda1 > 0.0))
        throw ConfigError("'reg.lambda1' must be positive");
    if (!(g.xi1 > 0.0 && g.xi1 < 1.0))
        throw ConfigError(fmt::format("'reg.xi1' = {} must lie in (0,1)", g.xi1));
    if (!(g.xi2 > 0.0 && g.xi2 < 1.0))
        throw ConfigError(fmt::format("'reg.xi2' = {} must lie in (0,1)", g.xi2));
    if (g.k1 < 2)
        throw ConfigError("'reg.k1' must be at least 2");
    if (g.k2 < 2)
        throw ConfigError("'reg.k2' must be at least 2");
    if (!(g.that1 > 0.0 && g.that1 <= t_end))
        throw ConfigError(fmt::format("'reg.that1' = {} must lie in (0, t_K = {}]", g.that1, t_end));
    return g;
}

BasisSpec parse_basis(const json &j, std::optional<BasisSpec> preset, double t_end) {
    reject_unknown(j, {"exponents", "multiples", "reference", "size", "rho", "t_end"}, "basis");
    BasisSpec b = preset ? *preset : BasisSpec{};
    b.t_end = number_or(j, "t_end", t_end, "basis");
    if (j.contains("exponents")) {
        if (j.contains("multiples") || j.contains("reference"))
            throw ConfigError("'basis.exponents' excludes 'basis.multiples' and 'basis.reference'");
        b.power_exponents = numbers(j, "exponents", "basis");
    } else if (j.contains("reference")) {
        const double ref = number(j, "reference", "basis");
        b.power_exponents = j.contains("multiples") ? scaled_exponents(ref, numbers(j, "multiples", "basis"))
                                                    : scaled_exponents(ref);
    } else if (j.contains("multiples")) {
        throw ConfigError("'basis.multiples' needs 'basis.reference'");
    } else if (!preset) {
        throw ConfigError("'basis' needs 'exponents' or 'reference' for this scenario");
    }
    b.total_size = count_or(j, "size", preset ? preset->total_size : 9, "basis");
    b.rho = number_or(j, "rho", preset ? preset->rho : 0.99, "basis");
    guarded("basis", [&] {
        b.validate();
        return 0;
    });
    return b;
}

std::function<double(double, double)> parse_nonlinearity(const json &j, std::string_view where) {
    reject_unknown(j, {"kind", "coefficient", "coefficients"}, where);
    const std::string kind = j.contains("kind") ? text(j, "kind", where) : "none";
    if (kind == "none")
        return {};
    if (kind == "sin-damped") {
        const double a = number_or(j, "coefficient", -0.1, where);
        return [a](double, double v) { return a * std::sin(v); };
    }
    if (kind == "polynomial") {
        const auto c = numbers(j, "coefficients", where);
        return [c](double, double v) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it)
                acc = acc * v + *it;
            return acc;
        };
    }
    throw ConfigError(fmt::format("'{}.kind' must be none, sin-damped or polynomial", where));
}

Observation sample_solution(const FodeSolution &sol, const TimeGrid &grid, double v0) {
    const SampledFunction v(sol.times, sol.values);
    Observation obs{grid, {}, v0, {}};
    for (double t : grid.points()) {
        if (t > sol.times.back())
            throw ConfigError("'grid' extends beyond the fode horizon");
        obs.values.push_back(v.value_at(t));
    }
    obs.meta.scenario = "fode";
    return obs;
}

} // namespace

std::pair<FodeProblem, FodeMesh> parse_fode_problem(const json &j, std::string_view where) {
    reject_unknown(j,
                   {"orders", "coefficients", "negative_orders", "negative_coefficients", "kernel", "source",
                    "nonlinearity", "v0", "horizon", "steps", "grading"},
                   where);
    json fdo_json = json::object();
    for (const char *k : {"orders", "coefficients", "negative_orders", "negative_coefficients"})
        if (j.contains(k))
            fdo_json[k] = j.at(k);
    const FdoDescriptor fdo = fdo_from_json(fdo_json, where);
    const PowerSum kernel =
        j.contains("kernel") ? power_sum_from_json(j.at("kernel"), path_of(where, "kernel")) : PowerSum{};
    auto nonlinearity = j.contains("nonlinearity")
                            ? parse_nonlinearity(j.at("nonlinearity"), path_of(where, "nonlinearity"))
                            : std::function<double(double, double)>{};
    const double v0 = number_or(j, "v0", 0.0, where);
    const double horizon = number_or(j, "horizon", 1.0, where);
    if (!(horizon > 0.0))
        throw ConfigError(fmt::format("'{}' must be positive", path_of(where, "horizon")));

    FodeProblem p;
    if (!j.contains("source"))
        throw ConfigError(fmt::format("'{}' is required", path_of(where, "source")));
    const auto &src = j.at("source");
    if (src.is_string() && src.get<std::string>() == "manufactured") {
        p = guarded(path_of(where, "source"), [&] { return manufactured_power_problem(fdo, kernel, nonlinearity, v0, horizon); });
    } else {
        const PowerSum f0 = power_sum_from_json(src, path_of(where, "source"));
        p.fdo = fdo;
        p.kernel = kernel;
        p.nonlinearity = nonlinearity;
        p.v0 = v0;
        p.horizon = horizon;
        p.f0 = [f0](double t) { return f0(t); };
    }

    FodeMesh mesh;
    mesh.steps = count_or(j, "steps", 4096, where);
    if (mesh.steps < 4)
        throw ConfigError(fmt::format("'{}' must be at least 4", path_of(where, "steps")));
    mesh.grading = optimal_grading(fdo.leading_order());
    if (j.contains("grading")) {
        const auto &g = j.at("grading");
        if (g.is_string() && g.get<std::string>() == "optimal") {
        } else if (g.is_number() && g.get<double>() >= 1.0) {
            mesh.grading = g.get<double>();
        } else {
            throw ConfigError(fmt::format("'{}' must be \"optimal\" or a number >= 1", path_of(where, "grading")));
        }
    }
    guarded(where, [&] {
        p.validate();
        return 0;
    });
    return {std::move(p), mesh};
}

ExperimentConfig parse_experiment_config(const json &doc, const std::filesystem::path &base_dir) {
    reject_unknown(doc,
                   {"scenario", "nu0", "fdo_type", "noise", "grid", "observation", "fdo", "fode", "basis", "reg",
                    "log_selection", "output_dir"},
                   "");
    if (!doc.contains("scenario"))
        throw ConfigError("'scenario' is required");
    ExperimentConfig cfg;
    cfg.scenario = text(doc, "scenario", "");
    const NoiseSpec noise = doc.contains("noise") ? parse_noise(doc.at("noise")) : NoiseSpec{};
    std::optional<BasisSpec> preset_basis;

    if (cfg.scenario == "example71" || cfg.scenario == "example72") {
        for (const char *k : {"observation", "fode"})
            if (doc.contains(k))
                throw ConfigError(fmt::format("'{}' is not used by scenario {}", k, cfg.scenario));
        if (!doc.contains("nu0"))
            throw ConfigError("'nu0' is required for the example scenarios");
        const double nu0 = number(doc, "nu0", "");
        if (!(nu0 > 0.0 && nu0 < 1.0))
            throw ConfigError(fmt::format("'nu0' = {} must lie in (0,1)", nu0));
        const bool e71 = cfg.scenario == "example71";
        const TimeGrid grid = doc.contains("grid")
                                  ? parse_grid(doc.at("grid"))
                                  : preset_grid(e71 ? GridPreset::Nonuniform71 : GridPreset::Uniform72);
        FdoKind kind = FdoKind::TypeI;
        if (doc.contains("fdo_type")) {
            kind = guarded("fdo_type", [&] { return fdo_kind_from_string(text(doc, "fdo_type", "")); });
            if (!e71 && kind != FdoKind::TypeI)
                throw ConfigError("'fdo_type' must be I for example72");
        }
        Scenario sc = guarded("scenario", [&] {
            return e71 ? example71_scenario(nu0, kind, noise, grid) : example72_scenario(nu0, noise, grid);
        });
        cfg.observation = std::move(sc.observation);
        cfg.fdo = std::move(sc.fdo);
        preset_basis = example_basis(e71 ? Example::E71 : Example::E72, nu0, grid.last());
    } else if (cfg.scenario == "observation") {
        if (!doc.contains("observation"))
            throw ConfigError("'observation' is required for scenario observation");
        const auto &o = doc.at("observation");
        reject_unknown(o, {"csv", "sidecar"}, "observation");
        if (!o.contains("csv"))
            throw ConfigError("'observation.csv' is required");
        const auto csv = base_dir / text(o, "csv", "observation");
        std::optional<std::filesystem::path> side;
        if (o.contains("sidecar"))
            side = base_dir / text(o, "sidecar", "observation");
        auto loaded = load_observation(csv, side);
        cfg.observation = std::move(loaded.observation);
        if (loaded.fdo)
            cfg.fdo = *loaded.fdo;
        else if (!doc.contains("fdo"))
            throw ConfigError("no operator: give 'fdo' or store it in the observation sidecar");
    } else if (cfg.scenario == "fode") {
        if (!doc.contains("fode") || !doc.contains("grid"))
            throw ConfigError("scenario fode needs 'fode' and 'grid'");
        auto [problem, mesh] = parse_fode_problem(doc.at("fode"), "fode");
        const TimeGrid grid = parse_grid(doc.at("grid"));
        const FodeSolution sol = guarded("fode", [&] { return solve(problem, mesh); });
        cfg.observation = sample_solution(sol, grid, problem.v0);
        cfg.fdo = problem.fdo;
    } else {
        throw ConfigError(fmt::format("'scenario' must be example71, example72, observation or fode, got '{}'",
                                      cfg.scenario));
    }

    if (doc.contains("fdo"))
        cfg.fdo = fdo_from_json(doc.at("fdo"), "fdo");
    const double t_end = cfg.observation.grid.last();
    if (doc.contains("basis"))
        cfg.basis = parse_basis(doc.at("basis"), preset_basis, t_end);
    else if (preset_basis)
        cfg.basis = *preset_basis;
    else
        throw ConfigError("'basis' is required for this scenario");
    cfg.grids = doc.contains("reg") ? parse_reg(doc.at("reg"), cfg.basis.t_end) : RegGrids::defaults(cfg.basis.t_end);
    if (doc.contains("log_selection"))
        cfg.options.log_selection =
            guarded("log_selection", [&] { return log_selection_from_string(text(doc, "log_selection", "")); });
    if (doc.contains("output_dir"))
        cfg.output_dir = text(doc, "output_dir", "");
    return cfg;
}

namespace {

json parse_file(const std::filesystem::path &path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error &e) {
        throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

} // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
    return parse_experiment_config(parse_file(path), path.parent_path());
}

FodeConfig parse_fode_config(const json &doc) {
    if (!doc.is_object())
        throw ConfigError("fode config must be a JSON object");
    json problem_doc = doc;
    problem_doc.erase("verify_linking");
    problem_doc.erase("output");
    auto [problem, mesh] = parse_fode_problem(problem_doc, "");
    FodeConfig cfg{std::move(problem), mesh, false, std::nullopt};
    if (doc.contains("verify_linking")) {
        if (!doc.at("verify_linking").is_boolean())
            throw ConfigError("'verify_linking' must be true or false");
        cfg.verify_linking = doc.at("verify_linking").get<bool>();
    }
    if (doc.contains("output"))
        cfg.output = text(doc, "output", "");
    return cfg;
}

FodeConfig load_fode_config(const std::filesystem::path &path) {
    return parse_fode_config(parse_file(path));
}

} // namespace fracorder
