#include "fracorder/io.hpp"

#include "fracorder/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracorder {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    return fmt::format("{}", v);
}

double parse_double(std::string_view text, std::string_view context) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(fmt::format("{}: cannot parse number '{}'", context, text));
    return v;
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out)
        throw ConfigError(fmt::format("write to '{}' failed", path.string()));
}

json power_sum_to_json(const PowerSum &p) {
    json out = json::array();
    for (const auto &[c, e] : p.terms())
        out.push_back(json::array({c, e}));
    return out;
}

PowerSum power_sum_from_json(const json &j, std::string_view key) {
    if (!j.is_array())
        throw ConfigError(fmt::format("'{}' must be a list of [coefficient, exponent] pairs", key));
    std::vector<PowerSum::Term> terms;
    for (const auto &item : j) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
            throw ConfigError(fmt::format("'{}' must be a list of [coefficient, exponent] pairs", key));
        terms.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    try {
        return PowerSum(std::move(terms));
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("'{}': {}", key, e.what()));
    }
}

json fdo_to_json(const FdoDescriptor &fdo) {
    json coeffs = json::array();
    for (const auto &c : fdo.coefficients)
        coeffs.push_back(power_sum_to_json(c));
    json out = {{"type", std::string(to_string(fdo.kind))}, {"orders", fdo.orders}, {"coefficients", coeffs}};
    if (!fdo.negative_orders.empty()) {
        json neg = json::array();
        for (const auto &c : fdo.negative_coefficients)
            neg.push_back(power_sum_to_json(c));
        out["negative_orders"] = fdo.negative_orders;
        out["negative_coefficients"] = neg;
    }
    return out;
}

namespace {

void reject_unknown(const json &j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto &item : j.items()) {
        bool ok = false;
        for (auto a : allowed)
            ok = ok || item.key() == a;
        if (!ok)
            throw ConfigError(fmt::format("unknown key '{}' in {}", item.key(), where));
    }
}

std::vector<double> number_list(const json &j, std::string_view key) {
    if (!j.is_array())
        throw ConfigError(fmt::format("'{}' must be a list of numbers", key));
    std::vector<double> out;
    for (const auto &x : j) {
        if (!x.is_number())
            throw ConfigError(fmt::format("'{}' must be a list of numbers", key));
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

FdoDescriptor fdo_from_json(const json &j, std::string_view key) {
    if (!j.is_object())
        throw ConfigError(fmt::format("'{}' must be an object", key));
    reject_unknown(j, {"type", "orders", "coefficients", "negative_orders", "negative_coefficients"}, key);
    FdoDescriptor fdo;
    try {
        if (j.contains("type"))
            fdo.kind = fdo_kind_from_string(j.at("type").get<std::string>());
        if (!j.contains("orders") || !j.contains("coefficients"))
            throw ConfigError(fmt::format("'{}' needs 'orders' and 'coefficients'", key));
        fdo.orders = number_list(j.at("orders"), fmt::format("{}.orders", key));
        for (const auto &c : j.at("coefficients"))
            fdo.coefficients.push_back(power_sum_from_json(c, fmt::format("{}.coefficients", key)));
        if (j.contains("negative_orders"))
            fdo.negative_orders = number_list(j.at("negative_orders"), fmt::format("{}.negative_orders", key));
        if (j.contains("negative_coefficients"))
            for (const auto &c : j.at("negative_coefficients"))
                fdo.negative_coefficients.push_back(
                    power_sum_from_json(c, fmt::format("{}.negative_coefficients", key)));
        fdo.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(fmt::format("'{}': {}", key, e.what()));
    }
    return fdo;
}

std::string observation_csv(const Observation &obs) {
    std::string out = "t,psi\n";
    for (std::size_t k = 0; k < obs.values.size(); ++k)
        out += fmt::format("{},{}\n", format_double(obs.grid.points()[k]), format_double(obs.values[k]));
    return out;
}

json observation_sidecar(const Observation &obs, const std::optional<FdoDescriptor> &fdo) {
    json out = {{"psi0", obs.psi0},
                {"scenario", obs.meta.scenario},
                {"noise", {{"kind", std::string(to_string(obs.meta.noise.kind))}, {"epsilon", obs.meta.noise.epsilon}}}};
    out["nu_true"] = obs.meta.nu_true ? json(*obs.meta.nu_true) : json(nullptr);
    if (fdo)
        out["fdo"] = fdo_to_json(*fdo);
    return out;
}

namespace {

std::vector<std::pair<double, double>> read_two_columns(const std::filesystem::path &path,
                                                        std::string_view expected_header) {
    const std::string text = read_text(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(fmt::format("'{}' is empty", path.string()));
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (!expected_header.empty() && line != expected_header)
        throw ConfigError(fmt::format("'{}': header must be '{}'", path.string(), expected_header));
    std::vector<std::pair<double, double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ConfigError(fmt::format("'{}' line {}: expected two fields", path.string(), lineno));
        const std::string ctx = fmt::format("'{}' line {}", path.string(), lineno);
        rows.emplace_back(parse_double(std::string_view(line).substr(0, comma), ctx),
                          parse_double(std::string_view(line).substr(comma + 1), ctx));
    }
    return rows;
}

} // namespace

LoadedObservation load_observation(const std::filesystem::path &csv,
                                   const std::optional<std::filesystem::path> &sidecar) {
    const auto rows = read_two_columns(csv, "t,psi");
    std::filesystem::path side = sidecar ? *sidecar : std::filesystem::path(csv).replace_extension(".json");
    json meta;
    try {
        meta = json::parse(read_text(side));
    } catch (const json::parse_error &e) {
        throw ConfigError(fmt::format("'{}': {}", side.string(), e.what()));
    }
    if (!meta.is_object())
        throw ConfigError(fmt::format("'{}' must hold a JSON object", side.string()));
    reject_unknown(meta, {"psi0", "scenario", "noise", "nu_true", "fdo"}, side.string());
    if (!meta.contains("psi0") || !meta.at("psi0").is_number())
        throw ConfigError(fmt::format("'{}': numeric 'psi0' is required", side.string()));

    std::vector<double> t, v;
    for (const auto &[a, b] : rows) {
        t.push_back(a);
        v.push_back(b);
    }
    LoadedObservation out{Observation{TimeGrid(std::vector<double>{0.5}), {}, 0.0, {}}, std::nullopt};
    try {
        out.observation.grid = TimeGrid(std::move(t));
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("'{}': {}", csv.string(), e.what()));
    }
    out.observation.values = std::move(v);
    out.observation.psi0 = meta.at("psi0").get<double>();
    if (meta.contains("scenario"))
        out.observation.meta.scenario = meta.at("scenario").get<std::string>();
    if (meta.contains("nu_true") && !meta.at("nu_true").is_null())
        out.observation.meta.nu_true = meta.at("nu_true").get<double>();
    if (meta.contains("noise")) {
        const auto &n = meta.at("noise");
        reject_unknown(n, {"kind", "epsilon"}, "noise");
        out.observation.meta.noise.kind = noise_kind_from_string(n.value("kind", std::string("none")));
        out.observation.meta.noise.epsilon = n.value("epsilon", 0.0);
    }
    if (meta.contains("fdo"))
        out.fdo = fdo_from_json(meta.at("fdo"), "fdo");
    out.observation.validate();
    return out;
}

void save_observation(const std::filesystem::path &csv, const Observation &obs,
                      const std::optional<FdoDescriptor> &fdo) {
    write_text(csv, observation_csv(obs));
    write_text(std::filesystem::path(csv).replace_extension(".json"), observation_sidecar(obs, fdo).dump(2) + "\n");
}

std::string diagnostics_csv(const EstimateReport &rep) {
    std::string out = "i,j,lambda,that,nu_ratio,nu_log,flag\n";
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
        for (std::size_t j = 0; j < rep.thats.size(); ++j) {
            const bool rf = rep.ratio_table.failed(i, j);
            const bool lf = rep.log_table.failed(i, j);
            const char *flag = rf && lf ? "both_failed" : rf ? "ratio_failed" : lf ? "log_failed" : "ok";
            out += fmt::format("{},{},{},{},{},{},{}\n", i + 1, j + 1, format_double(rep.lambdas[i]),
                               format_double(rep.thats[j]), format_double(rep.ratio_table.value(i, j)),
                               format_double(rep.log_table.value(i, j)), flag);
        }
    return out;
}

namespace {

json selection_json(const EstimateReport &rep, const std::optional<Selection> &s) {
    if (!s)
        return nullptr;
    return {{"i", s->lambda_index + 1},
            {"j", s->that_index + 1},
            {"lambda", rep.lambdas[s->lambda_index]},
            {"that", rep.thats[s->that_index]}};
}

} // namespace

json report_to_json(const EstimateReport &rep, const Observation &obs, const FdoDescriptor &fdo) {
    json out;
    out["status"] = rep.ok() ? "ok" : "selection_failure";
    if (!rep.ok())
        out["failure"] = rep.failure;
    out["scenario"] = obs.meta.scenario;
    out["nu_true"] = obs.meta.nu_true ? json(*obs.meta.nu_true) : json(nullptr);
    out["fdo_type"] = std::string(to_string(fdo.kind));
    out["log_selection"] = std::string(to_string(rep.log_selection));
    out["nu_ratio"] = rep.ratio_selection ? json(rep.nu_ratio) : json(nullptr);
    out["nu_log"] = rep.log_selection_pair ? json(rep.nu_log) : json(nullptr);
    out["ratio_selection"] = selection_json(rep, rep.ratio_selection);
    out["log_selection_pair"] = selection_json(rep, rep.log_selection_pair);
    out["grid_sizes"] = {{"k1", rep.lambdas.size()}, {"k2", rep.thats.size()}};
    return out;
}

std::string summary_line(const EstimateReport &rep) {
    const auto &s = rep.ratio_selection;
    return fmt::format("nu_ratio={} nu_log={} lambda={} that={}",
                       rep.ratio_selection ? format_double(rep.nu_ratio) : "nan",
                       rep.log_selection_pair ? format_double(rep.nu_log) : "nan",
                       s ? format_double(rep.lambdas[s->lambda_index]) : "nan",
                       s ? format_double(rep.thats[s->that_index]) : "nan");
}

std::string solution_csv(const FodeSolution &sol) {
    std::string out = "t,v\n";
    for (std::size_t n = 0; n < sol.times.size(); ++n)
        out += fmt::format("{},{}\n", format_double(sol.times[n]), format_double(sol.values[n]));
    return out;
}

SampledFunction read_sampled_csv(const std::filesystem::path &path) {
    const auto rows = read_two_columns(path, "");
    std::vector<double> t, v;
    for (const auto &[a, b] : rows) {
        t.push_back(a);
        v.push_back(b);
    }
    try {
        return SampledFunction(std::move(t), std::move(v));
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

std::string sampled_csv(const SampledFunction &f, std::string_view header) {
    std::string out = std::string(header) + "\n";
    for (std::size_t n = 0; n < f.size(); ++n)
        out += fmt::format("{},{}\n", format_double(f.times()[n]), format_double(f.values()[n]));
    return out;
}

} // namespace fracorder
