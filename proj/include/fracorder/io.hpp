#pragma once

#include "fracorder/fodesolver.hpp"
#include "fracorder/fraccalc.hpp"
#include "fracorder/obsmodel.hpp"
#include "fracorder/orderest.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace fracorder {

/// Shortest decimal text that reads back to the same double; "nan" for NaN.
std::string format_double(double v);
/// Strict parse of a whole field; throws ConfigError naming the context.
double parse_double(std::string_view text, std::string_view context);

std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, const std::string &text);

nlohmann::json power_sum_to_json(const PowerSum &p);
PowerSum power_sum_from_json(const nlohmann::json &j, std::string_view key);
nlohmann::json fdo_to_json(const FdoDescriptor &fdo);
FdoDescriptor fdo_from_json(const nlohmann::json &j, std::string_view key);

/// CSV `t,psi` (grid nodes only; psi0 lives in the sidecar).
std::string observation_csv(const Observation &obs);
nlohmann::json observation_sidecar(const Observation &obs, const std::optional<FdoDescriptor> &fdo);

struct LoadedObservation {
    Observation observation;
    std::optional<FdoDescriptor> fdo;
};

/// Sidecar defaults to the CSV path with extension .json.
LoadedObservation load_observation(const std::filesystem::path &csv,
                                   const std::optional<std::filesystem::path> &sidecar = std::nullopt);
void save_observation(const std::filesystem::path &csv, const Observation &obs,
                      const std::optional<FdoDescriptor> &fdo);

/// i,j,lambda,that,nu_ratio,nu_log,flag with 1-based indices.
std::string diagnostics_csv(const EstimateReport &rep);
nlohmann::json report_to_json(const EstimateReport &rep, const Observation &obs, const FdoDescriptor &fdo);
/// nu_ratio=... nu_log=... lambda=... that=...
std::string summary_line(const EstimateReport &rep);

/// CSV `t,v`.
std::string solution_csv(const FodeSolution &sol);

/// Sampled function from a two-column CSV with a header line.
SampledFunction read_sampled_csv(const std::filesystem::path &path);
std::string sampled_csv(const SampledFunction &f, std::string_view header);

} // namespace fracorder
