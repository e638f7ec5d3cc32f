#pragma once

#include "fracorder/fodesolver.hpp"
#include "fracorder/obsmodel.hpp"
#include "fracorder/orderest.hpp"
#include "fracorder/regbasis.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace fracorder {

/// One estimation run, fully resolved from a JSON document.
struct ExperimentConfig {
    std::string scenario; ///< example71 | example72 | observation | fode
    Observation observation{TimeGrid({0.5}), {}, 0.0, {}};
    FdoDescriptor fdo;
    BasisSpec basis;
    RegGrids grids;
    PipelineOptions options;
    std::filesystem::path output_dir = ".";
};

struct FodeConfig {
    FodeProblem problem;
    FodeMesh mesh;
    bool verify_linking = false;
    std::optional<std::filesystem::path> output;
};

/// Relative input paths are taken relative to base_dir; output paths stay
/// relative to the working directory.
ExperimentConfig parse_experiment_config(const nlohmann::json &doc, const std::filesystem::path &base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

FodeConfig parse_fode_config(const nlohmann::json &doc);
FodeConfig load_fode_config(const std::filesystem::path &path);

/// The problem block shared by fode configs and the fode estimation scenario.
/// Returns the problem and the mesh.
std::pair<FodeProblem, FodeMesh> parse_fode_problem(const nlohmann::json &j, std::string_view where);

} // namespace fracorder
