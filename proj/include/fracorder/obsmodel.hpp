#pragma once

#include "fracorder/fdo.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracorder {

/// Observation times 0 < t_1 < ... < t_K < 1.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    const std::vector<double> &points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double last() const noexcept { return points_.back(); }

private:
    std::vector<double> points_;
};

enum class GridPreset {
    Nonuniform71, ///< t_1 = 5tau, t_2 = 6tau, t_k = (9+k)tau for k = 3..21
    Uniform72,    ///< t_k = k tau, k = 1..21
};

inline constexpr double kPresetTau = 1e-4;

TimeGrid preset_grid(GridPreset kind);
GridPreset grid_preset_from_string(std::string_view text);

enum class NoiseKind { None, N1, N2, N3 };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view text);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double epsilon = 0.0;
};

/// Deterministic nonnegative perturbation added to the exact measurement at
/// time t in (0,1). The true order nu0 enters the N2 and N3 shapes.
double noise_value(const NoiseSpec &spec, double t, double nu0);

struct ObservationMeta {
    std::string scenario;
    std::optional<double> nu_true;
    NoiseSpec noise;
};

/// Measurements psi_{k,eps} on a grid together with the exact initial value.
struct Observation {
    TimeGrid grid;
    std::vector<double> values;
    double psi0 = 0.0;
    ObservationMeta meta;

    void validate() const;
};

/// Observation paired with the operator that generated it.
struct Scenario {
    Observation observation;
    FdoDescriptor fdo;
};

/// Local observation at x0 = 1/2 of u = cos(pi x) + t^{nu0}/Gamma(1+nu0).
Scenario example71_scenario(double nu0, FdoKind kind, const NoiseSpec &noise, const TimeGrid &grid);
Observation example71_observation(double nu0, FdoKind kind, const NoiseSpec &noise,
                                  const TimeGrid &grid);
FdoDescriptor example71_fdo(double nu0, FdoKind kind);

/// Nonlocal observation over (0,2)^2 of u = x1^2 x2^2 (2-x1)^2 (2-x2)^2 (2 + t^{nu0}).
Scenario example72_scenario(double nu0, const NoiseSpec &noise, const TimeGrid &grid);
Observation example72_observation(double nu0, const NoiseSpec &noise, const TimeGrid &grid);
FdoDescriptor example72_fdo(double nu0);

/// Integral of x^2 (2-x)^2 over (0,2).
inline constexpr double kExample72SpatialFactor = 16.0 / 15.0;

} // namespace fracorder
