#include "fracorder/obsmodel.hpp"

#include "fracorder/errors.hpp"
#include "fracorder/fraccalc.hpp"

#include <cmath>
#include <string>

namespace fracorder {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty())
        throw DomainError("time grid must not be empty");
    for (std::size_t k = 0; k < points_.size(); ++k) {
        if (!(points_[k] > 0.0))
            throw DomainError("time grid points must be positive");
        if (k > 0 && !(points_[k] > points_[k - 1]))
            throw DomainError("time grid points must be strictly increasing");
    }
    if (!(points_.back() < 1.0))
        throw DomainError("time grid must end before t = 1");
}

TimeGrid preset_grid(GridPreset kind) {
    std::vector<double> t;
    t.reserve(21);
    if (kind == GridPreset::Nonuniform71) {
        t.push_back(5 * kPresetTau);
        t.push_back(6 * kPresetTau);
        for (int k = 3; k <= 21; ++k)
            t.push_back((9 + k) * kPresetTau);
    } else {
        for (int k = 1; k <= 21; ++k)
            t.push_back(k * kPresetTau);
    }
    return TimeGrid(std::move(t));
}

GridPreset grid_preset_from_string(std::string_view text) {
    if (text == "nonuniform71")
        return GridPreset::Nonuniform71;
    if (text == "uniform72")
        return GridPreset::Uniform72;
    throw DomainError("unknown grid preset '" + std::string(text) +
                      "' (expected nonuniform71 or uniform72)");
}

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::N1: return "N1";
    case NoiseKind::N2: return "N2";
    case NoiseKind::N3: return "N3";
    }
    return "none";
}

NoiseKind noise_kind_from_string(std::string_view text) {
    if (text == "none")
        return NoiseKind::None;
    if (text == "N1")
        return NoiseKind::N1;
    if (text == "N2")
        return NoiseKind::N2;
    if (text == "N3")
        return NoiseKind::N3;
    throw DomainError("unknown noise kind '" + std::string(text) + "' (expected none, N1, N2, N3)");
}

double noise_value(const NoiseSpec &spec, double t, double nu0) {
    if (!(t > 0.0 && t < 1.0))
        throw DomainError("noise_value: time must lie in (0,1)");
    if (!(spec.epsilon >= 0.0))
        throw DomainError("noise_value: epsilon must be nonnegative");
    const double abs_log = -std::log(t);
    switch (spec.kind) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::N1: return spec.epsilon * t * abs_log;
    case NoiseKind::N2: return spec.epsilon * std::pow(t, nu0);
    case NoiseKind::N3: return spec.epsilon * std::pow(t, nu0) * abs_log;
    }
    return 0.0;
}

void Observation::validate() const {
    if (values.size() != grid.size())
        throw DomainError("observation has " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid.size()) + " grid points");
    for (double v : values)
        if (!std::isfinite(v))
            throw DomainError("observation values must be finite");
    if (!std::isfinite(psi0))
        throw DomainError("observation initial value must be finite");
}

namespace {

void check_order(double nu0) {
    if (!(nu0 > 0.0 && nu0 < 1.0))
        throw DomainError("nu0 must lie in (0,1)");
}

template <class Exact>
Observation observe(const TimeGrid &grid, double psi0, double nu0, const NoiseSpec &noise,
                    std::string scenario, Exact exact) {
    std::vector<double> values;
    values.reserve(grid.size());
    for (double t : grid.points())
        values.push_back(exact(t) + noise_value(noise, t, nu0));
    return Observation{grid, std::move(values), psi0, ObservationMeta{std::move(scenario), nu0, noise}};
}

} // namespace

FdoDescriptor example71_fdo(double nu0, FdoKind kind) {
    check_order(nu0);
    FdoDescriptor fdo;
    fdo.kind = kind;
    fdo.orders = {nu0, nu0 / 3.0};
    fdo.coefficients = {PowerSum{{1.0, 0.0}, {1.0, 1.0}}, PowerSum::constant(0.5)};
    fdo.negative_orders = {nu0 / 2.0};
    fdo.negative_coefficients = {PowerSum{{0.5, 0.0}, {0.5, 2.0}}};
    return fdo;
}

Observation example71_observation(double nu0, FdoKind kind, const NoiseSpec &noise,
                                  const TimeGrid &grid) {
    check_order(nu0);
    const double scale = 1.0 / gamma_fn(1.0 + nu0);
    // cos(pi/2) is zero analytically; the floating-point residue is dropped.
    return observe(grid, 0.0, nu0, noise,
                   kind == FdoKind::TypeI ? "example71-I" : "example71-II",
                   [&](double t) { return scale * std::pow(t, nu0); });
}

Scenario example71_scenario(double nu0, FdoKind kind, const NoiseSpec &noise, const TimeGrid &grid) {
    return Scenario{example71_observation(nu0, kind, noise, grid), example71_fdo(nu0, kind)};
}

FdoDescriptor example72_fdo(double nu0) {
    check_order(nu0);
    FdoDescriptor fdo;
    fdo.kind = FdoKind::TypeI;
    fdo.orders = {nu0, nu0 / 5.0};
    fdo.coefficients = {PowerSum::constant(0.5), PowerSum{{-0.25, 0.0}, {-0.25, 2.0}}};
    return fdo;
}

Observation example72_observation(double nu0, const NoiseSpec &noise, const TimeGrid &grid) {
    check_order(nu0);
    constexpr double spatial = 256.0 / 225.0;
    return observe(grid, 2.0 * spatial, nu0, noise, "example72",
                   [&](double t) { return spatial * (2.0 + std::pow(t, nu0)); });
}

Scenario example72_scenario(double nu0, const NoiseSpec &noise, const TimeGrid &grid) {
    return Scenario{example72_observation(nu0, noise, grid), example72_fdo(nu0)};
}

} // namespace fracorder
