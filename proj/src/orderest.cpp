#include "fracorder/orderest.hpp"

#include "fracorder/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace fracorder {

RegGrids RegGrids::defaults(double t_end) {
    RegGrids g;
    g.that1 = t_end;
    return g;
}

void RegGrids::validate(double t_end) const {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
        throw DomainError("reg grids: lambda1 must be positive");
    if (!(xi1 > 0.0 && xi1 < 1.0))
        throw DomainError(fmt::format("reg grids: xi1 = {} must lie in (0,1)", xi1));
    if (!(xi2 > 0.0 && xi2 < 1.0))
        throw DomainError(fmt::format("reg grids: xi2 = {} must lie in (0,1)", xi2));
    if (k1 < 2 || k2 < 2)
        throw DomainError("reg grids: K1 and K2 must be at least 2");
    if (!(that1 > 0.0) || that1 > t_end)
        throw DomainError(fmt::format("reg grids: that1 = {} must lie in (0, t_K = {}]", that1, t_end));
}

std::vector<double> RegGrids::lambdas() const {
    std::vector<double> out(k1);
    for (std::size_t i = 0; i < k1; ++i)
        out[i] = lambda1 * std::pow(xi1, static_cast<double>(i));
    return out;
}

std::vector<double> RegGrids::thats() const {
    std::vector<double> out(k2);
    for (std::size_t j = 0; j < k2; ++j)
        out[j] = that1 * std::pow(xi2, static_cast<double>(j));
    return out;
}

double ratio_estimate(const FitModel &m, double psi0, const FdoDescriptor &fdo, double that) {
    const PowerSum &r0 = fdo.r0();
    double num = 0.0;
    double den = 0.0;
    if (fdo.kind == FdoKind::TypeI || r0.is_constant()) {
        num = that * (model_eval(m, that) - psi0);
        den = model_integral(m, that) - psi0 * that;
    } else {
        const double r00 = r0(0.0);
        num = that * (r0(that) * model_eval(m, that) - r00 * psi0);
        den = model_integral_weighted(m, r0, that) - r00 * psi0 * that;
    }
    if (!(std::abs(den) >= 1e-300))
        throw DegenerateError("ratio estimate: vanishing denominator");
    return num / den - 1.0;
}

double log_estimate(const FitModel &m, double psi0, const FdoDescriptor &fdo, double that) {
    if (!(that < 1.0))
        throw DomainError("log estimate: that must be below 1");
    const PowerSum &r0 = fdo.r0();
    double arg = 0.0;
    if (fdo.kind == FdoKind::TypeI || r0.is_constant())
        arg = model_eval(m, that) - psi0;
    else
        arg = r0(that) * model_eval(m, that) - r0(0.0) * psi0;
    arg = std::abs(arg);
    if (!(arg > 0.0))
        throw DegenerateError("log estimate: zero logarithm argument");
    return std::log(arg) / std::log(that);
}

EstimateTable::EstimateTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, std::numeric_limits<double>::quiet_NaN()),
      failed_(rows * cols, 1) {}

void EstimateTable::set(std::size_t i, std::size_t j, double v) {
    values_[i * cols_ + j] = v;
    failed_[i * cols_ + j] = std::isfinite(v) ? 0 : 1;
}

void EstimateTable::mark_failed(std::size_t i, std::size_t j) {
    values_[i * cols_ + j] = std::numeric_limits<double>::quiet_NaN();
    failed_[i * cols_ + j] = 1;
}

Selection quasi_opt_select(const EstimateTable &table) {
    const std::size_t rows = table.rows();
    const std::size_t cols = table.cols();
    if (rows < 2 || cols < 2)
        throw SelectionError("quasi-optimality: table needs at least 2 rows and 2 columns");

    std::vector<std::size_t> picked(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        bool found = false;
        double best = 0.0;
        for (std::size_t i = 1; i < rows; ++i) {
            if (table.failed(i, j) || table.failed(i - 1, j))
                continue;
            const double d = std::abs(table.value(i, j) - table.value(i - 1, j));
            if (!found || d < best) {
                best = d;
                picked[j] = i;
                found = true;
            }
        }
        if (!found)
            throw SelectionError(fmt::format("quasi-optimality: no admissible lambda difference in column j = {}", j + 1));
    }

    bool found = false;
    double best = 0.0;
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < cols; ++j) {
        const double d = std::abs(table.value(picked[j], j) - table.value(picked[j - 1], j - 1));
        if (!found || d < best) {
            best = d;
            j0 = j;
            found = true;
        }
    }
    return {picked[j0], j0};
}

std::string_view to_string(LogSelection mode) {
    return mode == LogSelection::Independent ? "independent" : "reuse_ratio";
}

LogSelection log_selection_from_string(std::string_view text) {
    if (text == "independent")
        return LogSelection::Independent;
    if (text == "reuse_ratio")
        return LogSelection::ReuseRatio;
    throw ConfigError(fmt::format("log_selection must be \"independent\" or \"reuse_ratio\", got \"{}\"", text));
}

namespace {

void fill_row(const TikhonovSystem &system, const Observation &obs, const FdoDescriptor &fdo,
              const std::vector<double> &thats, double lambda, std::size_t i, EstimateReport &rep) {
    FitModel m;
    try {
        m = system.fit(lambda);
    } catch (const SingularSystemError &) {
        for (std::size_t j = 0; j < thats.size(); ++j) {
            rep.ratio_table.mark_failed(i, j);
            rep.log_table.mark_failed(i, j);
        }
        return;
    }
    for (std::size_t j = 0; j < thats.size(); ++j) {
        try {
            rep.ratio_table.set(i, j, ratio_estimate(m, obs.psi0, fdo, thats[j]));
        } catch (const DegenerateError &) {
            rep.ratio_table.mark_failed(i, j);
        }
        try {
            rep.log_table.set(i, j, log_estimate(m, obs.psi0, fdo, thats[j]));
        } catch (const DegenerateError &) {
            rep.log_table.mark_failed(i, j);
        }
    }
}

} // namespace

EstimateReport run_pipeline(const Observation &obs, const BasisSpec &spec, const RegGrids &grids,
                            const FdoDescriptor &fdo, const PipelineOptions &options) {
    spec.validate();
    fdo.check_leading_coefficient(spec.t_end);
    grids.validate(spec.t_end);
    if (grids.that1 >= 1.0)
        throw DomainError("reg grids: that1 must be below 1 for the logarithmic estimator");
    if (fdo.kind == FdoKind::TypeII && !fdo.r0().is_polynomial())
        throw PreconditionError("type II estimation needs a polynomial r0");

    EstimateReport rep;
    rep.lambdas = grids.lambdas();
    rep.thats = grids.thats();
    rep.log_selection = options.log_selection;
    rep.ratio_table = EstimateTable(grids.k1, grids.k2);
    rep.log_table = EstimateTable(grids.k1, grids.k2);

    const TikhonovSystem system(obs, spec);
    const std::size_t n = rep.lambdas.size();
    const unsigned workers = std::min<std::size_t>(options.threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fill_row(system, obs, fdo, rep.thats, rep.lambdas[i], i, rep);
    } else {
        // each worker owns whole rows, so writes never overlap
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers)
                    fill_row(system, obs, fdo, rep.thats, rep.lambdas[i], i, rep);
            });
        for (auto &t : pool)
            t.join();
    }

    try {
        rep.ratio_selection = quasi_opt_select(rep.ratio_table);
    } catch (const SelectionError &e) {
        rep.failure = std::string("ratio: ") + e.what();
    }
    if (rep.ratio_selection)
        rep.nu_ratio = rep.ratio_table.value(rep.ratio_selection->lambda_index, rep.ratio_selection->that_index);

    if (options.log_selection == LogSelection::ReuseRatio) {
        if (rep.ratio_selection) {
            const auto [i, j] = *rep.ratio_selection;
            if (rep.log_table.failed(i, j)) {
                rep.failure = "log: estimate degenerate at the ratio-selected pair";
            } else {
                rep.log_selection_pair = rep.ratio_selection;
                rep.nu_log = rep.log_table.value(i, j);
            }
        }
    } else {
        try {
            rep.log_selection_pair = quasi_opt_select(rep.log_table);
            rep.nu_log = rep.log_table.value(rep.log_selection_pair->lambda_index, rep.log_selection_pair->that_index);
        } catch (const SelectionError &e) {
            if (rep.failure.empty())
                rep.failure = std::string("log: ") + e.what();
        }
    }

    if (!rep.ok()) {
        const std::string what = rep.failure;
        throw PipelineSelectionError(what, std::move(rep));
    }
    return rep;
}

} // namespace fracorder
