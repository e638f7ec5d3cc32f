#pragma once

#include "fracorder/errors.hpp"
#include "fracorder/fdo.hpp"
#include "fracorder/obsmodel.hpp"
#include "fracorder/regbasis.hpp"
#include "fracorder/tikhonov.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracorder {

/// Geometric sequences lambda_i = lambda1 xi1^{i-1} (i = 1..K1) and
/// that_j = that1 xi2^{j-1} (j = 1..K2).
struct RegGrids {
    double lambda1 = 1.0;
    double xi1 = 0.5;
    std::size_t k1 = 60;
    double that1 = 0.0;
    double xi2 = 0.5;
    std::size_t k2 = 15;

    /// Presets: lambda_i = 2^{1-i} (60 values), that_j = 2^{1-j} t_end (15 values).
    static RegGrids defaults(double t_end);

    void validate(double t_end) const;
    std::vector<double> lambdas() const;
    std::vector<double> thats() const;
};

double ratio_estimate(const FitModel &m, double psi0, const FdoDescriptor &fdo, double that);
double log_estimate(const FitModel &m, double psi0, const FdoDescriptor &fdo, double that);

/// K1 x K2 table of estimates, row-major by lambda index. Failed cells hold NaN.
class EstimateTable {
public:
    EstimateTable() = default;
    EstimateTable(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double value(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    bool failed(std::size_t i, std::size_t j) const { return failed_[i * cols_ + j] != 0; }

    void set(std::size_t i, std::size_t j, double v);
    void mark_failed(std::size_t i, std::size_t j);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> failed_;
};

/// Zero-based (lambda index, that index).
struct Selection {
    std::size_t lambda_index = 0;
    std::size_t that_index = 0;
};

/// Two-level quasi-optimality: per column the lambda with the smallest
/// consecutive change, then the column whose selected value changes least
/// from the previous column's selected value. Ties go to the smallest index;
/// a difference is admissible only when both cells are valid.
Selection quasi_opt_select(const EstimateTable &table);

enum class LogSelection {
    Independent, ///< own quasi-optimality pass on the logarithmic table
    ReuseRatio,  ///< evaluate at the pair selected for the ratio estimator
};

std::string_view to_string(LogSelection mode);
LogSelection log_selection_from_string(std::string_view text);

struct PipelineOptions {
    LogSelection log_selection = LogSelection::Independent;
    /// Worker threads for the lambda sweep; 0 runs on the calling thread.
    unsigned threads = 0;
};

struct EstimateReport {
    std::vector<double> lambdas;
    std::vector<double> thats;
    EstimateTable ratio_table;
    EstimateTable log_table;
    LogSelection log_selection = LogSelection::Independent;

    std::optional<Selection> ratio_selection;
    std::optional<Selection> log_selection_pair;
    double nu_ratio = 0.0;
    double nu_log = 0.0;

    /// Empty on success; otherwise why a selection failed.
    std::string failure;
    bool ok() const noexcept { return failure.empty(); }
};

/// Raised when a quasi-optimality pass has nothing admissible; carries the
/// filled estimate tables for diagnostics.
class PipelineSelectionError : public SelectionError {
public:
    PipelineSelectionError(const std::string &what, EstimateReport report)
        : SelectionError(what), report_(std::move(report)) {}
    const EstimateReport &report() const noexcept { return report_; }

private:
    EstimateReport report_;
};

EstimateReport run_pipeline(const Observation &obs, const BasisSpec &spec, const RegGrids &grids,
                            const FdoDescriptor &fdo, const PipelineOptions &options = {});

} // namespace fracorder
