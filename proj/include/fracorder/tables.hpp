#pragma once

#include "fracorder/obsmodel.hpp"
#include "fracorder/orderest.hpp"

#include <string>
#include <vector>

namespace fracorder {

enum class Example { E71, E72 };

/// Basis preset: exponents (1.75, 1.45, 1.15) times a reference order
/// (nu0/2 for the local scenario, nu0/5 for the nonlocal one), P = 9, rho = 0.99.
BasisSpec example_basis(Example ex, double nu0, double t_end);

struct TableCell {
    double nu_true = 0.0;
    NoiseKind noise = NoiseKind::None;
    double epsilon = 0.0;
    double nu_ratio = 0.0;
    double nu_log = 0.0;
};

struct TableSetup {
    Example example;
    FdoKind kind;
    double eps_small;
    double eps_large;
};

TableSetup table_setup(int id);

/// 54 cells ordered by nu (0.1..0.9), then noise (N1, N2, N3), then epsilon.
std::vector<TableCell> run_table(int id, const PipelineOptions &options = {});

/// Published values for the same 54 cells in the same order.
std::vector<TableCell> reference_table(int id);

std::string table_csv(const std::vector<TableCell> &cells);
/// Side-by-side comparison with the reference values and absolute differences.
std::string table_diff_csv(const std::vector<TableCell> &computed, const std::vector<TableCell> &reference);

} // namespace fracorder
