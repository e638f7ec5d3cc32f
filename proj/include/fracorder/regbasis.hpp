#pragma once

#include "fracorder/power_sum.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fracorder {

/// Approximation space for the observed signal on (0, t_K]: power functions
/// t^{b_1}, ..., t^{b_J} followed by shifted Jacobi polynomials of degrees
/// 0..P-J-1, orthogonal in L^2 with weight t^{-rho}.
struct BasisSpec {
    std::vector<double> power_exponents; ///< b_1 >= ... >= b_J, all in (0,1)
    std::size_t total_size = 0;          ///< P
    double rho = 0.99;                   ///< weight exponent in (0,1)
    double t_end = 0.0;                  ///< t_K

    std::size_t power_count() const noexcept { return power_exponents.size(); }
    std::size_t jacobi_count() const noexcept { return total_size - power_exponents.size(); }

    void validate() const;
    bool has_duplicate_exponents() const;
};

/// Exponents b_j = multiple_j * reference for the default multiples
/// (1.75, 1.45, 1.15).
std::vector<double> scaled_exponents(double reference,
                                     const std::vector<double> &multiples = {1.75, 1.45, 1.15});

inline constexpr unsigned kMaxJacobiDegree = 12;

/// Shifted Jacobi polynomial P_j^{(0,-rho)}(t / t_K) expanded into monomials in t.
PowerSum jacobi_poly(unsigned degree, double rho, double t_end);

/// Closed-form  int_0^{t_K} t^{-rho} f(t) g(t) dt  for nonnegative exponents.
double weighted_inner(const PowerSum &f, const PowerSum &g, double rho, double t_end);

/// Basis members h_1..h_P in monomial form.
std::vector<PowerSum> basis_functions(const BasisSpec &spec);

struct GramMatrix {
    Eigen::MatrixXd entries;
    std::vector<std::string> warnings;
};

GramMatrix gram_matrix(const BasisSpec &spec);

Eigen::VectorXd eval_basis(const BasisSpec &spec, double t);
Eigen::VectorXd antideriv_basis(const BasisSpec &spec, double t);

} // namespace fracorder
