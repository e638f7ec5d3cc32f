#pragma once

#include "fracorder/obsmodel.hpp"
#include "fracorder/power_sum.hpp"
#include "fracorder/regbasis.hpp"

#include <Eigen/Dense>

namespace fracorder {

/// Regularized approximation psi_eps(lambda, t) = sum_l a_l h_l(t).
struct FitModel {
    BasisSpec spec;
    Eigen::VectorXd coeffs;
    double lambda = 0.0;
    double residual_norm = 0.0; ///< || Q a - p ||_2
    PowerSum monomials;         ///< expanded form of sum_l a_l h_l
};

/// Rows are t_0 = 0 followed by the grid points; q_{kl} = h_l(t_k).
Eigen::MatrixXd design_matrix(const Observation &obs, const BasisSpec &spec);
/// (psi_0, psi_{1,eps}, ..., psi_{K,eps}).
Eigen::VectorXd data_vector(const Observation &obs);

/// Reusable pieces of the normal equations (Q^T Q + lambda E) a = Q^T p.
/// Building this once per observation lets a lambda sweep share it.
class TikhonovSystem {
public:
    TikhonovSystem(const Observation &obs, BasisSpec spec);

    FitModel fit(double lambda) const;

    const BasisSpec &spec() const noexcept { return spec_; }
    const Eigen::MatrixXd &design() const noexcept { return q_; }
    const Eigen::MatrixXd &gram() const noexcept { return e_; }
    const Eigen::VectorXd &data() const noexcept { return p_; }
    const Eigen::MatrixXd &normal_matrix() const noexcept { return qtq_; }
    const Eigen::VectorXd &normal_rhs() const noexcept { return qtp_; }

private:
    BasisSpec spec_;
    std::vector<PowerSum> basis_;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd e_;
    Eigen::VectorXd p_;
    Eigen::MatrixXd qtq_;
    Eigen::VectorXd qtp_;
};

FitModel fit(const Observation &obs, const BasisSpec &spec, double lambda);

double model_eval(const FitModel &m, double t);
/// int_0^{that} psi_eps(lambda, tau) d tau.
double model_integral(const FitModel &m, double that);
/// int_0^{that} r0(tau) psi_eps(lambda, tau) d tau for polynomial r0.
double model_integral_weighted(const FitModel &m, const PowerSum &r0, double that);

} // namespace fracorder
