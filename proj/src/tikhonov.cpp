#include "fracorder/tikhonov.hpp"

#include "fracorder/errors.hpp"

#include <cmath>
#include <string>

namespace fracorder {

Eigen::MatrixXd design_matrix(const Observation &obs, const BasisSpec &spec) {
    spec.validate();
    obs.validate();
    if (obs.grid.last() > spec.t_end)
        throw DomainError("observation grid extends beyond the basis interval t_K");
    const auto h = basis_functions(spec);
    const auto rows = static_cast<Eigen::Index>(obs.grid.size() + 1);
    const auto cols = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXd q(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const double t = k == 0 ? 0.0 : obs.grid.points()[static_cast<std::size_t>(k - 1)];
        for (Eigen::Index l = 0; l < cols; ++l)
            q(k, l) = h[static_cast<std::size_t>(l)](t);
    }
    return q;
}

Eigen::VectorXd data_vector(const Observation &obs) {
    obs.validate();
    Eigen::VectorXd p(static_cast<Eigen::Index>(obs.values.size() + 1));
    p(0) = obs.psi0;
    for (std::size_t k = 0; k < obs.values.size(); ++k)
        p(static_cast<Eigen::Index>(k + 1)) = obs.values[k];
    return p;
}

TikhonovSystem::TikhonovSystem(const Observation &obs, BasisSpec spec)
    : spec_(std::move(spec)), basis_(basis_functions(spec_)), q_(design_matrix(obs, spec_)),
      e_(gram_matrix(spec_).entries), p_(data_vector(obs)) {
    qtq_ = q_.transpose() * q_;
    qtp_ = q_.transpose() * p_;
}

FitModel TikhonovSystem::fit(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("fit: regularization parameter must be positive and finite");
    if (spec_.has_duplicate_exponents())
        throw SingularSystemError("fit: duplicate power exponents make the system singular");

    const Eigen::MatrixXd system = qtq_ + lambda * e_;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystemError("fit: symmetric factorization failed");
    const auto pivots = ldlt.vectorD();
    for (Eigen::Index i = 0; i < pivots.size(); ++i)
        if (pivots(i) == 0.0 || !std::isfinite(pivots(i)))
            throw SingularSystemError("fit: zero pivot in the regularized normal matrix");

    FitModel m;
    m.spec = spec_;
    m.lambda = lambda;
    m.coeffs = ldlt.solve(qtp_);
    if (!m.coeffs.allFinite())
        throw SingularSystemError("fit: non-finite coefficients");
    m.residual_norm = (q_ * m.coeffs - p_).norm();
    std::vector<PowerSum::Term> terms;
    for (std::size_t l = 0; l < basis_.size(); ++l)
        for (const auto &[c, e] : basis_[l].terms())
            terms.push_back({m.coeffs(static_cast<Eigen::Index>(l)) * c, e});
    m.monomials = PowerSum(std::move(terms));
    return m;
}

FitModel fit(const Observation &obs, const BasisSpec &spec, double lambda) {
    return TikhonovSystem(obs, spec).fit(lambda);
}

namespace {

void check_time(const FitModel &m, double t) {
    if (!(t > 0.0 && t <= m.spec.t_end))
        throw DomainError("model evaluated at t = " + std::to_string(t) + " outside (0, t_K]");
}

} // namespace

double model_eval(const FitModel &m, double t) {
    check_time(m, t);
    return m.monomials(t);
}

double model_integral(const FitModel &m, double that) {
    check_time(m, that);
    return m.monomials.integral(that);
}

double model_integral_weighted(const FitModel &m, const PowerSum &r0, double that) {
    check_time(m, that);
    if (!r0.is_polynomial())
        throw DomainError("model_integral_weighted: weight must be a polynomial");
    return (r0 * m.monomials).integral(that);
}

} // namespace fracorder
