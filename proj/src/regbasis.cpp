#include "fracorder/regbasis.hpp"

#include "fracorder/errors.hpp"
#include "fracorder/fraccalc.hpp"

#include <algorithm>
#include <cmath>

namespace fracorder {

void BasisSpec::validate() const {
    if (!(rho > 0.0 && rho < 1.0))
        throw DomainError("basis weight exponent rho must lie in (0,1)");
    if (!(t_end > 0.0))
        throw DomainError("basis interval end t_K must be positive");
    if (total_size < power_exponents.size())
        throw DomainError("basis size P must be at least the number of power functions");
    if (total_size == 0)
        throw DomainError("basis must not be empty");
    if (jacobi_count() > kMaxJacobiDegree + 1)
        throw DomainError("basis needs Jacobi degree above the supported maximum of " +
                          std::to_string(kMaxJacobiDegree));
    for (std::size_t j = 0; j < power_exponents.size(); ++j) {
        const double b = power_exponents[j];
        if (!(b > 0.0 && b < 1.0))
            throw DomainError("power exponents must lie in (0,1)");
        if (j > 0 && b > power_exponents[j - 1])
            throw DomainError("power exponents must be given in decreasing order");
    }
}

bool BasisSpec::has_duplicate_exponents() const {
    return std::adjacent_find(power_exponents.begin(), power_exponents.end()) !=
           power_exponents.end();
}

std::vector<double> scaled_exponents(double reference, const std::vector<double> &multiples) {
    std::vector<double> out;
    out.reserve(multiples.size());
    for (double m : multiples)
        out.push_back(m * reference);
    return out;
}

PowerSum jacobi_poly(unsigned degree, double rho, double t_end) {
    if (degree > kMaxJacobiDegree)
        throw DomainError("jacobi_poly: degree " + std::to_string(degree) + " exceeds the cap of " +
                          std::to_string(kMaxJacobiDegree));
    if (!(rho > 0.0 && rho < 1.0) || !(t_end > 0.0))
        throw DomainError("jacobi_poly: need rho in (0,1) and t_K > 0");

    // Coefficients in s = t / t_K of  sum_i C(j,i) C(j-rho, j-i) (s-1)^{j-i} s^i.
    std::vector<double> in_s(degree + 1, 0.0);
    for (unsigned i = 0; i <= degree; ++i) {
        const unsigned m = degree - i;
        const double weight = binom_real(degree, i) * binom_real(degree - rho, m);
        // (s-1)^m = sum_k C(m,k) s^k (-1)^{m-k}
        for (unsigned k = 0; k <= m; ++k) {
            const double sign = (m - k) % 2 == 0 ? 1.0 : -1.0;
            in_s[i + k] += weight * binom_real(m, k) * sign;
        }
    }
    std::vector<PowerSum::Term> terms;
    terms.reserve(degree + 1);
    for (unsigned p = 0; p <= degree; ++p)
        terms.push_back({in_s[p] / std::pow(t_end, p), static_cast<double>(p)});
    return PowerSum(std::move(terms));
}

double weighted_inner(const PowerSum &f, const PowerSum &g, double rho, double t_end) {
    double sum = 0.0;
    for (const auto &[cf, pf] : f.terms())
        for (const auto &[cg, pg] : g.terms()) {
            const double e = pf + pg + 1.0 - rho;
            if (!(e > 0.0))
                throw DomainError("weighted_inner: integrand not integrable at 0");
            sum += cf * cg * std::pow(t_end, e) / e;
        }
    return sum;
}

std::vector<PowerSum> basis_functions(const BasisSpec &spec) {
    spec.validate();
    std::vector<PowerSum> out;
    out.reserve(spec.total_size);
    for (double b : spec.power_exponents)
        out.push_back(PowerSum::monomial(1.0, b));
    for (unsigned j = 0; j < spec.jacobi_count(); ++j)
        out.push_back(jacobi_poly(j, spec.rho, spec.t_end));
    return out;
}

GramMatrix gram_matrix(const BasisSpec &spec) {
    const auto h = basis_functions(spec);
    const auto n = static_cast<Eigen::Index>(h.size());
    GramMatrix out{Eigen::MatrixXd(n, n), {}};
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index m = l; m < n; ++m) {
            const double e = weighted_inner(h[l], h[m], spec.rho, spec.t_end);
            out.entries(l, m) = e;
            out.entries(m, l) = e;
        }
    if (spec.has_duplicate_exponents())
        out.warnings.emplace_back("duplicate power exponents make the basis singular");
    return out;
}

namespace {

void check_range(const BasisSpec &spec, double t) {
    if (!(t >= 0.0 && t <= spec.t_end))
        throw DomainError("basis evaluated at t = " + std::to_string(t) + " outside [0, t_K]");
}

} // namespace

Eigen::VectorXd eval_basis(const BasisSpec &spec, double t) {
    check_range(spec, t);
    const auto h = basis_functions(spec);
    Eigen::VectorXd out(static_cast<Eigen::Index>(h.size()));
    for (std::size_t l = 0; l < h.size(); ++l)
        out(static_cast<Eigen::Index>(l)) = h[l](t);
    return out;
}

Eigen::VectorXd antideriv_basis(const BasisSpec &spec, double t) {
    check_range(spec, t);
    const auto h = basis_functions(spec);
    Eigen::VectorXd out(static_cast<Eigen::Index>(h.size()));
    for (std::size_t l = 0; l < h.size(); ++l)
        out(static_cast<Eigen::Index>(l)) = h[l].integral(t);
    return out;
}

} // namespace fracorder
