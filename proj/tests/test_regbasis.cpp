#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracorder/errors.hpp"
#include "fracorder/regbasis.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace fracorder;

namespace {

BasisSpec default_spec(double t_end = 2.1e-3) {
    BasisSpec s;
    s.power_exponents = scaled_exponents(0.25);
    s.total_size = 9;
    s.rho = 0.99;
    s.t_end = t_end;
    return s;
}

// int_0^tK t^{-rho} f g dt with s = u^{1/(1-rho)}, which removes the endpoint
// singularity: dt t^{-rho} = du / (1-rho) with t = tK u^{1/(1-rho)}.
double quadrature_inner(const PowerSum &f, const PowerSum &g, double rho, double tK) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double q = 1.0 / (1.0 - rho);
    const double scale = std::pow(tK, 1.0 - rho) / (1.0 - rho);
    return scale * integrator.integrate(
                       [&](double u) {
                           const double t = tK * std::pow(u, q);
                           return f(t) * g(t);
                       },
                       0.0, 1.0, 1e-14);
}

} // namespace

TEST_CASE("jacobi members") {
    const auto p0 = jacobi_poly(0, 0.99, 3e-3);
    CHECK(p0(1e-3) == doctest::Approx(1.0));
    const double rho = 0.7, tK = 2.0;
    const auto p1 = jacobi_poly(1, rho, tK);
    for (double t : {0.0, 0.3, 1.7})
        CHECK(p1(t) == doctest::Approx((2.0 - rho) * (t / tK) - (1.0 - rho)).epsilon(1e-14));
    for (unsigned j = 0; j <= kMaxJacobiDegree; ++j) {
        const auto p = jacobi_poly(j, 0.99, 2.1e-3);
        // monomial cancellation grows with the degree; bound it by the term sizes
        double terms = 0.0;
        for (const auto &[c, e] : p.terms())
            terms += std::abs(c) * std::pow(2.1e-3, e);
        CAPTURE(j);
        CHECK(std::abs(p(2.1e-3) - 1.0) <= 64 * 2.2e-16 * terms);
        if (j <= 6)
            CHECK(std::abs(p(2.1e-3) - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(jacobi_poly(kMaxJacobiDegree + 1, 0.99, 1.0), DomainError);
}

TEST_CASE("weighted inner products") {
    const double b = 0.2875, tK = 3e-3;
    const auto m = PowerSum::monomial(1.0, b);
    CHECK(weighted_inner(m, m, 0.99, tK) ==
          doctest::Approx(std::pow(tK, 2 * b + 1 - 0.99) / (2 * b + 1 - 0.99)).epsilon(1e-14));
    CHECK(weighted_inner(PowerSum::constant(1.0), PowerSum::constant(1.0), 0.99, 1.0) ==
          doctest::Approx(100.0).epsilon(1e-12));
    const auto p1 = jacobi_poly(1, 0.99, tK), p3 = jacobi_poly(3, 0.99, tK);
    const double e13 = weighted_inner(p1, p3, 0.99, tK);
    const double scale = std::sqrt(weighted_inner(p1, p1, 0.99, tK) * weighted_inner(p3, p3, 0.99, tK));
    CHECK(std::abs(e13) <= 1e-10 * scale);
    CHECK(std::abs(quadrature_inner(p1, p3, 0.99, tK)) <= 1e-8 * scale);
}

TEST_CASE("gram matrix") {
    BasisSpec jac;
    jac.total_size = 3;
    jac.t_end = 1e-2;
    const auto gj = gram_matrix(jac).entries;
    for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
            if (l != m)
                CHECK(std::abs(gj(l, m)) <= 1e-10 * std::sqrt(gj(l, l) * gj(m, m)));

    BasisSpec one;
    one.power_exponents = {0.4};
    one.total_size = 1;
    one.t_end = 2.0;
    const auto g1 = gram_matrix(one).entries;
    REQUIRE(g1.rows() == 1);
    CHECK(g1(0, 0) == doctest::Approx(std::pow(2.0, 0.8 + 1 - 0.99) / (0.8 + 1 - 0.99)).epsilon(1e-14));

    const auto spec = default_spec();
    const auto g = gram_matrix(spec);
    CHECK(g.warnings.empty());
    const auto &e = g.entries;
    CHECK((e - e.transpose()).norm() == 0.0);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(e);
    CHECK(ldlt.info() == Eigen::Success);
    CHECK((ldlt.vectorD().array() > 0.0).all());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);

    // every entry against quadrature, Jacobi block orthogonal
    const auto h = basis_functions(spec);
    for (std::size_t l = 0; l < h.size(); ++l)
        for (std::size_t m = 0; m < h.size(); ++m) {
            const double scale = std::sqrt(e(l, l) * e(m, m));
            const double q = quadrature_inner(h[l], h[m], spec.rho, spec.t_end);
            CHECK(std::abs(e(l, m) - q) <= 1e-8 * std::max(std::abs(q), 1e-3 * scale));
            if (l >= 3 && m >= 3 && l != m)
                CHECK(std::abs(e(l, m)) <= 1e-10 * scale);
        }
}

TEST_CASE("duplicate exponents are flagged") {
    auto spec = default_spec();
    spec.power_exponents = {0.5, 0.5, 0.3};
    CHECK(spec.has_duplicate_exponents());
    CHECK_FALSE(gram_matrix(spec).warnings.empty());
}

TEST_CASE("spec validation") {
    auto spec = default_spec();
    spec.rho = 1.0;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = default_spec();
    spec.power_exponents = {0.3, 0.5};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = default_spec();
    spec.power_exponents = {1.2};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = default_spec();
    spec.total_size = 2;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = default_spec();
    spec.total_size = 3 + kMaxJacobiDegree + 2;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    const auto b = scaled_exponents(0.2);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == doctest::Approx(0.35));
    CHECK(b[1] == doctest::Approx(0.29));
    CHECK(b[2] == doctest::Approx(0.23));
}

TEST_CASE("evaluation and antiderivatives") {
    const auto spec = default_spec();
    const auto h = basis_functions(spec);
    const auto at0 = eval_basis(spec, 0.0);
    const auto int0 = antideriv_basis(spec, 0.0);
    for (int l = 0; l < 3; ++l)
        CHECK(at0(l) == 0.0);
    for (std::size_t l = 3; l < h.size(); ++l)
        CHECK(at0(static_cast<Eigen::Index>(l)) == doctest::Approx(h[l].combined().terms().front().coefficient));
    CHECK(int0.cwiseAbs().maxCoeff() == 0.0);
    const auto atK = eval_basis(spec, spec.t_end);
    for (Eigen::Index l = 3; l < atK.size(); ++l)
        CHECK(atK(l) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(eval_basis(spec, 1.01 * spec.t_end), DomainError);
    CHECK_THROWS_AS(antideriv_basis(spec, -1e-9), DomainError);

    BasisSpec half;
    half.power_exponents = {0.5};
    half.total_size = 1;
    half.t_end = 1.0;
    CHECK(antideriv_basis(half, 1e-3)(0) == doctest::Approx(std::pow(1e-3, 1.5) / 1.5).epsilon(1e-14));

    // numerical derivative of the antiderivative
    for (double t : {3e-4, 1e-3, 1.9e-3}) {
        const double d = 1e-4 * t;
        const Eigen::VectorXd num = (antideriv_basis(spec, t + d) - antideriv_basis(spec, t - d)) / (2 * d);
        const Eigen::VectorXd val = eval_basis(spec, t);
        for (Eigen::Index l = 0; l < val.size(); ++l)
            CHECK(std::abs(num(l) - val(l)) <= 1e-6 * std::max(1.0, std::abs(val(l))));
    }
}
