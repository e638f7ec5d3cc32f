#pragma once

#include <initializer_list>
#include <vector>

namespace fracorder {

/// Finite sum of power functions  sum_k c_k t^{e_k}  on t >= 0.
///
/// Every exponent must exceed -1 so each term is integrable at the origin.
/// An empty sum is the zero function. Polynomials are the special case of
/// nonnegative integer exponents; fitted basis members and memory kernels
/// share this representation.
class PowerSum {
public:
    struct Term {
        double coefficient;
        double exponent;
    };

    PowerSum() = default;
    PowerSum(std::initializer_list<Term> terms);
    explicit PowerSum(std::vector<Term> terms);

    static PowerSum constant(double c);
    static PowerSum monomial(double c, double exponent);

    const std::vector<Term> &terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    double operator()(double t) const;
    /// Closed-form integral over [0, t].
    double integral(double t) const;

    /// Terms with equal exponents merged, zero coefficients dropped,
    /// sorted by ascending exponent.
    PowerSum combined() const;

    bool is_polynomial() const;
    /// True when the function is a constant (possibly zero).
    bool is_constant() const;

    PowerSum operator+(const PowerSum &other) const;
    PowerSum operator*(const PowerSum &other) const;
    PowerSum scaled(double factor) const;

private:
    std::vector<Term> terms_;
};

} // namespace fracorder
