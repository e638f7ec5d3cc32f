#include "fracorder/power_sum.hpp"

#include "fracorder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracorder {

namespace {

void check_term(const PowerSum::Term &term) {
    if (!std::isfinite(term.coefficient) || !std::isfinite(term.exponent))
        throw DomainError("power sum term must be finite");
    if (term.exponent <= -1.0)
        throw DomainError("power sum exponent " + std::to_string(term.exponent) +
                          " is not integrable at 0 (must exceed -1)");
}

} // namespace

PowerSum::PowerSum(std::initializer_list<Term> terms) : PowerSum(std::vector<Term>(terms)) {}

PowerSum::PowerSum(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto &term : terms_)
        check_term(term);
}

PowerSum PowerSum::constant(double c) { return PowerSum{{c, 0.0}}; }

PowerSum PowerSum::monomial(double c, double exponent) { return PowerSum{{c, exponent}}; }

double PowerSum::operator()(double t) const {
    double sum = 0.0;
    for (const auto &[c, e] : terms_)
        sum += e == 0.0 ? c : c * std::pow(t, e);
    return sum;
}

double PowerSum::integral(double t) const {
    double sum = 0.0;
    for (const auto &[c, e] : terms_)
        sum += c * std::pow(t, e + 1.0) / (e + 1.0);
    return sum;
}

PowerSum PowerSum::combined() const {
    std::vector<Term> sorted = terms_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Term &a, const Term &b) { return a.exponent < b.exponent; });
    std::vector<Term> merged;
    for (const auto &term : sorted) {
        if (!merged.empty() && merged.back().exponent == term.exponent)
            merged.back().coefficient += term.coefficient;
        else
            merged.push_back(term);
    }
    std::erase_if(merged, [](const Term &t) { return t.coefficient == 0.0; });
    PowerSum out;
    out.terms_ = std::move(merged);
    return out;
}

bool PowerSum::is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term &t) {
        return t.exponent >= 0.0 && std::floor(t.exponent) == t.exponent;
    });
}

bool PowerSum::is_constant() const {
    const auto c = combined();
    return c.terms_.empty() || (c.terms_.size() == 1 && c.terms_.front().exponent == 0.0);
}

PowerSum PowerSum::operator+(const PowerSum &other) const {
    PowerSum out = *this;
    out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
    return out;
}

PowerSum PowerSum::operator*(const PowerSum &other) const {
    PowerSum out;
    out.terms_.reserve(terms_.size() * other.terms_.size());
    for (const auto &a : terms_)
        for (const auto &b : other.terms_)
        {
            const Term term{a.coefficient * b.coefficient, a.exponent + b.exponent};
            check_term(term);
            out.terms_.push_back(term);
        }
    return out;
}

PowerSum PowerSum::scaled(double factor) const {
    PowerSum out = *this;
    for (auto &term : out.terms_)
        term.coefficient *= factor;
    return out;
}

} // namespace fracorder
