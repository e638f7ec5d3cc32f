#pragma once

#include "fracorder/power_sum.hpp"

#include <string_view>
#include <vector>

namespace fracorder {

enum class FdoKind {
    TypeI,  ///< sum_i r_i(t) D^{nu_i} v
    TypeII, ///< sum_i D^{nu_i} (r_i v)
};

std::string_view to_string(FdoKind kind);
FdoKind fdo_kind_from_string(std::string_view text);

/// Multi-term fractional differential operator.
///
/// orders[0] is the leading order nu_0; orders are strictly decreasing in
/// (0,1). coefficients[i] multiplies (type I) or is differentiated together
/// with (type II) the term of order orders[i]. The optional negative branch
/// (orders with a minus sign in the operator) is carried as metadata only.
struct FdoDescriptor {
    FdoKind kind = FdoKind::TypeI;
    std::vector<double> orders;
    std::vector<PowerSum> coefficients;
    std::vector<double> negative_orders;
    std::vector<PowerSum> negative_coefficients;

    double leading_order() const { return orders.front(); }
    const PowerSum &r0() const { return coefficients.front(); }

    /// Checks orders and coefficient shapes; throws DomainError.
    void validate() const;

    /// Minimum of r0 over [0, t_end] sampled on a 1e-4 mesh plus the
    /// endpoints. Throws DomainError unless the minimum is positive.
    double check_leading_coefficient(double t_end) const;
};

} // namespace fracorder
