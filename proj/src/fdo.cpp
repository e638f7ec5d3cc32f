#include "fracorder/fdo.hpp"

#include "fracorder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracorder {

std::string_view to_string(FdoKind kind) { return kind == FdoKind::TypeI ? "I" : "II"; }

FdoKind fdo_kind_from_string(std::string_view text) {
    if (text == "I")
        return FdoKind::TypeI;
    if (text == "II")
        return FdoKind::TypeII;
    throw DomainError("unknown operator type '" + std::string(text) + "' (expected I or II)");
}

void FdoDescriptor::validate() const {
    if (orders.empty())
        throw DomainError("operator needs at least one order");
    if (coefficients.size() != orders.size())
        throw DomainError("operator needs one coefficient per order");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (!(orders[i] > 0.0 && orders[i] < 1.0))
            throw DomainError("operator orders must lie in (0,1)");
        if (i > 0 && !(orders[i] < orders[i - 1]))
            throw DomainError("operator orders must be strictly decreasing");
    }
    if (!r0().is_polynomial())
        throw DomainError("leading coefficient r0 must be a polynomial");
    if (negative_coefficients.size() != negative_orders.size())
        throw DomainError("negative-branch orders and coefficients differ in length");
    for (double nu : negative_orders)
        if (!(nu > 0.0 && nu < orders.front()))
            throw DomainError("negative-branch orders must lie in (0, nu_0)");
}

double FdoDescriptor::check_leading_coefficient(double t_end) const {
    validate();
    if (!(t_end > 0.0))
        throw DomainError("check_leading_coefficient: interval end must be positive");
    constexpr double step = 1e-4;
    double lowest = std::min(r0()(0.0), r0()(t_end));
    const auto steps = static_cast<std::size_t>(std::floor(t_end / step));
    for (std::size_t k = 1; k <= steps; ++k)
        lowest = std::min(lowest, r0()(static_cast<double>(k) * step));
    if (!(lowest > 0.0))
        throw DomainError("leading coefficient r0 is not bounded away from zero on [0, " +
                          std::to_string(t_end) + "]");
    return lowest;
}

} // namespace fracorder
