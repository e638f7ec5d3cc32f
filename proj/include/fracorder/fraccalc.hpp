#pragma once

#include "fracorder/fdo.hpp"
#include "fracorder/power_sum.hpp"

#include <span>
#include <vector>

namespace fracorder {

// ---------------------------------------------------------------------------
// Special functions. Negative arguments are never needed and are rejected.

double gamma_fn(double x);
double beta_fn(double a, double b);
/// Generalized binomial coefficient  Gamma(u+1) / (Gamma(k+1) Gamma(u-k+1))
/// for real u with u - k + 1 > 0.
double binom_real(double upper, unsigned lower);

// ---------------------------------------------------------------------------

/// Samples of a function of time on a grid that starts at t = 0.
class SampledFunction {
public:
    SampledFunction(std::vector<double> times, std::vector<double> values);

    const std::vector<double> &times() const noexcept { return times_; }
    const std::vector<double> &values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }
    double end_time() const noexcept { return times_.back(); }

    /// Piecewise-linear interpolant at t in [0, end_time].
    double value_at(double t) const;
    /// Trapezoidal integral of the piecewise-linear interpolant over [0, t].
    double integral_to(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

SampledFunction sample(const PowerSum &f, std::vector<double> times);
std::vector<double> uniform_times(double end_time, std::size_t intervals);

/// (a+h)^p - a^p for a >= 0, h > 0, without cancellation when h is tiny next to a.
double pow_diff(double a, double h, double p);

/// Weights (w_k, w_{k+1}) with
///   int_{t_k}^{t_{k+1}} (t_n - s)^e v(s) ds = w_k v_k + w_{k+1} v_{k+1}
/// for v linear on [t_k, t_{k+1}], t_{k+1} <= t_n, e > -1.
struct IntervalWeights {
    double left = 0.0;
    double right = 0.0;
};
IntervalWeights power_kernel_weights(double tn, double tk, double tk1, double e);

/// Caputo derivative of order nu in (0,1) by the L1 scheme on the (possibly
/// nonuniform) grid of f. The value at node 0 is 0.
SampledFunction caputo_l1(const SampledFunction &f, double nu);

/// Riemann-Liouville integral of order theta > 0: the convolution of
/// t^{theta-1}/Gamma(theta) with the piecewise-linear interpolant of f,
/// integrated exactly on every subinterval.
SampledFunction rl_integral(const SampledFunction &f, double theta);

/// t (f(t) - f0) / int_0^t (f - f0) - 1 at each probe time. Throws
/// DegenerateError when the denominator magnitude drops below 1e-300.
std::vector<double> ratio_limit_probe(const SampledFunction &f, double f0,
                                      std::span<const double> probe_times);
/// Same quantity with the integral taken in closed form.
std::vector<double> ratio_limit_probe(const PowerSum &f, double f0,
                                      std::span<const double> probe_times);

/// Type II variant: r0 f replaces f and r0(0) f0 replaces f0.
std::vector<double> ratio_limit_probe_type2(const SampledFunction &f, double f0, const PowerSum &r0,
                                            std::span<const double> probe_times);
std::vector<double> ratio_limit_probe_type2(const PowerSum &f, double f0, const PowerSum &r0,
                                            std::span<const double> probe_times);

/// Value at t = 0 of A + B t^exponent through the samples of d at end/4 and end/2.
double extrapolate_to_origin(const SampledFunction &d, double exponent);

/// Both sides of  r0(0) D^{nu_0} v |_{t=0} = D_t v |_{t=0}  evaluated from
/// L1 derivatives extrapolated to the origin.
struct OriginIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

/// Requires polynomial coefficients (their Caputo derivatives vanish at 0,
/// so the type II correction term is zero).
OriginIdentity check_origin_identity(const SampledFunction &v, const FdoDescriptor &fdo);

} // namespace fracorder
