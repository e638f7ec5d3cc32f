#include "fracorder/fraccalc.hpp"

#include "fracorder/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fracorder {

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
    return std::tgamma(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("beta_fn: arguments must be positive");
    if (a + b < 170.0)
        return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double binom_real(double upper, unsigned lower) {
    if (!(upper - lower + 1.0 > 0.0))
        throw DomainError("binom_real: Gamma pole in the denominator (upper - lower + 1 <= 0)");
    // Falling-factorial product: exact for integers, no overflow for the small
    // arguments the basis needs.
    double value = 1.0;
    for (unsigned k = 0; k < lower; ++k)
        value *= (upper - k) / (k + 1.0);
    return value;
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size())
        throw DomainError("SampledFunction: times and values differ in length");
    if (times_.size() < 2)
        throw DomainError("SampledFunction: at least two samples required");
    if (times_.front() != 0.0)
        throw DomainError("SampledFunction: grid must start at t = 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1]))
            throw DomainError("SampledFunction: times must be strictly increasing");
}

namespace {

// Index k with times[k] <= t <= times[k+1].
std::size_t locate(const std::vector<double> &times, double t) {
    if (!(t >= 0.0) || t > times.back())
        throw DomainError("time " + std::to_string(t) + " outside the sampled interval");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    return k == 0 ? 0 : std::min(k - 1, times.size() - 2);
}

double interpolate(const std::vector<double> &times, const std::vector<double> &values,
                   std::size_t k, double t, double shift) {
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return (1.0 - w) * (values[k] - shift) + w * (values[k + 1] - shift);
}

// Trapezoidal integral of (f - shift) over [0, t].
double shifted_integral(const SampledFunction &f, double t, double shift) {
    const auto &ts = f.times();
    const auto &vs = f.values();
    const std::size_t k = locate(ts, t);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        sum += 0.5 * (ts[i + 1] - ts[i]) * ((vs[i] - shift) + (vs[i + 1] - shift));
    const double ft = interpolate(ts, vs, k, t, shift);
    sum += 0.5 * (t - ts[k]) * ((vs[k] - shift) + ft);
    return sum;
}

constexpr double kDegenerateThreshold = 1e-300;

double ratio_from(double t, double numerator_value, double integral) {
    if (!(std::abs(integral) >= kDegenerateThreshold))
        throw DegenerateError("ratio probe: integral of f - f(0) vanishes at t = " +
                              std::to_string(t));
    return t * numerator_value / integral - 1.0;
}

void check_probe(double t) {
    if (!(t > 0.0))
        throw DomainError("probe times must be positive");
}

} // namespace

double SampledFunction::value_at(double t) const {
    return interpolate(times_, values_, locate(times_, t), t, 0.0);
}

double SampledFunction::integral_to(double t) const { return shifted_integral(*this, t, 0.0); }

SampledFunction sample(const PowerSum &f, std::vector<double> times) {
    std::vector<double> values(times.size());
    std::transform(times.begin(), times.end(), values.begin(), [&](double t) { return f(t); });
    return SampledFunction(std::move(times), std::move(values));
}

std::vector<double> uniform_times(double end_time, std::size_t intervals) {
    if (intervals == 0 || !(end_time > 0.0))
        throw DomainError("uniform_times: need a positive end time and at least one interval");
    std::vector<double> t(intervals + 1);
    for (std::size_t n = 0; n <= intervals; ++n)
        t[n] = end_time * static_cast<double>(n) / static_cast<double>(intervals);
    return t;
}

double pow_diff(double a, double h, double p) {
    if (!(a >= 0.0 && h > 0.0))
        throw DomainError("pow_diff: need a >= 0 and h > 0");
    if (a == 0.0)
        return std::pow(h, p);
    return std::pow(a, p) * std::expm1(p * std::log1p(h / a));
}

IntervalWeights power_kernel_weights(double tn, double tk, double tk1, double e) {
    if (!(e > -1.0))
        throw DomainError("power_kernel_weights: exponent must exceed -1");
    const double a = tn - tk1;
    const double h = tk1 - tk;
    if (a > 0.0 && h < 0.01 * a) {
        // short interval far from the singularity: the closed form cancels,
        // while the integrand is nearly polynomial
        const auto &nodes = boost::math::quadrature::gauss<double, 5>::abscissa();
        const auto &wts = boost::math::quadrature::gauss<double, 5>::weights();
        double left = 0.0;
        double right = 0.0;
        auto add = [&](double x, double w) {
            const double pe = std::pow(a + 0.5 * h * (1.0 + x), e) * w;
            left += pe * (1.0 + x);
            right += pe * (1.0 - x);
        };
        add(nodes[0], wts[0]);
        for (std::size_t q = 1; q < nodes.size(); ++q) {
            add(nodes[q], wts[q]);
            add(-nodes[q], wts[q]);
        }
        return {0.25 * h * left, 0.25 * h * right};
    }
    const double theta = e + 1.0;
    const double d0 = pow_diff(a, h, theta) / theta;
    const double d1 = pow_diff(a, h, theta + 1.0) / (theta + 1.0);
    const double b = a + h;
    return {(d1 - a * d0) / h, (b * d0 - d1) / h};
}

SampledFunction caputo_l1(const SampledFunction &f, double nu) {
    if (!(nu > 0.0 && nu < 1.0))
        throw DomainError("caputo_l1: order must lie in (0,1)");
    const auto &t = f.times();
    const auto &v = f.values();
    const std::size_t n_nodes = t.size();
    std::vector<double> slope(n_nodes - 1);
    for (std::size_t k = 0; k + 1 < n_nodes; ++k)
        slope[k] = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);

    const double scale = 1.0 / gamma_fn(2.0 - nu);
    const double p = 1.0 - nu;
    std::vector<double> out(n_nodes, 0.0);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            sum += slope[k] * pow_diff(t[n] - t[k + 1], t[k + 1] - t[k], p);
        out[n] = scale * sum;
    }
    return SampledFunction(t, std::move(out));
}

SampledFunction rl_integral(const SampledFunction &f, double theta) {
    if (!(theta > 0.0))
        throw DomainError("rl_integral: order must be positive");
    const auto &t = f.times();
    const auto &v = f.values();
    const double scale = 1.0 / gamma_fn(theta);
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t n = 1; n < t.size(); ++n) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto w = power_kernel_weights(t[n], t[k], t[k + 1], theta - 1.0);
            sum += w.left * v[k] + w.right * v[k + 1];
        }
        out[n] = scale * sum;
    }
    return SampledFunction(t, std::move(out));
}

std::vector<double> ratio_limit_probe(const SampledFunction &f, double f0,
                                      std::span<const double> probe_times) {
    std::vector<double> out;
    out.reserve(probe_times.size());
    for (double t : probe_times) {
        check_probe(t);
        const double ft = f.value_at(t) - f0;
        out.push_back(ratio_from(t, ft, shifted_integral(f, t, f0)));
    }
    return out;
}

std::vector<double> ratio_limit_probe(const PowerSum &f, double f0,
                                      std::span<const double> probe_times) {
    const PowerSum shifted = (f + PowerSum::constant(-f0)).combined();
    std::vector<double> out;
    out.reserve(probe_times.size());
    for (double t : probe_times) {
        check_probe(t);
        out.push_back(ratio_from(t, shifted(t), shifted.integral(t)));
    }
    return out;
}

std::vector<double> ratio_limit_probe_type2(const SampledFunction &f, double f0, const PowerSum &r0,
                                            std::span<const double> probe_times) {
    std::vector<double> weighted(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        weighted[k] = r0(f.times()[k]) * f.values()[k];
    return ratio_limit_probe(SampledFunction(f.times(), std::move(weighted)), r0(0.0) * f0,
                             probe_times);
}

std::vector<double> ratio_limit_probe_type2(const PowerSum &f, double f0, const PowerSum &r0,
                                            std::span<const double> probe_times) {
    return ratio_limit_probe(r0 * f, r0(0.0) * f0, probe_times);
}

double extrapolate_to_origin(const SampledFunction &d, double exponent) {
    if (!(exponent > 0.0))
        throw DomainError("extrapolate_to_origin: exponent must be positive");
    const double ta = 0.5 * d.end_time();
    const double tb = 0.25 * d.end_time();
    const double da = d.value_at(ta);
    const double db = d.value_at(tb);
    const double pa = std::pow(ta, exponent);
    const double pb = std::pow(tb, exponent);
    const double slope = (da - db) / (pa - pb);
    return da - slope * pa;
}

OriginIdentity check_origin_identity(const SampledFunction &v, const FdoDescriptor &fdo) {
    fdo.validate();
    for (const auto &r : fdo.coefficients)
        if (!r.is_polynomial())
            throw PreconditionError("check_origin_identity: coefficients must be polynomials");

    const double nu0 = fdo.leading_order();
    auto exponent_for = [&](std::size_t i) {
        return i == 0 ? std::min(nu0, 1.0 - nu0) : nu0 - fdo.orders[i];
    };

    OriginIdentity out;
    out.lhs = fdo.r0()(0.0) * extrapolate_to_origin(caputo_l1(v, nu0), exponent_for(0));

    double rhs = 0.0;
    for (std::size_t i = 0; i < fdo.orders.size(); ++i) {
        const PowerSum &r = fdo.coefficients[i];
        if (fdo.kind == FdoKind::TypeI) {
            rhs += r(0.0) * extrapolate_to_origin(caputo_l1(v, fdo.orders[i]), exponent_for(i));
        } else {
            std::vector<double> product(v.size());
            for (std::size_t k = 0; k < v.size(); ++k)
                product[k] = r(v.times()[k]) * v.values()[k];
            const SampledFunction rv(v.times(), std::move(product));
            rhs += extrapolate_to_origin(caputo_l1(rv, fdo.orders[i]), exponent_for(i));
        }
    }
    out.rhs = rhs;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

} // namespace fracorder
