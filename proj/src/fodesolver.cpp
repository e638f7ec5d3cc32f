#include "fracorder/fodesolver.hpp"

#include "fracorder/errors.hpp"
#include "fracorder/fraccalc.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fracorder {

void FodeProblem::validate() const {
    fdo.validate();
    if (fdo.kind != FdoKind::TypeI)
        throw PreconditionError("fode: only type I operators can be solved");
    if (!f0)
        throw PreconditionError("fode: source f0 is missing");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("fode: horizon must be positive");
    if (!std::isfinite(v0))
        throw DomainError("fode: v0 must be finite");
    for (const auto &term : kernel.terms())
        if (!(term.exponent > -1.0))
            throw DomainError("fode: kernel exponents must exceed -1");
}

double FodeProblem::initial_drift() const { return f0(0.0) + f(0.0, v0) - v0; }

std::vector<double> FodeMesh::times(double horizon) const {
    if (steps < 4)
        throw DomainError("fode mesh: at least 4 steps are needed");
    if (!(grading >= 1.0))
        throw DomainError("fode mesh: grading must be at least 1");
    std::vector<double> t(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n)
        t[n] = horizon * std::pow(static_cast<double>(n) / static_cast<double>(steps), grading);
    t[steps] = horizon;
    return t;
}

double optimal_grading(double nu0) {
    if (!(nu0 > 0.0 && nu0 < 1.0))
        throw DomainError("optimal_grading: order must lie in (0,1)");
    return (2.0 - nu0) / nu0;
}

namespace {

struct DerivativeTerm {
    double order;
    PowerSum coefficient;
    double sign;
    double scale; // 1 / Gamma(2 - order)
};

std::vector<DerivativeTerm> derivative_terms(const FdoDescriptor &fdo) {
    std::vector<DerivativeTerm> out;
    for (std::size_t i = 0; i < fdo.orders.size(); ++i)
        out.push_back({fdo.orders[i], fdo.coefficients[i], 1.0, 1.0 / gamma_fn(2.0 - fdo.orders[i])});
    for (std::size_t i = 0; i < fdo.negative_orders.size(); ++i)
        out.push_back({fdo.negative_orders[i], fdo.negative_coefficients[i], -1.0,
                       1.0 / gamma_fn(2.0 - fdo.negative_orders[i])});
    return out;
}

// Root of  alpha v + rest - f(t, v) = 0  near guess.
double solve_node(const FodeProblem &p, double t, double alpha, double rest, double guess, std::size_t node,
                  unsigned &iters) {
    auto g = [&](double v) { return alpha * v + rest - p.f(t, v); };
    if (!p.nonlinearity) {
        iters = 1;
        return -rest / alpha;
    }

    double v = guess;
    double gv = g(v);
    for (iters = 1; iters <= kFodeMaxIterations; ++iters) {
        if (!std::isfinite(gv))
            break;
        const double dv = 1e-7 * std::max(1.0, std::abs(v));
        const double slope = (g(v + dv) - g(v - dv)) / (2.0 * dv);
        if (!(std::abs(slope) > 0.0) || !std::isfinite(slope))
            break;
        double step = -gv / slope;
        double trial = v + step;
        double gt = g(trial);
        for (int halvings = 0; halvings < 30 && !(std::abs(gt) < std::abs(gv)); ++halvings) {
            step *= 0.5;
            trial = v + step;
            gt = g(trial);
        }
        v = trial;
        gv = gt;
        if (std::abs(step) <= kFodeTolerance * std::max(1.0, std::abs(v)) || gv == 0.0)
            return v;
    }

    // bisection on a bracket around the previous value
    const double width = std::max(1.0, std::abs(guess));
    double lo = guess - width;
    double hi = guess + width;
    double glo = g(lo);
    double ghi = g(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi))
        throw DivergenceError(fmt::format("fode: non-finite residual at node {}", node));
    if (glo * ghi > 0.0)
        throw ConvergenceError(fmt::format("fode: Newton failed and no sign change in the bracket at node {}", node),
                               node);
    for (iters = 1; iters <= kFodeMaxIterations; ++iters) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0 || hi - lo <= kFodeTolerance * std::max(1.0, std::abs(mid)))
            return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    throw ConvergenceError(fmt::format("fode: bisection did not converge at node {}", node), node);
}

} // namespace

FodeSolution solve(const FodeProblem &problem, const FodeMesh &mesh) {
    problem.validate();
    const auto t = mesh.times(problem.horizon);
    const std::size_t n_nodes = t.size();
    const auto terms = derivative_terms(problem.fdo);
    const auto &kernel = problem.kernel.terms();

    FodeSolution sol;
    sol.times = t;
    sol.values.assign(n_nodes, 0.0);
    sol.iterations.assign(n_nodes, 0);
    sol.values[0] = problem.v0;
    auto &v = sol.values;

    for (std::size_t n = 1; n < n_nodes; ++n) {
        const double tn = t[n];
        const double hn = tn - t[n - 1];
        double alpha = 1.0;
        double rest = -problem.f0(tn);

        for (const auto &term : terms) {
            const double w = term.sign * term.coefficient(tn) * term.scale;
            const double p = 1.0 - term.order;
            double hist = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k)
                hist += (v[k + 1] - v[k]) / (t[k + 1] - t[k]) * pow_diff(tn - t[k + 1], t[k + 1] - t[k], p);
            const double last = std::pow(hn, p) / hn;
            alpha += w * last;
            rest += w * (hist - last * v[n - 1]);
        }

        for (const auto &[c, e] : kernel) {
            double hist = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const auto wk = power_kernel_weights(tn, t[k], t[k + 1], e);
                hist += wk.left * v[k] + wk.right * v[k + 1];
            }
            const auto wl = power_kernel_weights(tn, t[n - 1], tn, e);
            alpha += c * wl.right;
            rest += c * (hist + wl.left * v[n - 1]);
        }

        if (!std::isfinite(alpha) || !std::isfinite(rest))
            throw DivergenceError(fmt::format("fode: non-finite coefficients at node {}", n));
        if (alpha == 0.0 && !problem.nonlinearity)
            throw ConvergenceError(fmt::format("fode: singular nodal equation at node {}", n), n);
        v[n] = solve_node(problem, tn, alpha, rest, v[n - 1], n, sol.iterations[n]);
        if (!std::isfinite(v[n]))
            throw DivergenceError(fmt::format("fode: non-finite value at node {}", n));
    }
    return sol;
}

FodeSolution solve(const FodeProblem &problem, double h) {
    if (!(h > 0.0) || h > problem.horizon / 4.0)
        throw DomainError("fode: step must lie in (0, T/4]");
    FodeMesh mesh;
    mesh.steps = static_cast<std::size_t>(std::llround(problem.horizon / h));
    return solve(problem, mesh);
}

std::vector<double> linking_probe_times(double horizon) {
    std::vector<double> out;
    for (int m = 1; m <= 8; ++m)
        out.push_back(std::ldexp(horizon, -m));
    return out;
}

double verify_linking(const FodeSolution &solution, const FodeProblem &problem) {
    const double drift = problem.initial_drift();
    if (!(std::abs(drift) > 1e-14 * std::max(1.0, std::abs(problem.v0))))
        throw PreconditionError("verify_linking: f0(0) + f(0, v0) - v0 vanishes, the order is not identifiable");
    const SampledFunction v(solution.times, solution.values);
    const auto probes = linking_probe_times(solution.times.back());
    const auto x = ratio_limit_probe(v, problem.v0, probes);

    // Aitken on the last three probes; the probes are geometric in t, so a
    // single power-law correction is removed exactly.
    const std::size_t m = x.size();
    const double d1 = x[m - 2] - x[m - 3];
    const double d2 = x[m - 1] - x[m - 2];
    const double dd = d2 - d1;
    const double q = d1 != 0.0 ? d2 / d1 : 0.0;
    if (dd == 0.0 || !(q > 0.0 && q < 1.0))
        return x[m - 1];
    return x[m - 1] - d2 * d2 / dd;
}

FodeProblem manufactured_power_problem(const FdoDescriptor &fdo, const PowerSum &kernel,
                                       std::function<double(double, double)> nonlinearity, double v0,
                                       double horizon) {
    fdo.validate();
    for (const auto &c : fdo.coefficients)
        if (!c.is_polynomial())
            throw PreconditionError("manufactured problem: coefficients must be polynomials");
    const double nu0 = fdo.leading_order();
    const double amp = 1.0 / gamma_fn(1.0 + nu0);

    // Left-hand side without the nonlinearity, as an explicit function of t.
    std::vector<std::pair<PowerSum, PowerSum>> derivative_parts; // (coefficient, D^order v)
    for (std::size_t i = 0; i < fdo.orders.size(); ++i)
        derivative_parts.push_back(
            {fdo.coefficients[i], PowerSum::monomial(amp * gamma_fn(1.0 + nu0) / gamma_fn(1.0 + nu0 - fdo.orders[i]),
                                                     nu0 - fdo.orders[i])});
    for (std::size_t i = 0; i < fdo.negative_orders.size(); ++i)
        derivative_parts.push_back(
            {fdo.negative_coefficients[i].scaled(-1.0),
             PowerSum::monomial(amp * gamma_fn(1.0 + nu0) / gamma_fn(1.0 + nu0 - fdo.negative_orders[i]),
                                nu0 - fdo.negative_orders[i])});

    PowerSum lhs = PowerSum::constant(v0) + PowerSum::monomial(amp, nu0);
    for (const auto &[r, d] : derivative_parts)
        lhs = lhs + r * d;
    for (const auto &[c, e] : kernel.terms()) {
        // int_0^t (t-s)^e (v0 + amp s^nu0) ds
        lhs = lhs + PowerSum::monomial(c * v0 / (e + 1.0), e + 1.0) +
              PowerSum::monomial(c * amp * beta_fn(e + 1.0, nu0 + 1.0), e + 1.0 + nu0);
    }
    lhs = lhs.combined();

    FodeProblem p;
    p.fdo = fdo;
    p.kernel = kernel;
    p.nonlinearity = nonlinearity;
    p.v0 = v0;
    p.horizon = horizon;
    p.f0 = [lhs, nonlinearity, v0, amp, nu0](double t) {
        const double exact = v0 + amp * std::pow(t, nu0);
        return lhs(t) - (nonlinearity ? nonlinearity(t, exact) : 0.0);
    };
    return p;
}

} // namespace fracorder
