#pragma once

#include "fracorder/fdo.hpp"
#include "fracorder/power_sum.hpp"

#include <functional>
#include <vector>

namespace fracorder {

/// Scalar Cauchy problem on [0, T]
///   sum_i r_i(t) D^{nu_i} v - sum_j g_j(t) D^{mu_j} v + (K * v)(t) + v(t) = f0(t) + f(t, v(t)),
///   v(0) = v0,
/// with a type I operator and a power-sum memory kernel K.
struct FodeProblem {
    FdoDescriptor fdo;
    PowerSum kernel;
    std::function<double(double)> f0;
    /// Must be deterministic; an empty function means f = 0.
    std::function<double(double, double)> nonlinearity;
    double v0 = 0.0;
    double horizon = 1.0;

    void validate() const;
    double f(double t, double v) const { return nonlinearity ? nonlinearity(t, v) : 0.0; }
    /// f0(0) + f(0, v0) - v0; the leading behaviour of v - v0 is proportional to it.
    double initial_drift() const;
};

/// Nodes t_n = T (n/N)^grading, n = 0..N. grading = 1 is the uniform mesh.
struct FodeMesh {
    std::size_t steps = 0;
    double grading = 1.0;

    std::vector<double> times(double horizon) const;
};

/// Grading (2 - nu0)/nu0 that restores the O(N^{nu0 - 2}) L1 accuracy for
/// solutions behaving like t^{nu0} near the origin.
double optimal_grading(double nu0);

struct FodeSolution {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<unsigned> iterations; ///< Newton (or bisection) iterations per node
};

inline constexpr unsigned kFodeMaxIterations = 100;
inline constexpr double kFodeTolerance = 1e-12;

FodeSolution solve(const FodeProblem &problem, const FodeMesh &mesh);
/// Uniform step h <= T/4 (rounded to the nearest whole number of steps).
FodeSolution solve(const FodeProblem &problem, double h);

/// Estimate of nu0 from the solution alone: the ratio formula at
/// T 2^{-m}, m = 1..8, followed by Aitken extrapolation toward t = 0.
double verify_linking(const FodeSolution &solution, const FodeProblem &problem);

/// Probe times T 2^{-m}, m = 1..8.
std::vector<double> linking_probe_times(double horizon);

/// Problem whose exact solution is v0 + t^{nu0}/Gamma(1+nu0), built from the
/// power rule and the kernel convolution identity. Coefficients of fdo must be
/// polynomials.
FodeProblem manufactured_power_problem(const FdoDescriptor &fdo, const PowerSum &kernel,
                                       std::function<double(double, double)> nonlinearity, double v0,
                                       double horizon);

} // namespace fracorder
