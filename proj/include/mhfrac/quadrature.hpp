#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mhfrac::quad {

/// Nodes and weights of a one-dimensional rule on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Results are cached per n.
const Rule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1], a, b > -1.
/// Computed by Golub-Welsch.
Rule gauss_jacobi(int n, double a, double b);

struct AdaptiveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_intervals = 4000;
};

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
AdaptiveResult integrate(const std::function<double(double)>& f, double a, double b,
                         const AdaptiveOptions& opts = {});

/// Same as integrate() but throws ConvergenceError when the tolerance is not met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts = {});

/// Integral of f(r) r^{-q} over [0, breaks.back()], where f is smooth (typically
/// polynomial) between consecutive breakpoints and f(r) = O(r^m) at r = 0 with
/// m = vanishing_order. The first piece is handled by Gauss-Jacobi with weight
/// r^{m-q}, so m - q > -1 is required. Breakpoints must start at 0 and increase.
double radial_power_integral(const std::function<double(double)>& f, std::span<const double> breaks,
                             double q, int vanishing_order, int points = 10);

}  // namespace mhfrac::quad
