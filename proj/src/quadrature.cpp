#include "mhfrac/quadrature.hpp"

#include "mhfrac/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace mhfrac::quad {

namespace {

Rule compute_gauss_legendre(int n) {
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

// Kronrod 15-point nodes (nonnegative half) and weights, with the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

Rule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw DomainError("gauss_jacobi: n must be positive");
    if (a <= -1.0 || b <= -1.0) throw DomainError("gauss_jacobi: exponents must exceed -1");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * k + ab;
        if (k == 0) {
            diag(k) = (b - a) / (ab + 2.0);
        } else {
            diag(k) = (b * b - a * a) / (t * (t + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        const double t = 2.0 * k + ab;
        double beta;
        if (k == 1) {
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
        }
        sub(k - 1) = std::sqrt(beta);
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(ab + 2.0));
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

AdaptiveResult integrate(const std::function<double(double)>& f, double a, double b,
                         const AdaptiveOptions& opts) {
    AdaptiveResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int intervals = 1;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) && intervals < opts.max_intervals) {
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Resum to limit roundoff drift from the incremental updates.
    double value = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    result.value = value;
    result.error = err;
    result.intervals = intervals;
    result.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    return result;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts) {
    const auto r = integrate(f, a, b, opts);
    if (!r.converged) {
        throw ConvergenceError("adaptive quadrature did not reach tolerance (estimated error " +
                               std::to_string(r.error) + ", value " + std::to_string(r.value) + ")");
    }
    return r.value;
}

double radial_power_integral(const std::function<double(double)>& f, std::span<const double> breaks,
                             double q, int vanishing_order, int points) {
    if (breaks.size() < 2) return 0.0;
    const double expo = vanishing_order - q;
    if (expo <= -1.0) throw DomainError("radial_power_integral: r^(m-q) not integrable at 0");
    double total = 0.0;
    {
        static thread_local std::map<std::pair<int, double>, Rule> jacobi_cache;
        auto key = std::make_pair(points, expo);
        auto it = jacobi_cache.find(key);
        if (it == jacobi_cache.end()) it = jacobi_cache.emplace(key, gauss_jacobi(points, 0.0, expo)).first;
        const Rule& rule = it->second;
        const double r1 = breaks[1];
        if (r1 > 0.0) {
            const double half = 0.5 * r1;
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double r = half * (1.0 + rule.nodes[i]);
                acc += rule.weights[i] * f(r) / std::pow(r, vanishing_order);
            }
            total += acc * std::pow(half, expo + 1.0);
        }
    }
    const Rule& gl = gauss_legendre(points);
    for (std::size_t k = 1; k + 1 < breaks.size(); ++k) {
        const double ra = breaks[k];
        const double rb = breaks[k + 1];
        if (rb <= ra) continue;
        const double center = 0.5 * (ra + rb);
        const double half = 0.5 * (rb - ra);
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = center + half * gl.nodes[i];
            acc += gl.weights[i] * f(r) * std::pow(r, -q);
        }
        total += acc * half;
    }
    return total;
}

}  // namespace mhfrac::quad
