#include "mhfrac/constants.hpp"

#include "mhfrac/error.hpp"
#include "mhfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace mhfrac {

namespace {

constexpr double pi = std::numbers::pi;

void require_open_unit(double s, const char* who) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError(std::string(who) + ": s must lie in (0, 1)");
}

void require_upper_half(double s, const char* who) {
    if (!(s > 0.5 && s < 1.0)) throw DomainError(std::string(who) + ": s must lie in (1/2, 1)");
}

}  // namespace

MSConfig MSConfig::user(double cn) {
    MSConfig c;
    c.mode = Mode::user_supplied;
    c.cn = cn;
    return c;
}

MSConfig MSConfig::empirical(double battery_max, double safety_factor) {
    if (!(battery_max > 0.0) || !(safety_factor > 0.0))
        throw DomainError("empirical MSConfig needs a positive battery maximum and safety factor");
    MSConfig c;
    c.mode = Mode::empirical;
    c.battery_max = battery_max;
    c.safety_factor = safety_factor;
    c.cn = safety_factor * battery_max / ms_assembly_factor();
    return c;
}

std::string MSConfig::describe() const {
    std::ostringstream os;
    if (mode == Mode::user_supplied) {
        os << "user-supplied C_N=" << cn;
    } else {
        os << "empirical (uncertified) C_N=" << cn << " from battery max " << battery_max << " x safety "
           << safety_factor;
    }
    return os.str();
}

double ms_assembly_factor() {
    constexpr int dim = 2;
    const double radius = std::sqrt(2.0);
    const double omega = pi;  // |B_1| in the plane
    const double extension = 1.0 + std::pow(radius, 4 * dim) + 2.0 * std::pow(radius, 2 * dim);
    return 2.0 * (omega + std::pow(2.0, dim)) * extension;
}

double ms_default(const MSConfig& config) {
    if (!(config.cn > 0.0) || !std::isfinite(config.cn))
        throw DomainError("ms_default: C_N must be supplied as a positive number");
    return ms_assembly_factor() * config.cn;
}

double cosine_gap_integral(double s, double upper) {
    require_open_unit(s, "cosine_gap_integral");
    if (upper <= 0.0) return 0.0;
    const double split = std::min(1.0, upper);
    // int_0^a (1 - cos t) t^{-1-2s} dt = sum_k (-1)^{k+1} a^{2k-2s} / ((2k)! (2k - 2s))
    double series = 0.0;
    double factorial = 1.0;
    for (int k = 1; k <= 30; ++k) {
        factorial *= (2.0 * k - 1.0) * (2.0 * k);
        const double term = std::pow(split, 2.0 * k - 2.0 * s) / (factorial * (2.0 * k - 2.0 * s));
        series += (k % 2 == 1) ? term : -term;
        if (term < 1e-18 * std::abs(series)) break;
    }
    if (upper <= 1.0) return series;
    const auto integrand = [s](double t) { return (1.0 - std::cos(t)) * std::pow(t, -1.0 - 2.0 * s); };
    // oscillatory range split into pieces of length pi
    double rest = 0.0;
    quad::AdaptiveOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-15;
    for (double a = 1.0; a < upper; a += pi) {
        const double b = std::min(upper, a + pi);
        rest += quad::integrate_or_throw(integrand, a, b, opts);
    }
    return series + rest;
}

double c1s(double s) {
    require_open_unit(s, "c1s");
    return 8.0 * pi * cosine_gap_integral(s, pi);
}

Bracket c2s_bracket(double s, double rel_width) {
    require_upper_half(s, "c2s");
    static std::mutex mutex;
    static std::map<std::pair<double, double>, Bracket> memo;
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find({s, rel_width}); it != memo.end()) return it->second;
    }
    const double p = 2.0 * s;
    const auto f = [p](double n) { return std::pow(n, -p); };
    const auto antiderivative_tail = [p](double x) { return std::pow(x, 1.0 - p) / (p - 1.0); };
    Bracket b;
    double partial = 0.0;
    long summed = 0;
    for (long terms = 1000;; terms *= 2) {
        // extend the partial sum, smallest terms first within the new block
        double block = 0.0;
        for (long n = terms; n > summed; --n) block += f(static_cast<double>(n));
        partial += block;
        summed = terms;
        // n^{-p} is convex and decreasing: trapezoid and midpoint comparisons give
        // int_{N+1}^inf f + f(N+1)/2 <= sum_{n>N} f(n) <= int_{N+1/2}^inf f
        const double tail_lo = antiderivative_tail(terms + 1.0) + 0.5 * f(terms + 1.0);
        const double tail_hi = antiderivative_tail(terms + 0.5);
        b.lower = 2.0 * pi * (1.0 + 2.0 * (partial + tail_lo));
        b.upper = 2.0 * pi * (1.0 + 2.0 * (partial + tail_hi));
        b.terms = terms;
        if (b.width() <= rel_width * b.lower || terms >= 100'000'000L) break;
    }
    std::lock_guard lock(mutex);
    memo.emplace(std::make_pair(s, rel_width), b);
    return b;
}

double c2s(double s) { return c2s_bracket(s).mid(); }

double mu_s(double s) {
    require_upper_half(s, "mu_s");
    return c1s(s) / c2s(s);
}

double t_s(double s, const MSConfig& ms) {
    require_upper_half(s, "t_s");
    const double m = ms_default(ms);
    return 1.0 / (20.0 * (1.0 + 2.0 * s) / (3.0 * mu_s(s)) + 8.0 / (3.0 * pi) * m * (1.0 - s));
}

double c_s(double s, const MSConfig& ms) {
    return t_s(s, ms) / (36.0 * std::pow(1.0 + std::sqrt(2.0), 2.0 * s));
}

double beta_s(double s) {
    require_open_unit(s, "beta_s");
    return std::pow(4.0, 1.0 - s) * pi / (s * (1.0 - s));
}

double alpha_s(double s, double lambda1_disk, const MSConfig& ms) {
    if (!(lambda1_disk > 0.0)) throw DomainError("alpha_s: disk eigenvalue must be positive");
    return c_s(s, ms) / std::pow(lambda1_disk, s);
}

double bessel_j0_first_zero() {
    double lo = 2.0;
    double hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::cyl_bessel_j(0.0, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    // Newton polish: J0' = -J1
    for (int i = 0; i < 3; ++i) x += std::cyl_bessel_j(0.0, x) / std::cyl_bessel_j(1.0, x);
    return x;
}

double disk_dirichlet_eigenvalue() {
    static const double value = [] {
        const double j = bessel_j0_first_zero();
        return j * j;
    }();
    return value;
}

ConstantsProfile constants_profile(double s, const MSConfig& ms, double lambda1_disk) {
    require_open_unit(s, "constants_profile");
    ConstantsProfile p;
    p.s = s;
    p.c1s = c1s(s);
    p.beta_s = beta_s(s);
    p.ms_constant = ms_default(ms);
    if (s > 0.5) {
        p.c2s = c2s(s);
        p.mu_s = p.c1s / *p.c2s;
        p.t_s = t_s(s, ms);
        p.c_s = c_s(s, ms);
        p.alpha_s = alpha_s(s, lambda1_disk, ms);
    }
    return p;
}

}  // namespace mhfrac
