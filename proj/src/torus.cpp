#include "mhfrac/torus.hpp"

#include "mhfrac/constants.hpp"
#include "mhfrac/error.hpp"
#include "mhfrac/quadrature.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace mhfrac {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("torus: s must lie in (0, 1)");
}

}  // namespace

TorusFunction::TorusFunction(std::vector<Complex> coefficients, double period, bool real_valued)
    : coeffs_(std::move(coefficients)), period_(period), real_valued_(real_valued) {
    if (!(period_ > 0.0)) throw DomainError("TorusFunction: period must be positive");
    if (coeffs_.size() < 3 || coeffs_.size() % 2 == 0)
        throw DimensionError("TorusFunction: need 2N + 1 coefficients with N >= 1");
    max_mode_ = static_cast<int>(coeffs_.size() / 2);
    if (real_valued_) {
        double scale = 0.0;
        for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
        for (int n = 0; n <= max_mode_; ++n) {
            if (std::abs(coefficient(-n) - std::conj(coefficient(n))) > 1e-12 * std::max(1.0, scale))
                throw DomainError("TorusFunction: real-valued coefficients must satisfy c(-n) = conj(c(n))");
        }
    }
}

TorusFunction TorusFunction::from_real(double a0, const std::vector<double>& a, const std::vector<double>& b,
                                       double period) {
    const std::size_t n = std::max({a.size(), b.size(), std::size_t{1}});
    std::vector<Complex> c(2 * n + 1, Complex{});
    c[n] = a0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double ak = k <= a.size() ? a[k - 1] : 0.0;
        const double bk = k <= b.size() ? b[k - 1] : 0.0;
        c[n + k] = Complex(ak, -bk) / 2.0;
        c[n - k] = Complex(ak, bk) / 2.0;
    }
    return TorusFunction(std::move(c), period, true);
}

TorusFunction::Complex TorusFunction::coefficient(int n) const {
    if (n < -max_mode_ || n > max_mode_) return {};
    return coeffs_[static_cast<std::size_t>(n + max_mode_)];
}

TorusFunction::Complex TorusFunction::evaluate(double theta) const {
    const double phi = two_pi * theta / period_;
    Complex sum{};
    for (int n = -max_mode_; n <= max_mode_; ++n) sum += coefficient(n) * std::polar(1.0, n * phi);
    return sum;
}

TorusFunction::Complex TorusFunction::derivative(double theta) const {
    const double phi = two_pi * theta / period_;
    const double scale = two_pi / period_;
    Complex sum{};
    for (int n = -max_mode_; n <= max_mode_; ++n)
        sum += Complex(0.0, n * scale) * coefficient(n) * std::polar(1.0, n * phi);
    return sum;
}

double TorusFunction::l2_norm_squared() const {
    double sum = 0.0;
    for (const auto& c : coeffs_) sum += std::norm(c);
    return period_ * sum;
}

double TorusFunction::sampled_max_modulus() const {
    const int samples = 64 * (max_mode_ + 1);
    double best = 0.0;
    for (int k = 0; k < samples; ++k) best = std::max(best, std::abs(evaluate(period_ * k / samples)));
    return best;
}

TorusFunction TorusFunction::vanishing_at(double theta0) const {
    std::vector<Complex> c = coeffs_;
    c[static_cast<std::size_t>(max_mode_)] -= real_valued_ ? Complex(evaluate(theta0).real()) : evaluate(theta0);
    return TorusFunction(std::move(c), period_, real_valued_);
}

TorusFunction TorusFunction::scaled(double factor) const {
    std::vector<Complex> c = coeffs_;
    for (auto& x : c) x *= factor;
    return TorusFunction(std::move(c), period_, real_valued_);
}

double torus_norm(double alpha, double period) {
    if (!(period > 0.0)) throw DomainError("torus_norm: period must be positive");
    double r = std::fmod(alpha, period);
    if (r < 0.0) r += period;
    return std::min(r, period - r);
}

std::pair<double, double> chord_ratio_extrema(int grid_size) {
    if (grid_size < 16) throw DomainError("chord_ratio_extrema: grid_size must be at least 16");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 1; k < grid_size; ++k) {
        const double a = two_pi * k / grid_size;
        const double ratio = 2.0 * std::abs(std::sin(a / 2.0)) / torus_norm(a);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

double chord_identity_defect(int grid_size) {
    if (grid_size < 16) throw DomainError("chord_identity_defect: grid_size must be at least 16");
    double worst = 0.0;
    for (int k = 0; k <= grid_size; ++k) {
        const double a = two_pi * k / grid_size;
        const double lhs = std::abs(std::polar(1.0, a) - 1.0);
        worst = std::max(worst, std::abs(lhs - 2.0 * std::abs(std::sin(a / 2.0))));
    }
    return worst;
}

double mode_weight(int n, double s) {
    require_order(s);
    if (n == 0) return 0.0;
    const int m = std::abs(n);
    static std::mutex mutex;
    static std::map<std::pair<std::uint64_t, int>, double> cache;
    const auto key = std::make_pair(std::bit_cast<std::uint64_t>(s), m);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // substitute t = h m
    const double value = 8.0 * std::numbers::pi * std::pow(m, 2.0 * s) * cosine_gap_integral(s, std::numbers::pi * m);
    std::lock_guard lock(mutex);
    cache.emplace(key, value);
    return value;
}

double seminorm_fourier(const TorusFunction& w, double s) {
    require_order(s);
    double sum = 0.0;
    for (int n = 1; n <= w.max_mode(); ++n)
        sum += mode_weight(n, s) * (std::norm(w.coefficient(n)) + std::norm(w.coefficient(-n)));
    return std::pow(w.period() / two_pi, 1.0 - 2.0 * s) * sum;
}

double seminorm_quadrature(const TorusFunction& w, double s, int panels) {
    require_order(s);
    if (panels < 64) throw DomainError("seminorm_quadrature: panels must be at least 64");
    using Complex = TorusFunction::Complex;
    const int modes = w.max_mode();
    // trapezoid in theta: exact for the trigonometric polynomials involved
    const int samples = std::max(64, 4 * modes + 8);
    std::vector<Complex> basis(static_cast<std::size_t>(samples) * (2 * modes + 1));
    std::vector<Complex> values(samples);
    std::vector<Complex> slopes(samples);
    for (int j = 0; j < samples; ++j) {
        const double phi = two_pi * j / samples;
        Complex v{};
        Complex dv{};
        for (int n = -modes; n <= modes; ++n) {
            const Complex e = w.coefficient(n) * std::polar(1.0, n * phi);
            basis[static_cast<std::size_t>(j) * (2 * modes + 1) + (n + modes)] = e;
            v += e;
            dv += Complex(0.0, n) * e;
        }
        values[j] = v;
        slopes[j] = dv;
    }
    const double dphi = two_pi / samples;
    std::vector<Complex> shift(2 * modes + 1);
    const auto gap = [&](double h) {
        for (int n = -modes; n <= modes; ++n) shift[n + modes] = std::polar(1.0, n * h);
        double total = 0.0;
        for (int j = 0; j < samples; ++j) {
            Complex moved{};
            const Complex* row = &basis[static_cast<std::size_t>(j) * (2 * modes + 1)];
            for (int k = 0; k < 2 * modes + 1; ++k) moved += row[k] * shift[k];
            total += std::norm(moved - values[j]);
        }
        return total * dphi;
    };
    const auto& gl = quad::gauss_legendre(4);
    const auto panel = [&](double a, double b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double h = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
            sum += gl.weights[q] * gap(h) * std::pow(h, -1.0 - 2.0 * s);
        }
        return 0.5 * (b - a) * sum;
    };
    const double pi = std::numbers::pi;
    const double delta = two_pi / panels;
    double half = 0.0;
    for (double a = delta; a < pi - 1e-14; a += delta) half += panel(a, std::min(pi, a + delta));
    double level = delta;
    for (int g = 0; g < 4; ++g) {
        half += panel(level / 2.0, level);
        level /= 2.0;
    }
    double slope_energy = 0.0;
    for (const Complex& d : slopes) slope_energy += std::norm(d);
    slope_energy *= dphi;
    half += slope_energy * std::pow(level, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    // the h -> -h half is identical
    return std::pow(w.period() / two_pi, 1.0 - 2.0 * s) * 2.0 * half;
}

double poincare_margin(const TorusFunction& w, double s, double theta0) {
    if (!(s > 0.5 && s < 1.0)) throw DomainError("poincare_margin: s must lie in (1/2, 1)");
    const double scale = w.sampled_max_modulus();
    if (std::abs(w.evaluate(theta0)) > 1e-10 * scale)
        throw HypothesisError("poincare_margin: w does not vanish at theta0");
    const double rhs = mu_s(s) * std::pow(two_pi / w.period(), 2.0 * s) * w.l2_norm_squared();
    return seminorm_fourier(w, s) - rhs;
}

TorusFunction translate(const TorusFunction& w, double shift) {
    std::vector<TorusFunction::Complex> c = w.coefficients();
    const int modes = w.max_mode();
    for (int n = -modes; n <= modes; ++n) c[n + modes] *= std::polar(1.0, n * two_pi * shift / w.period());
    return TorusFunction(std::move(c), w.period(), w.real_valued());
}

TorusFunction random_trig_polynomial(int degree, std::uint64_t seed, double period) {
    if (degree < 1) throw DomainError("random_trig_polynomial: degree must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double a0 = normal(rng);
    std::vector<double> a(degree);
    std::vector<double> b(degree);
    for (int k = 0; k < degree; ++k) {
        a[k] = normal(rng);
        b[k] = normal(rng);
    }
    return TorusFunction::from_real(a0, a, b, period);
}

}  // namespace mhfrac
