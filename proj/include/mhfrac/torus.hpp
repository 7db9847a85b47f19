#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace mhfrac {

/// Periodic function w(theta) = sum_{|n| <= N} c(n) exp(i n 2 pi theta / T).
class TorusFunction {
public:
    using Complex = std::complex<double>;

    /// coefficients[k] holds c(k - N) where coefficients.size() == 2N + 1, N >= 1.
    /// A real-valued function must satisfy c(-n) = conj(c(n)) (checked to 1e-12).
    TorusFunction(std::vector<Complex> coefficients, double period = 2.0 * 3.14159265358979323846,
                  bool real_valued = true);

    /// w = a0 + sum_n (a_n cos(n phi) + b_n sin(n phi)), phi = 2 pi theta / T; a and b
    /// hold n = 1 .. N.
    static TorusFunction from_real(double a0, const std::vector<double>& a, const std::vector<double>& b,
                                   double period = 2.0 * 3.14159265358979323846);

    int max_mode() const { return max_mode_; }
    double period() const { return period_; }
    bool real_valued() const { return real_valued_; }
    Complex coefficient(int n) const;
    const std::vector<Complex>& coefficients() const { return coeffs_; }

    Complex evaluate(double theta) const;
    /// Real part of evaluate().
    double operator()(double theta) const { return evaluate(theta).real(); }
    /// Derivative with respect to theta.
    Complex derivative(double theta) const;

    /// int_0^T |w|^2 = T sum |c(n)|^2.
    double l2_norm_squared() const;
    /// max |w| over a grid fine enough for the degree.
    double sampled_max_modulus() const;

    /// Copy with c(0) replaced so that w(theta0) = 0 (real part; exact for real functions).
    TorusFunction vanishing_at(double theta0) const;
    TorusFunction scaled(double factor) const;

private:
    std::vector<Complex> coeffs_;
    double period_;
    int max_mode_;
    bool real_valued_;
};

/// min over k of |alpha + k T|.
double torus_norm(double alpha, double period = 2.0 * 3.14159265358979323846);

/// Min and max of 2|sin(a/2)| / |a|_{S^1} over a_k = 2 pi k / grid_size, 0 < k < grid_size.
std::pair<double, double> chord_ratio_extrema(int grid_size);

/// max over the same grid of | |e^{ia} - 1| - 2|sin(a/2)| |.
double chord_identity_defect(int grid_size);

/// W_s(n) = 8 pi int_0^pi (1 - cos(h n)) h^{-1-2s} dh. Cached per (s, n).
double mode_weight(int n, double s);

/// Seminorm from the Fourier weights: (T / 2 pi)^{1-2s} sum_{n != 0} W_s(n) |c(n)|^2.
double seminorm_fourier(const TorusFunction& w, double s);

/// Seminorm by direct quadrature of the double integral in (theta, h) with the torus
/// kernel. The h-range [delta, pi], delta = 2 pi / panels, uses 4-point Gauss panels of
/// width delta; [0, delta] is graded geometrically over 4 levels and the innermost
/// piece uses the leading Taylor term |w'|^2 h^2.
double seminorm_quadrature(const TorusFunction& w, double s, int panels);

/// seminorm_fourier(w) - mu_s (2 pi / T)^{2s} int_0^T |w|^2. Throws HypothesisError when
/// |w(theta0)| exceeds 1e-10 max|w|.
double poincare_margin(const TorusFunction& w, double s, double theta0);

/// w(. + shift): coefficients multiplied by exp(i n 2 pi shift / T).
TorusFunction translate(const TorusFunction& w, double shift);

/// Real trigonometric polynomial of the given degree with standard normal coefficients.
TorusFunction random_trig_polynomial(int degree, std::uint64_t seed, double period = 2.0 * 3.14159265358979323846);

}  // namespace mhfrac
