#pragma once

#include <optional>
#include <string>

namespace mhfrac {

/// Source of the dimensional Poincare constant C_N that feeds the subset-mean
/// Poincare constant M. The constant is never hard-coded: it is either supplied by
/// the user or derived from an empirical battery (see extension.hpp).
struct MSConfig {
    enum class Mode { user_supplied, empirical };

    Mode mode = Mode::user_supplied;
    /// C_N. In empirical mode this is derived as safety_factor * battery_max / assembly factor.
    double cn = 0.0;
    /// Largest ratio observed by the empirical battery (empirical mode only).
    double battery_max = 0.0;
    double safety_factor = 10.0;

    static MSConfig user(double cn);
    static MSConfig empirical(double battery_max, double safety_factor = 10.0);

    std::string describe() const;
};

/// 2 (omega_2 + 2^2) (1 + R^{4N} + 2 R^{2N}) at R = sqrt(2), N = 2, i.e. 50 (pi + 4).
double ms_assembly_factor();

/// M = 50 (pi + 4) C_N. Throws DomainError when C_N is missing or nonpositive.
double ms_default(const MSConfig& config);

/// Integral of (1 - cos t) t^{-1-2s} over [0, upper]; the piece [0, min(1, upper)] is
/// summed from the Taylor series, the rest by adaptive quadrature.
double cosine_gap_integral(double s, double upper);

/// C_{1,s} = 8 pi int_0^pi (1 - cos t) t^{-1-2s} dt, 0 < s < 1.
double c1s(double s);

/// Certified enclosure of C_{2,s} = 2 pi (1 + 2 sum_{n>=1} n^{-2s}), 1/2 < s < 1:
/// partial sum to n = terms plus convexity-sharpened integral bounds for the tail.
struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
    long terms = 0;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

Bracket c2s_bracket(double s, double rel_width = 1e-10);
double c2s(double s);

/// mu_s = C_{1,s} / C_{2,s}.
double mu_s(double s);

/// T_s = (20 (1 + 2s) / (3 mu_s) + 8/(3 pi) M (1 - s))^{-1}.
double t_s(double s, const MSConfig& ms);

/// C_s = T_s / (36 (1 + sqrt 2)^{2s}).
double c_s(double s, const MSConfig& ms);

/// beta_s = 4^{1-s} pi / (s (1 - s)).
double beta_s(double s);

/// alpha_s = C_s / lambda_1(B_1)^s.
double alpha_s(double s, double lambda1_disk, const MSConfig& ms);

/// First positive zero of the Bessel function J_0.
double bessel_j0_first_zero();

/// lambda_1 of the Dirichlet Laplacian on the unit disk, j_{0,1}^2.
double disk_dirichlet_eigenvalue();

struct ConstantsProfile {
    double s = 0.0;
    double c1s = 0.0;
    std::optional<double> c2s;
    std::optional<double> mu_s;
    std::optional<double> t_s;
    std::optional<double> c_s;
    double beta_s = 0.0;
    std::optional<double> alpha_s;
    double ms_constant = 0.0;
    double quadrature_tol = 1e-10;
};

/// Every constant defined at s; quantities requiring s > 1/2 are empty otherwise.
ConstantsProfile constants_profile(double s, const MSConfig& ms, double lambda1_disk = disk_dirichlet_eigenvalue());

}  // namespace mhfrac
