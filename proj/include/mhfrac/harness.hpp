#pragma once

#include "mhfrac/constants.hpp"
#include "mhfrac/geometry.hpp"
#include "mhfrac/spectral.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mhfrac {

/// One checked inequality `product >= bound`. For Makai-Hayman rows product is
/// lambda * r^{2s} and bound is C_s; other experiments store the two sides of their own
/// claim, documented at each runner.
struct ReportRow {
    std::string experiment;
    std::string shape;
    double s = 0.0;
    double h = 0.0;
    double lambda = 0.0;
    double inradius = 0.0;
    double product = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
    double runtime = 0.0;
};

/// Fill margin and pass from product and bound.
ReportRow finish_row(ReportRow row);

/// Rows whose experiment tag ends in "-soft" are informational.
bool is_hard(const ReportRow& row);
bool all_hard_pass(const std::vector<ReportRow>& rows);

/// Disk, square, 2:1 rectangle, L-shape, spiral and cracked squares k = 2, 3, 4.
std::vector<ShapeSpec> default_zoo();
std::vector<double> default_s_grid();

/// Memoized fractional and local eigenvalues keyed by shape label, s and h.
EigenEstimate cached_lambda1_s(const ShapeSpec& shape, double s, double h, const SolverOptions& options = {});
EigenEstimate cached_lambda1_local(const ShapeSpec& shape, double h, const SolverOptions& options = {});
void clear_eigen_cache();

/// "makai-hayman" rows: lambda * r^{2s} >= C_s. Throws DomainError for a shape that is
/// not simply connected or s outside (1/2, 1).
std::vector<ReportRow> run_makai_hayman(const std::vector<ShapeSpec>& shapes, const std::vector<double>& s_values,
                                        double h, const MSConfig& ms);

/// Rows for each s:
///   s > 1/2, "counterexample-cracked": lambda(Q~_k) (sqrt5/2)^{2s} >= C_s.
///   s > 1/2, "counterexample-scaling": 0.03 * ref >= |lambda(Q_k) k^{2s} - ref| with ref
///     taken at the smallest k.
///   s <= 1/2, "counterexample-refine": ratio lambda(Q~_2)/lambda(Q_2) at h_i >= the ratio
///     at h_i / 2, for h, h/2, h/4.
///   s <= 1/2, "counterexample-k-soft": lambda(Q~_{k-1}) >= lambda(Q~_k) at h.
/// Every row reports the measured inradius of Q~_k. Throws DomainError for k < 2.
std::vector<ReportRow> run_counterexample(const std::vector<int>& k_values, const std::vector<double>& s_values,
                                          double h, const MSConfig& ms);

/// Two rows with product = lambda:
///   "cheeger-h1": bound C_s (h1/2)^{2s} with h1 <= 2/r.
///   "cheeger-hs": bound C_s (pi h_s / P_s(B_1))^2 with h_s <= P_s(B_r)/|B_r|, both
///     perimeters from fractional_perimeter on the same raster, B_1 by exact scaling.
std::vector<ReportRow> run_cheeger(const ShapeSpec& shape, double s, double h, const MSConfig& ms);

/// Upper bound on h_s(Omega) from the inscribed disk, P_s(B_r) / |B_r|, rasterized at
/// min(h, r / 16).
double cheeger_hs_upper(double r, double s, double h);

/// "compare-lower": lambda_s >= alpha_s (lambda_1 (1 + 2h))^s.
/// "compare-upper": 1.1 beta_s lambda_1^s >= lambda_s, hard once lambda_s and lambda_1
/// agree within 2% between consecutive refinements (at most `refinements` halvings of h);
/// otherwise tagged "compare-upper-soft". Rows carry lambda_s in `lambda`.
std::vector<ReportRow> run_comparison(const ShapeSpec& shape, double s, double h, const MSConfig& ms,
                                      int refinements = 2);

struct DensityBound {
    double alpha = 0.0;
    double inradius = 0.0;
    double value = 0.0;
};

/// alpha = min over occupied cells x of |B_{sigma r}(x) \ Omega| / |B_{sigma r}(x)|, counted in
/// cells; value = alpha pi sigma^{-2s} r^{-2s}. Throws DomainError for sigma <= 1.
DensityBound density_lower_bound(const DomainMask& mask, double sigma, double s);

/// "density": lambda >= density bound.
ReportRow run_density(const ShapeSpec& shape, double s, double h, double sigma);

/// Empirical M from the subset-mean Poincare battery over 200 fields, s in {0.6, 0.75, 0.9}.
MSConfig default_ms(double safety_factor = 10.0);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_json(std::ostream& out, const std::vector<ReportRow>& rows, const MSConfig& ms);

}  // namespace mhfrac
