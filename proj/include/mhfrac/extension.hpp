#pragma once

#include "mhfrac/constants.hpp"
#include "mhfrac/geometry.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mhfrac {

/// x / |x|^2. Throws DomainError at the origin.
Point kelvin(Point x);

/// Samples at the cell centers of a uniform grid that lie in the closed disk
/// B_{extent * radius}(center). Cells outside the disk carry no value.
class SampledField {
public:
    SampledField(Point center, double radius, double extent, double spacing);

    static SampledField sample(const std::function<double(Point)>& f, Point center, double radius, double extent,
                               double spacing);

    Point center() const { return center_; }
    double radius() const { return radius_; }
    /// Ratio of the sampled disk radius to the base radius.
    double extent() const { return extent_; }
    double spacing() const { return spacing_; }
    int n() const { return n_; }

    Point cell_center(int i, int j) const;
    bool inside(int i, int j) const;
    double value(int i, int j) const { return values_[index(i, j)]; }
    void set(int i, int j, double v) { values_[index(i, j)] = v; }

    /// Bilinear interpolation of the samples at p; weights of missing neighbours are
    /// redistributed over the available ones. Throws DomainError when none is available.
    double interpolate(Point p) const;

    /// sum over sampled cells of |u|^2 h^2.
    double l2_norm_squared() const;
    /// Discrete Gagliardo seminorm squared over the sampled disk with kernel exponent
    /// 2 + 2s: pairwise sums with cell-averaged weights near the diagonal and a gradient
    /// term on the diagonal.
    double seminorm_squared(double s) const;

    std::size_t sampled_count() const;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }

    Point center_;
    double radius_;
    double extent_;
    double spacing_;
    int n_;
    Point lo_;
    std::vector<double> values_;
    std::vector<std::uint8_t> inside_;
};

/// Kelvin extension of a field sampled on its base disk to B_R: samples inside the base
/// disk are copied, the others read u at the inverted point. Throws DomainError for R <= 1.
SampledField extend(const SampledField& u, double R);

struct ExtensionRatios {
    /// Undefined when the base seminorm vanishes.
    std::optional<double> seminorm_ratio;
    double l2_ratio = 0.0;
    double seminorm_bound = 0.0;
    double l2_bound = 0.0;
};

/// [E u]_{B_R} / [u]_{B_1} and ||E u||_{B_R} / ||u||_{B_1} against the bounds 4 R^{4N}
/// and 2 R^{2N} (N = 2).
ExtensionRatios extension_bound_ratios(const SampledField& u, double R, double s);

/// Pointwise inversion inequalities on random pairs in the punctured unit disk:
/// |K(z) - K(w)| >= |z - w| and |x - K(w)| >= |x - w|.
struct InversionCheck {
    long pairs = 0;
    long i2_violations = 0;
    long i3_violations = 0;
    double i2_min_slack = 0.0;
    double i3_min_slack = 0.0;
};
InversionCheck check_inversion_inequalities(long pairs, unsigned seed);

/// ||u - mean_E u||^2_{B_R} / ((1 - s) (R^N / |E|) R^{2s} [u]^2_{B_R}) for the field
/// sampled on B_R (R = radius * extent), E given by the occupied cells of the mask
/// (membership of sample centers). Throws DomainError for an empty E or a vanishing seminorm.
double ms_poincare_empirical(const SampledField& u, const DomainMask& E, double s);

/// Smooth random field: a sum of six plane waves with frequencies up to `max_frequency`
/// plus a random linear part.
std::function<double(Point)> random_smooth_field(unsigned seed, double max_frequency = 3.0);

struct PoincareBattery {
    double max_ratio = 0.0;
    std::vector<double> s_values;
    std::vector<double> max_by_s;
    int fields = 0;
};

/// Maximum of ms_poincare_empirical over `fields` random fields on B_R(0), E the upper
/// half of B_R, for each s.
PoincareBattery run_poincare_battery(const std::vector<double>& s_values, int fields, double R, double spacing,
                                     unsigned seed);

/// MSConfig in empirical mode from the battery maximum.
MSConfig empirical_ms(const PoincareBattery& battery, double safety_factor = 10.0);

}  // namespace mhfrac
