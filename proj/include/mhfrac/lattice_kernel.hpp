#pragma once

#include <vector>

namespace mhfrac {

/// Autocorrelation of the unit hat (1 - |t|)_+, i.e. the centered cubic B-spline.
double hat_autocorrelation(double v);

/// Unit-spacing interaction of two bilinear hats whose centers differ by d:
///   K(d) = int (2 c(d) - c(d + z) - c(d - z)) |z|^{-2-2s} dz,  c(v) = a(v_1) a(v_2).
/// For spacing h the interaction is h^{2-2s} K(d).
double hat_pair_kernel(int di, int dj, double s, double rel_tol = 1e-9);

/// Unit-spacing interaction of two unit cells whose lower corners differ by d != 0:
///   F(d) = int_{C_0} int_{C_d} |x - y|^{-2-s} dy dx.
/// For cell size h the interaction is h^{2-s} F(d).
double cell_pair_kernel(int di, int dj, double s, double rel_tol = 1e-9);

/// Octant-symmetric table of a lattice kernel for |d|_inf <= radius with an asymptotic
/// expansion beyond. Immutable once built.
class OffsetTable {
public:
    enum class Kind { hat_pair, cell_pair };

    OffsetTable(Kind kind, double s, int radius = 64);

    double operator()(int di, int dj) const;
    Kind kind() const { return kind_; }
    double s() const { return s_; }
    int radius() const { return radius_; }

private:
    double far_field(double r) const;

    Kind kind_;
    double s_;
    int radius_;
    std::vector<double> values_;
};

/// Shared tables, built on first use per s.
const OffsetTable& hat_pair_table(double s);
const OffsetTable& cell_pair_table(double s);

}  // namespace mhfrac
