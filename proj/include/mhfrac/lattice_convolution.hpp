#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace mhfrac {

/// Discrete convolution y(p) = sum_q k(p - q) x(q) on an lx x ly lattice block with an
/// even kernel k, evaluated through a zero-padded periodic embedding and real FFTs.
/// Arrays are row-major with index i * ly + j. Immutable after construction; apply()
/// allocates its own scratch and may be called concurrently.
class LatticeConvolution {
public:
    LatticeConvolution(int lx, int ly, const std::function<double(int, int)>& kernel);

    int lx() const { return lx_; }
    int ly() const { return ly_; }
    /// Size of the periodic embedding.
    int px() const { return px_; }
    int py() const { return py_; }

    void apply(const double* x, double* y) const;

    /// Eigenvalues of the periodic embedding at frequencies (k1, k2), 0 <= k2 <= py/2,
    /// stored at index k1 * (py/2 + 1) + k2.
    const std::vector<double>& symbol() const { return symbol_; }

    /// Same embedding, but every Fourier mode multiplied by multiplier[...] (indexed like
    /// symbol()) instead of the symbol.
    void apply_multiplier(const std::vector<double>& multiplier, const double* x, double* y) const;

private:
    struct Plans;

    int lx_;
    int ly_;
    int px_;
    int py_;
    std::vector<double> symbol_;
    std::shared_ptr<Plans> plans_;
};

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
int fft_friendly_size(int n);

}  // namespace mhfrac
