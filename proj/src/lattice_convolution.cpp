#include "mhfrac/lattice_convolution.hpp"

#include "mhfrac/error.hpp"

#include <fftw3.h>

#include <complex>
#include <mutex>

namespace mhfrac {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct RealBuffer {
    explicit RealBuffer(std::size_t n) : data(fftw_alloc_real(n)) {
        if (!data) throw std::bad_alloc();
    }
    ~RealBuffer() { fftw_free(data); }
    RealBuffer(const RealBuffer&) = delete;
    RealBuffer& operator=(const RealBuffer&) = delete;
    double* data;
};

struct ComplexBuffer {
    explicit ComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (!data) throw std::bad_alloc();
    }
    ~ComplexBuffer() { fftw_free(data); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;
    fftw_complex* data;
};

}  // namespace

struct LatticeConvolution::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

int fft_friendly_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

LatticeConvolution::LatticeConvolution(int lx, int ly, const std::function<double(int, int)>& kernel)
    : lx_(lx), ly_(ly) {
    if (lx < 1 || ly < 1) throw DimensionError("LatticeConvolution: empty block");
    px_ = fft_friendly_size(2 * lx - 1);
    py_ = fft_friendly_size(2 * ly - 1);
    const std::size_t nreal = static_cast<std::size_t>(px_) * py_;
    const std::size_t ncomplex = static_cast<std::size_t>(px_) * (py_ / 2 + 1);
    RealBuffer in(nreal);
    ComplexBuffer out(ncomplex);
    plans_ = std::make_shared<Plans>();
    {
        std::lock_guard lock(planner_mutex());
        plans_->forward = fftw_plan_dft_r2c_2d(px_, py_, in.data, out.data, FFTW_ESTIMATE);
        plans_->backward = fftw_plan_dft_c2r_2d(px_, py_, out.data, in.data, FFTW_ESTIMATE);
    }
    if (!plans_->forward || !plans_->backward) throw Error("LatticeConvolution: FFT planning failed");
    const auto wrap = [](int k, int l, int p) -> int {
        if (k < l) return k;
        if (k > p - l) return k - p;
        return p;  // gap: never reached by offsets inside the block
    };
    for (int a = 0; a < px_; ++a) {
        const int dx = wrap(a, lx_, px_);
        for (int b = 0; b < py_; ++b) {
            const int dy = wrap(b, ly_, py_);
            in.data[static_cast<std::size_t>(a) * py_ + b] = (dx == px_ || dy == py_) ? 0.0 : kernel(dx, dy);
        }
    }
    fftw_execute_dft_r2c(plans_->forward, in.data, out.data);
    symbol_.resize(ncomplex);
    // the embedded kernel is even, so its transform is real
    for (std::size_t k = 0; k < ncomplex; ++k) symbol_[k] = out.data[k][0];
}

void LatticeConvolution::apply(const double* x, double* y) const { apply_multiplier(symbol_, x, y); }

void LatticeConvolution::apply_multiplier(const std::vector<double>& multiplier, const double* x, double* y) const {
    const std::size_t nreal = static_cast<std::size_t>(px_) * py_;
    const std::size_t ncomplex = static_cast<std::size_t>(px_) * (py_ / 2 + 1);
    if (multiplier.size() != ncomplex) throw DimensionError("LatticeConvolution: multiplier size mismatch");
    RealBuffer in(nreal);
    ComplexBuffer out(ncomplex);
    std::fill(in.data, in.data + nreal, 0.0);
    for (int i = 0; i < lx_; ++i)
        for (int j = 0; j < ly_; ++j) in.data[static_cast<std::size_t>(i) * py_ + j] = x[static_cast<std::size_t>(i) * ly_ + j];
    fftw_execute_dft_r2c(plans_->forward, in.data, out.data);
    const double norm = 1.0 / static_cast<double>(nreal);
    for (std::size_t k = 0; k < ncomplex; ++k) {
        out.data[k][0] *= multiplier[k] * norm;
        out.data[k][1] *= multiplier[k] * norm;
    }
    fftw_execute_dft_c2r(plans_->backward, out.data, in.data);
    for (int i = 0; i < lx_; ++i)
        for (int j = 0; j < ly_; ++j) y[static_cast<std::size_t>(i) * ly_ + j] = in.data[static_cast<std::size_t>(i) * py_ + j];
}

}  // namespace mhfrac
