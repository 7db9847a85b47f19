#include "mhfrac/lattice_kernel.hpp"

#include "mhfrac/error.hpp"
#include "mhfrac/quadrature.hpp"

#include <algorithm>
#include <cstdio>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mhfrac {

namespace {

constexpr int kHatNearRadius = 4;
constexpr int kCellNearRadius = 3;
constexpr int kMidPoints = 8;

void require_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("lattice kernel: s must lie in (0, 1)");
}

double tent(double v) { return std::max(0.0, 1.0 - std::abs(v)); }

double pair_profile(double x, double y) { return hat_autocorrelation(x) * hat_autocorrelation(y); }

double cell_profile(double x, double y) { return tent(x) * tent(y); }

/// Sorted breakpoints m / |q_i| in (0, r_end] plus 0 and r_end.
std::vector<double> ray_breaks(double c, double s, double r_end) {
    std::vector<double> breaks{0.0, r_end};
    for (double comp : {std::abs(c), std::abs(s)}) {
        if (comp < 1e-14) continue;
        for (int m = 1; m / comp < r_end * (1.0 - 1e-14); ++m) breaks.push_back(m / comp);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(1.0, b); }),
                 breaks.end());
    return breaks;
}

/// Integral of radial(theta) over [lo, hi], pre-split at the lattice directions where the
/// ray structure changes.
template <class Radial>
double angular_integral(double lo, double hi, int extent, Radial radial, double rel_tol) {
    std::vector<double> cuts{lo, hi};
    for (int m1 = -extent; m1 <= extent; ++m1) {
        for (int m2 = -extent; m2 <= extent; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            double a = std::atan2(static_cast<double>(m2), static_cast<double>(m1));
            if (a < 0.0) a += 2.0 * std::numbers::pi;
            if (a > lo && a < hi) cuts.push_back(a);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-12; }), cuts.end());
    // the tolerance applies to the sum; pieces get an absolute share of a coarse estimate
    quad::AdaptiveOptions coarse;
    coarse.max_intervals = 1;
    double rough = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) rough += std::abs(quad::integrate(radial, cuts[k], cuts[k + 1], coarse).value);
    const double pieces = static_cast<double>(cuts.size() - 1);
    quad::AdaptiveOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = std::max(0.1 * rel_tol * rough / pieces, 1e-300);
    double total = 0.0;
    double error = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto r = quad::integrate(radial, cuts[k], cuts[k + 1], opts);
        total += r.value;
        error += r.error;
    }
    if (!(error <= rel_tol * std::abs(total)))
    {
        char msg[160];
        std::snprintf(msg, sizeof msg, "lattice kernel: angular quadrature reached %.1e relative, requested %.1e", error / std::abs(total), rel_tol);
        throw ConvergenceError(msg);
    }
    return total;
}

double hat_pair_polar(int di, int dj, double s, double rel_tol) {
    const double c0 = pair_profile(di, dj);
    const int reach = std::max(std::abs(di), std::abs(dj)) + 2;
    const auto radial = [&](double theta) {
        const double qc = std::cos(theta);
        const double qs = std::sin(theta);
        const double r_end = reach / std::max(std::abs(qc), std::abs(qs));
        const auto breaks = ray_breaks(qc, qs, r_end);
        const auto g = [&](double r) {
            return 2.0 * c0 - pair_profile(di + r * qc, dj + r * qs) - pair_profile(di - r * qc, dj - r * qs);
        };
        double v = quad::radial_power_integral(g, breaks, 1.0 + 2.0 * s, 2, 10);
        if (c0 != 0.0) v += 2.0 * c0 * std::pow(r_end, -2.0 * s) / (2.0 * s);
        return v;
    };
    // the integrand is pi-periodic in theta
    return 2.0 * angular_integral(0.0, std::numbers::pi, reach + 2, radial, rel_tol);
}

double cell_pair_polar(int di, int dj, double s, double rel_tol) {
    const int reach = std::max(std::abs(di), std::abs(dj)) + 1;
    const auto radial = [&](double theta) {
        const double qc = std::cos(theta);
        const double qs = std::sin(theta);
        const double r_end = reach / std::max(std::abs(qc), std::abs(qs));
        const auto breaks = ray_breaks(qc, qs, r_end);
        const auto g = [&](double r) { return cell_profile(di + r * qc, dj + r * qs); };
        return quad::radial_power_integral(g, breaks, 1.0 + s, 1, 10);
    };
    return angular_integral(0.0, 2.0 * std::numbers::pi, reach + 2, radial, rel_tol);
}

/// int profile(w) |w - d|^{-p} dw over the unit cells [lo, hi)^2 by tensor Gauss rules.
template <class Profile>
double cellwise_gauss(Profile profile, int lo, int hi, double dx, double dy, double p) {
    const auto& gl = quad::gauss_legendre(kMidPoints);
    double total = 0.0;
    for (int m1 = lo; m1 < hi; ++m1) {
        for (int m2 = lo; m2 < hi; ++m2) {
            for (int a = 0; a < kMidPoints; ++a) {
                const double x = m1 + 0.5 * (1.0 + gl.nodes[a]);
                for (int b = 0; b < kMidPoints; ++b) {
                    const double y = m2 + 0.5 * (1.0 + gl.nodes[b]);
                    const double r2 = (x - dx) * (x - dx) + (y - dy) * (y - dy);
                    total += 0.25 * gl.weights[a] * gl.weights[b] * profile(x, y) * std::pow(r2, -0.5 * p);
                }
            }
        }
    }
    return total;
}

}  // namespace

double hat_autocorrelation(double v) {
    const double t = std::abs(v);
    if (t >= 2.0) return 0.0;
    if (t >= 1.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
    return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
}

double hat_pair_kernel(int di, int dj, double s, double rel_tol) {
    require_order(s);
    if (std::max(std::abs(di), std::abs(dj)) <= kHatNearRadius) return hat_pair_polar(di, dj, s, rel_tol);
    return -2.0 * cellwise_gauss(pair_profile, -2, 2, di, dj, 2.0 + 2.0 * s);
}

double cell_pair_kernel(int di, int dj, double s, double rel_tol) {
    require_order(s);
    if (di == 0 && dj == 0) throw DomainError("cell_pair_kernel: offset must be nonzero");
    if (std::max(std::abs(di), std::abs(dj)) <= kCellNearRadius) return cell_pair_polar(di, dj, s, rel_tol);
    return cellwise_gauss(cell_profile, -1, 1, di, dj, 2.0 + s);
}

OffsetTable::OffsetTable(Kind kind, double s, int radius) : kind_(kind), s_(s), radius_(radius) {
    require_order(s);
    if (radius < kHatNearRadius + 1) throw DomainError("OffsetTable: radius too small");
    values_.assign(static_cast<std::size_t>(radius + 1) * (radius + 2) / 2, 0.0);
    for (int a = 0; a <= radius; ++a) {
        for (int b = 0; b <= a; ++b) {
            double v = 0.0;
            if (kind == Kind::hat_pair) {
                v = hat_pair_kernel(a, b, s);
            } else if (a > 0) {
                v = cell_pair_kernel(a, b, s);
            }
            values_[static_cast<std::size_t>(a) * (a + 1) / 2 + b] = v;
        }
    }
}

double OffsetTable::far_field(double r) const {
    if (kind_ == Kind::hat_pair) {
        const double p = 2.0 + 2.0 * s_;
        return -2.0 * (std::pow(r, -p) + p * p / 6.0 * std::pow(r, -p - 2.0));
    }
    const double q = 2.0 + s_;
    return std::pow(r, -q) * (1.0 + q * q / (12.0 * r * r));
}

double OffsetTable::operator()(int di, int dj) const {
    int a = std::abs(di);
    int b = std::abs(dj);
    if (b > a) std::swap(a, b);
    if (a <= radius_) return values_[static_cast<std::size_t>(a) * (a + 1) / 2 + b];
    return far_field(std::hypot(static_cast<double>(di), static_cast<double>(dj)));
}

namespace {

const OffsetTable& cached_table(OffsetTable::Kind kind, double s) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::uint64_t>, std::unique_ptr<OffsetTable>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(static_cast<int>(kind), std::bit_cast<std::uint64_t>(s));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<OffsetTable>(kind, s)).first;
    return *it->second;
}

}  // namespace

const OffsetTable& hat_pair_table(double s) { return cached_table(OffsetTable::Kind::hat_pair, s); }

const OffsetTable& cell_pair_table(double s) { return cached_table(OffsetTable::Kind::cell_pair, s); }

}  // namespace mhfrac
