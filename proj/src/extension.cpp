#include "mhfrac/extension.hpp"

#include "mhfrac/error.hpp"
#include "mhfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace mhfrac {

namespace {

constexpr int kGradedRadius = 2;

double tent(double v) { return std::max(0.0, 1.0 - std::abs(v)); }

/// G(d) = int_{[-1,1]^2} tent(w1) tent(w2) |w - d|^{-2s} dw, i.e. the integral of
/// |x - y|^{-2s} over two unit cells at offset d, by polar quadrature around d.
double cell_pair_moment(int a, int b, double s) {
    const Point d{static_cast<double>(a), static_cast<double>(b)};
    std::vector<double> cuts{0.0, 2.0 * std::numbers::pi};
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            if (i == a && j == b) continue;
            double t = std::atan2(j - d.y, i - d.x);
            if (t < 0.0) t += 2.0 * std::numbers::pi;
            cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    const auto radial = [&](double theta) {
        const double c = std::cos(theta);
        const double sn = std::sin(theta);
        // exit of [-1, 1]^2 and crossings of the lines x, y in {-1, 0, 1}
        std::vector<double> breaks{0.0};
        double r_end = 0.0;
        for (double line = -1.0; line <= 1.0; line += 1.0) {
            if (std::abs(c) > 1e-14) {
                const double r = (line - d.x) / c;
                if (r > 0.0) breaks.push_back(r);
            }
            if (std::abs(sn) > 1e-14) {
                const double r = (line - d.y) / sn;
                if (r > 0.0) breaks.push_back(r);
            }
        }
        const double rx = std::abs(c) > 1e-14 ? ((c > 0 ? 1.0 : -1.0) - d.x) / c : 1e300;
        const double ry = std::abs(sn) > 1e-14 ? ((sn > 0 ? 1.0 : -1.0) - d.y) / sn : 1e300;
        r_end = std::max(0.0, std::min(rx, ry));
        if (r_end <= 0.0) return 0.0;
        breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double r) { return r >= r_end; }), breaks.end());
        breaks.push_back(r_end);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double x, double y) { return y - x < 1e-13; }), breaks.end());
        const auto f = [&](double r) { return tent(d.x + r * c) * tent(d.y + r * sn); };
        return quad::radial_power_integral(f, breaks, 2.0 * s - 1.0, 0, 10);
    };
    quad::AdaptiveOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-14;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (cuts[k + 1] - cuts[k] > 1e-14) total += quad::integrate_or_throw(radial, cuts[k], cuts[k + 1], opts);
    return total;
}

/// G(d) for 0 <= b <= a <= kGradedRadius, cached per s.
const std::vector<double>& moment_table(double s) {
    static std::mutex mutex;
    static std::map<double, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    std::vector<double> table((kGradedRadius + 1) * (kGradedRadius + 1), 0.0);
    for (int a = 0; a <= kGradedRadius; ++a)
        for (int b = 0; b <= a; ++b) table[static_cast<std::size_t>(a * (kGradedRadius + 1) + b)] = cell_pair_moment(a, b, s);
    return cache.emplace(s, std::move(table)).first->second;
}

double moment(const std::vector<double>& table, int a, int b) {
    a = std::abs(a);
    b = std::abs(b);
    if (b > a) std::swap(a, b);
    return table[static_cast<std::size_t>(a * (kGradedRadius + 1) + b)];
}

void require_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("extension: s must lie in (0, 1)");
}

}  // namespace

Point kelvin(Point x) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (!(r2 > 0.0)) throw DomainError("kelvin: the origin has no image");
    return {x.x / r2, x.y / r2};
}

SampledField::SampledField(Point center, double radius, double extent, double spacing)
    : center_(center), radius_(radius), extent_(extent), spacing_(spacing) {
    if (!(radius > 0.0) || !(extent >= 1.0) || !(spacing > 0.0))
        throw DomainError("SampledField: radius and spacing must be positive, extent at least 1");
    const double reach = radius * extent;
    const int half = static_cast<int>(std::ceil(reach / spacing - 1e-12));
    n_ = 2 * half;
    lo_ = {center.x - half * spacing, center.y - half * spacing};
    values_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    inside_.assign(values_.size(), 0);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) inside_[index(i, j)] = norm(cell_center(i, j) - center) <= reach ? 1 : 0;
}

SampledField SampledField::sample(const std::function<double(Point)>& f, Point center, double radius, double extent,
                                  double spacing) {
    SampledField field(center, radius, extent, spacing);
    for (int j = 0; j < field.n_; ++j)
        for (int i = 0; i < field.n_; ++i)
            if (field.inside(i, j)) field.set(i, j, f(field.cell_center(i, j)));
    return field;
}

Point SampledField::cell_center(int i, int j) const {
    return {lo_.x + (i + 0.5) * spacing_, lo_.y + (j + 0.5) * spacing_};
}

bool SampledField::inside(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
    return inside_[index(i, j)] != 0;
}

double SampledField::interpolate(Point p) const {
    const double gx = (p.x - lo_.x) / spacing_ - 0.5;
    const double gy = (p.y - lo_.y) / spacing_ - 0.5;
    const int i0 = static_cast<int>(std::floor(gx));
    const int j0 = static_cast<int>(std::floor(gy));
    const double fx = gx - i0;
    const double fy = gy - j0;
    double acc = 0.0;
    double wsum = 0.0;
    for (int di = 0; di <= 1; ++di) {
        for (int dj = 0; dj <= 1; ++dj) {
            if (!inside(i0 + di, j0 + dj)) continue;
            const double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy);
            acc += w * value(i0 + di, j0 + dj);
            wsum += w;
        }
    }
    if (wsum > 1e-12) return acc / wsum;
    // p sits on a missing sample: take the nearest available one
    double best = 1e300;
    double v = 0.0;
    for (int i = i0 - 1; i <= i0 + 2; ++i) {
        for (int j = j0 - 1; j <= j0 + 2; ++j) {
            if (!inside(i, j)) continue;
            const double d = norm(cell_center(i, j) - p);
            if (d < best) {
                best = d;
                v = value(i, j);
            }
        }
    }
    if (best == 1e300) throw DomainError("SampledField::interpolate: point outside the sampled disk");
    return v;
}

std::size_t SampledField::sampled_count() const {
    return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), std::uint8_t{1}));
}

double SampledField::l2_norm_squared() const {
    double total = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            if (inside(i, j)) total += value(i, j) * value(i, j);
    return total * spacing_ * spacing_;
}

double SampledField::seminorm_squared(double s) const {
    require_order(s);
    const double h = spacing_;
    const std::vector<double>& g = moment_table(s);
    // w(d) = h^{2-2s} G(d) / |d|^2 is exact for linear functions averaged over gradient
    // directions and tends to the midpoint weight h^4 |h d|^{-2-2s} far from the diagonal
    const int span = n_;
    std::vector<double> weight(static_cast<std::size_t>(span) * span, 0.0);
    const double scale = std::pow(h, 2.0 - 2.0 * s);
    for (int a = 0; a < span; ++a) {
        for (int b = 0; b < span; ++b) {
            if (a == 0 && b == 0) continue;
            const double d2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
            const double w = std::max(a, b) <= kGradedRadius ? moment(g, a, b) / d2 : std::pow(d2, -1.0 - s);
            weight[static_cast<std::size_t>(a) * span + b] = scale * w;
        }
    }
    struct Cell {
        int i;
        int j;
        double v;
    };
    std::vector<Cell> cells;
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            if (inside(i, j)) cells.push_back({i, j, value(i, j)});
    double pairs = 0.0;
    for (std::size_t p = 0; p < cells.size(); ++p) {
        for (std::size_t q = p + 1; q < cells.size(); ++q) {
            const double dv = cells[p].v - cells[q].v;
            const int a = std::abs(cells[p].i - cells[q].i);
            const int b = std::abs(cells[p].j - cells[q].j);
            pairs += dv * dv * weight[static_cast<std::size_t>(a) * span + b];
        }
    }
    // diagonal cells: |grad u|^2 / 2 * h^{4-2s} G(0)
    double diagonal = 0.0;
    const auto slope = [&](int i, int j, int di, int dj) {
        const bool fwd = inside(i + di, j + dj);
        const bool bwd = inside(i - di, j - dj);
        if (fwd && bwd) return (value(i + di, j + dj) - value(i - di, j - dj)) / (2.0 * h);
        if (fwd) return (value(i + di, j + dj) - value(i, j)) / h;
        if (bwd) return (value(i, j) - value(i - di, j - dj)) / h;
        return 0.0;
    };
    for (const Cell& c : cells) {
        const double gx = slope(c.i, c.j, 1, 0);
        const double gy = slope(c.i, c.j, 0, 1);
        diagonal += 0.5 * (gx * gx + gy * gy);
    }
    diagonal *= std::pow(h, 4.0 - 2.0 * s) * moment(g, 0, 0);
    return 2.0 * pairs + diagonal;
}

SampledField extend(const SampledField& u, double R) {
    if (!(R > 1.0)) throw DomainError("extend: R must exceed 1");
    SampledField out(u.center(), u.radius(), R, u.spacing());
    const int shift = (out.n() - u.n()) / 2;
    const double r0 = u.radius();
    for (int j = 0; j < out.n(); ++j) {
        for (int i = 0; i < out.n(); ++i) {
            if (!out.inside(i, j)) continue;
            const Point p = out.cell_center(i, j);
            const Point rel = p - u.center();
            if (norm(rel) <= r0 && u.inside(i - shift, j - shift)) {
                out.set(i, j, u.value(i - shift, j - shift));
                continue;
            }
            const Point k = kelvin((1.0 / r0) * rel);
            out.set(i, j, u.interpolate(u.center() + r0 * k));
        }
    }
    return out;
}

ExtensionRatios extension_bound_ratios(const SampledField& u, double R, double s) {
    require_order(s);
    const SampledField e = extend(u, R);
    constexpr int dim = 2;
    ExtensionRatios r;
    r.seminorm_bound = 4.0 * std::pow(R, 4 * dim);
    r.l2_bound = 2.0 * std::pow(R, 2 * dim);
    const double base = u.seminorm_squared(s);
    if (base > 0.0) r.seminorm_ratio = std::sqrt(e.seminorm_squared(s) / base);
    const double l2 = u.l2_norm_squared();
    r.l2_ratio = l2 > 0.0 ? std::sqrt(e.l2_norm_squared() / l2) : 0.0;
    return r;
}

InversionCheck check_inversion_inequalities(long pairs, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto draw = [&]() {
        for (;;) {
            const Point p{unit(rng), unit(rng)};
            const double r2 = p.x * p.x + p.y * p.y;
            if (r2 < 1.0 && r2 > 0.0) return p;
        }
    };
    InversionCheck check;
    check.pairs = pairs;
    check.i2_min_slack = check.i3_min_slack = 1e300;
    for (long n = 0; n < pairs; ++n) {
        const Point z = draw();
        const Point w = draw();
        const Point x = draw();
        const Point kz = kelvin(z);
        const Point kw = kelvin(w);
        const double lhs2 = norm(kz - kw);
        const double slack2 = lhs2 - norm(z - w);
        const double lhs3 = norm(x - kw);
        const double slack3 = lhs3 - norm(x - w);
        if (slack2 < -1e-12 * std::max(1.0, lhs2)) ++check.i2_violations;
        if (slack3 < -1e-12 * std::max(1.0, lhs3)) ++check.i3_violations;
        check.i2_min_slack = std::min(check.i2_min_slack, slack2);
        check.i3_min_slack = std::min(check.i3_min_slack, slack3);
    }
    return check;
}

double ms_poincare_empirical(const SampledField& u, const DomainMask& E, double s) {
    require_order(s);
    const double h = u.spacing();
    double sum = 0.0;
    std::size_t count = 0;
    for (int j = 0; j < u.n(); ++j) {
        for (int i = 0; i < u.n(); ++i) {
            if (u.inside(i, j) && E.contains(u.cell_center(i, j))) {
                sum += u.value(i, j);
                ++count;
            }
        }
    }
    if (count == 0) throw DomainError("ms_poincare_empirical: E contains no sample of the field");
    const double area = static_cast<double>(count) * h * h;
    const double mean = sum / static_cast<double>(count);
    double numerator = 0.0;
    for (int j = 0; j < u.n(); ++j)
        for (int i = 0; i < u.n(); ++i)
            if (u.inside(i, j)) numerator += (u.value(i, j) - mean) * (u.value(i, j) - mean);
    numerator *= h * h;
    const double semi = u.seminorm_squared(s);
    if (!(semi > 0.0)) {
        if (numerator == 0.0) return 0.0;
        throw DomainError("ms_poincare_empirical: vanishing seminorm");
    }
    const double R = u.radius() * u.extent();
    return numerator / ((1.0 - s) * (R * R / area) * std::pow(R, 2.0 * s) * semi);
}

std::function<double(Point)> random_smooth_field(unsigned seed, double max_frequency) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Wave {
        double amp;
        double kx;
        double ky;
        double phase;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < 6; ++k) {
        const double rho = max_frequency * std::sqrt(unit(rng));
        const double t = 2.0 * std::numbers::pi * unit(rng);
        waves.push_back({gauss(rng) / (1.0 + rho), rho * std::cos(t), rho * std::sin(t), 2.0 * std::numbers::pi * unit(rng)});
    }
    const double ax = 0.5 * gauss(rng);
    const double ay = 0.5 * gauss(rng);
    return [waves, ax, ay](Point p) {
        double v = ax * p.x + ay * p.y;
        for (const Wave& w : waves) v += w.amp * std::cos(w.kx * p.x + w.ky * p.y + w.phase);
        return v;
    };
}

PoincareBattery run_poincare_battery(const std::vector<double>& s_values, int fields, double R, double spacing,
                                     unsigned seed) {
    if (fields < 1) throw DomainError("run_poincare_battery: need at least one field");
    PoincareBattery battery;
    battery.s_values = s_values;
    battery.fields = fields;
    const SampledField grid(Point{0.0, 0.0}, R, 1.0, spacing);
    // upper half of B_R on the sample grid
    const int n = grid.n();
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (grid.inside(i, j) && grid.cell_center(i, j).y > 0.0) cells[static_cast<std::size_t>(j) * n + i] = 1;
    const Point lo{grid.cell_center(0, 0).x - 0.5 * spacing, grid.cell_center(0, 0).y - 0.5 * spacing};
    const DomainMask half(spacing, lo, n, n, cells);
    for (double s : s_values) {
        double best = 0.0;
        for (int f = 0; f < fields; ++f) {
            const auto field = random_smooth_field(seed + static_cast<unsigned>(f));
            const SampledField u = SampledField::sample(field, {0.0, 0.0}, R, 1.0, spacing);
            best = std::max(best, ms_poincare_empirical(u, half, s));
        }
        battery.max_by_s.push_back(best);
        battery.max_ratio = std::max(battery.max_ratio, best);
    }
    return battery;
}

MSConfig empirical_ms(const PoincareBattery& battery, double safety_factor) {
    return MSConfig::empirical(battery.max_ratio, safety_factor);
}

}  // namespace mhfrac
