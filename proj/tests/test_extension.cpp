#include "mhfrac/error.hpp"
#include "mhfrac/extension.hpp"
#include "mhfrac/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mhfrac;

namespace {

constexpr double pi = std::numbers::pi;

double gl_composite(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double total = 0.0;
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * step;
        for (int k = 0; k < 8; ++k) total += 0.5 * step * w[k] * f(lo + 0.5 * step * (x[k] + 1.0));
    }
    return total;
}

// [x_1]^2 on the unit disk: by rotation invariance half of the double integral of
// |x - y|^{-2s}, which is 2 pi int_0^2 r^{1-2s} lens(r) dr.
double linear_seminorm_oracle(double s) {
    const auto lens = [](double r) { return 2.0 * std::acos(r / 2.0) - 0.5 * r * std::sqrt(4.0 - r * r); };
    // r = t^{1/(2-2s)} turns r^{1-2s} dr into e dt
    const double e = 1.0 / (2.0 - 2.0 * s);
    const auto g = [&](double t) { return lens(std::pow(t, e)); };
    return pi * e * gl_composite(g, 0.0, std::pow(2.0, 2.0 - 2.0 * s), 400);
}

}  // namespace

TEST_CASE("kelvin map") {
    const Point p = kelvin({2.0, 0.0});
    CHECK(p.x == doctest::Approx(0.5));
    CHECK(p.y == doctest::Approx(0.0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const Point x{u(rng), u(rng)};
        if (norm(x) < 1e-3) continue;
        const Point back = kelvin(kelvin(x));
        CHECK(norm(back - x) <= 1e-14 * std::max(1.0, norm(x)));
        CHECK(norm(kelvin(x)) * norm(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int k = 0; k < 16; ++k) {
        const Point c{std::cos(k * pi / 8), std::sin(k * pi / 8)};
        CHECK(norm(kelvin(c) - c) <= 1e-15);
    }
    CHECK_THROWS_AS(kelvin({0.0, 0.0}), DomainError);
}

TEST_CASE("sampled field geometry") {
    const SampledField f(Point{0.5, -0.5}, 1.0, 1.0, 0.125);
    CHECK(f.n() == 16);
    CHECK(f.cell_center(0, 0).x == doctest::Approx(-0.4375));
    std::size_t count = 0;
    for (int j = 0; j < f.n(); ++j)
        for (int i = 0; i < f.n(); ++i)
            if (norm(f.cell_center(i, j) - Point{0.5, -0.5}) <= 1.0) ++count;
    CHECK(f.sampled_count() == count);
    CHECK(f.sampled_count() * 0.125 * 0.125 == doctest::Approx(pi).epsilon(0.05));
    CHECK_THROWS_AS(SampledField({0, 0}, 1.0, 0.5, 0.1), DomainError);
    CHECK_THROWS_AS(SampledField({0, 0}, 0.0, 1.0, 0.1), DomainError);
}

TEST_CASE("interpolation reproduces linear functions") {
    const auto lin = [](Point p) { return 1.0 + 2.0 * p.x - 3.0 * p.y; };
    const SampledField f = SampledField::sample(lin, {0.0, 0.0}, 1.0, 1.0, 1.0 / 32);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 200; ++k) {
        const Point p{u(rng), u(rng)};
        if (norm(p) > 0.9) continue;
        CHECK(f.interpolate(p) == doctest::Approx(lin(p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(f.interpolate({3.0, 0.0}), DomainError);
}

TEST_CASE("extension of simple fields") {
    const double h = 1.0 / 32;
    const SampledField one = SampledField::sample([](Point) { return 1.0; }, {0.0, 0.0}, 1.0, 1.0, h);
    const SampledField e = extend(one, std::sqrt(2.0));
    for (int j = 0; j < e.n(); ++j)
        for (int i = 0; i < e.n(); ++i)
            if (e.inside(i, j)) CHECK(e.value(i, j) == doctest::Approx(1.0));
    CHECK(e.seminorm_squared(0.75) == doctest::Approx(0.0));
    // u = 1 has L2 ratio sqrt(|B_R| / |B_1|) = R
    const ExtensionRatios r = extension_bound_ratios(one, std::sqrt(2.0), 0.75);
    CHECK(r.l2_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK_FALSE(r.seminorm_ratio.has_value());
    CHECK(r.seminorm_bound == doctest::Approx(64.0));
    CHECK(r.l2_bound == doctest::Approx(8.0));

    // |x| extends to 1/|x|
    const SampledField radial = SampledField::sample([](Point p) { return norm(p); }, {0.0, 0.0}, 1.0, 1.0, h);
    const SampledField er = extend(radial, 1.5);
    double worst = 0.0;
    double jump = 0.0;
    for (int j = 0; j < er.n(); ++j) {
        for (int i = 0; i < er.n(); ++i) {
            if (!er.inside(i, j)) continue;
            const double r0 = norm(er.cell_center(i, j));
            const double want = r0 <= 1.0 ? r0 : 1.0 / r0;
            worst = std::max(worst, std::abs(er.value(i, j) - want));
            if (er.inside(i + 1, j)) jump = std::max(jump, std::abs(er.value(i + 1, j) - er.value(i, j)));
        }
    }
    CHECK(worst < 2.0 * h);
    // continuity across the unit circle
    CHECK(jump < 2.0 * h);

    // off-center disks use the Kelvin map of that disk
    const SampledField shifted =
        SampledField::sample([](Point p) { return norm(p - Point{1.0, 2.0}) / 2.0; }, {1.0, 2.0}, 2.0, 1.0, 1.0 / 16);
    const SampledField es = extend(shifted, 1.25);
    const Point q{1.0 + 2.25, 2.0};
    const auto [i, j] = std::pair{static_cast<int>((q.x - (es.cell_center(0, 0).x)) * 16 + 0.5), es.n() / 2};
    CHECK(es.value(i, j) == doctest::Approx(2.0 / norm(es.cell_center(i, j) - Point{1.0, 2.0})).epsilon(0.03));
    CHECK_THROWS_AS(extend(one, 1.0), DomainError);
}

TEST_CASE("discrete seminorm against oracles") {
    const double s = 0.75;
    const double oracle = linear_seminorm_oracle(s);
    CHECK(oracle == doctest::Approx(17.0342297804).epsilon(1e-8));
    double previous = 1e300;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const SampledField u = SampledField::sample([](Point p) { return p.x; }, {0.0, 0.0}, 1.0, 1.0, h);
        const double err = std::abs(u.seminorm_squared(s) - oracle);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 0.005 * oracle);
    // scaling: [c u]^2 = c^2 [u]^2
    const SampledField u = SampledField::sample(random_smooth_field(3), {0.0, 0.0}, 1.0, 1.0, 1.0 / 16);
    SampledField v = u;
    for (int j = 0; j < v.n(); ++j)
        for (int i = 0; i < v.n(); ++i)
            if (v.inside(i, j)) v.set(i, j, -3.0 * v.value(i, j) + 7.0);
    CHECK(v.seminorm_squared(s) == doctest::Approx(9.0 * u.seminorm_squared(s)).epsilon(1e-12));
    CHECK_THROWS_AS(u.seminorm_squared(1.0), DomainError);
}

TEST_CASE("extension bounds hold on random fields") {
    const double R = std::sqrt(2.0);
    for (double s : {0.6, 0.9}) {
        double semi = 0.0;
        double l2 = 0.0;
        for (unsigned seed = 0; seed < 100; ++seed) {
            const SampledField u = SampledField::sample(random_smooth_field(seed), {0.0, 0.0}, 1.0, 1.0, 1.0 / 16);
            const ExtensionRatios r = extension_bound_ratios(u, R, s);
            REQUIRE(r.seminorm_ratio.has_value());
            semi = std::max(semi, *r.seminorm_ratio);
            l2 = std::max(l2, r.l2_ratio);
        }
        CHECK(semi <= 64.0);
        CHECK(l2 <= 8.0);
        // far from the bounds: the constant field alone gives R
        CHECK(l2 >= 1.0);
        MESSAGE("s=" << s << " max seminorm ratio " << semi << " max l2 ratio " << l2);
    }
}

TEST_CASE("inversion inequalities") {
    const InversionCheck c = check_inversion_inequalities(1000000, 11);
    CHECK(c.pairs == 1000000);
    CHECK(c.i2_violations == 0);
    CHECK(c.i3_violations == 0);
    CHECK(c.i2_min_slack >= -1e-12);
    CHECK(c.i3_min_slack >= -1e-12);
    // both are equalities in the limit of points on the circle
    CHECK(c.i3_min_slack < 1e-3);
}

TEST_CASE("subset-mean Poincare ratio") {
    const double h = 1.0 / 16;
    const SampledField grid(Point{0.0, 0.0}, 1.0, 1.0, h);
    const int n = grid.n();
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) cells[static_cast<std::size_t>(j) * n + i] = grid.cell_center(i, j).y > 0.0;
    const DomainMask half(h, {-1.0, -1.0}, n, n, cells);
    const SampledField c = SampledField::sample([](Point) { return 2.0; }, {0.0, 0.0}, 1.0, 1.0, h);
    CHECK(ms_poincare_empirical(c, half, 0.75) == 0.0);
    const SampledField y = SampledField::sample([](Point p) { return p.y; }, {0.0, 0.0}, 1.0, 1.0, h);
    const double ry = ms_poincare_empirical(y, half, 0.75);
    CHECK(ry > 0.0);
    // the ratio is invariant under u -> a u + b
    const SampledField y2 = SampledField::sample([](Point p) { return 5.0 - 3.0 * p.y; }, {0.0, 0.0}, 1.0, 1.0, h);
    CHECK(ms_poincare_empirical(y2, half, 0.75) == doctest::Approx(ry).epsilon(1e-10));

    const PoincareBattery b = run_poincare_battery({0.6, 0.75, 0.9}, 20, 1.0, h, 1);
    REQUIRE(b.max_by_s.size() == 3);
    CHECK(b.max_ratio >= ry * 0.5);
    CHECK(b.max_ratio < 10.0);
    const MSConfig ms = empirical_ms(b);
    CHECK(ms.mode == MSConfig::Mode::empirical);
    CHECK(ms.battery_max == doctest::Approx(b.max_ratio));
    CHECK_THROWS_AS(run_poincare_battery({0.75}, 0, 1.0, h, 1), DomainError);
}
