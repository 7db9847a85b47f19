#include "mhfrac/constants.hpp"
#include "mhfrac/error.hpp"
#include "mhfrac/torus.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mhfrac;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("torus norm") {
    CHECK(torus_norm(0.0) == 0.0);
    CHECK(torus_norm(1.5 * pi) == doctest::Approx(0.5 * pi).epsilon(1e-14));
    CHECK(torus_norm(2.0 * pi + 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(torus_norm(-0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(torus_norm(7.0, 4.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(torus_norm(1.0, 0.0), DomainError);
}

TEST_CASE("chord ratio and chord identity") {
    const auto [lo, hi] = chord_ratio_extrema(100000);
    CHECK(lo == doctest::Approx(2.0 / pi).epsilon(1e-12));
    CHECK(std::abs(hi - 1.0) < 1e-6);
    CHECK(lo >= 2.0 / pi - 1e-12);
    CHECK(hi <= 1.0 + 1e-12);
    CHECK(chord_identity_defect(100000) < 1e-12);
    CHECK_THROWS_AS(chord_ratio_extrema(8), DomainError);
}

TEST_CASE("mode weights") {
    const double s = 0.75;
    const double c1 = c1s(s);
    double prev = 0.0;
    for (int n = 1; n <= 12; ++n) {
        const double w = mode_weight(n, s);
        CHECK(w == doctest::Approx(mode_weight(-n, s)).epsilon(1e-15));
        CHECK(w >= c1 * std::pow(n, 2.0 * s) * (1.0 - 1e-12));
        CHECK(w > prev);
        prev = w;
    }
    CHECK(mode_weight(0, s) == 0.0);
}

TEST_CASE("Fourier seminorm against direct quadrature") {
    const TorusFunction c = TorusFunction::from_real(0.0, {1.0}, {});
    const double s = 0.75;
    CHECK(std::abs(seminorm_quadrature(c, s, 1024) / seminorm_fourier(c, s) - 1.0) < 1e-4);
    const TorusFunction w = TorusFunction::from_real(0.0, {1.0, 0.0}, {0.0, 0.3});
    for (double t : {0.55, 0.75, 0.95})
        CHECK(std::abs(seminorm_quadrature(w, t, 1024) / seminorm_fourier(w, t) - 1.0) < 1e-3);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TorusFunction r = random_trig_polynomial(8, seed);
        CHECK(std::abs(seminorm_quadrature(r, s, 1024) / seminorm_fourier(r, s) - 1.0) < 1e-3);
    }
    const TorusFunction constant = TorusFunction::from_real(2.0, {0.0}, {});
    CHECK(seminorm_fourier(constant, s) == 0.0);
    CHECK(seminorm_quadrature(constant, s, 64) == doctest::Approx(0.0));
    CHECK(seminorm_quadrature(w.scaled(2.0), s, 256) == doctest::Approx(4.0 * seminorm_quadrature(w, s, 256)).epsilon(1e-12));
    // general period: both routes rescale identically
    const TorusFunction wt = TorusFunction::from_real(0.0, {1.0, 0.0}, {0.0, 0.3}, 5.0);
    CHECK(std::abs(seminorm_quadrature(wt, s, 1024) / seminorm_fourier(wt, s) - 1.0) < 1e-3);
    CHECK_THROWS_AS(seminorm_fourier(w, 1.0), DomainError);
    CHECK_THROWS_AS(seminorm_quadrature(w, s, 32), DomainError);
}

TEST_CASE("translation invariance and group law") {
    const TorusFunction w = random_trig_polynomial(6, 42);
    const double s = 0.7;
    const TorusFunction moved = translate(w, 0.37);
    CHECK(std::abs(seminorm_fourier(moved, s) - seminorm_fourier(w, s)) <= 1e-12 * seminorm_fourier(w, s));
    CHECK(moved.l2_norm_squared() == doctest::Approx(w.l2_norm_squared()).epsilon(1e-12));
    CHECK(moved(0.0) == doctest::Approx(w(0.37)).epsilon(1e-12));
    const TorusFunction twice = translate(translate(w, 0.2), 0.5);
    const TorusFunction once = translate(w, 0.7);
    for (int n = -6; n <= 6; ++n) CHECK(std::abs(twice.coefficient(n) - once.coefficient(n)) < 1e-13);
    const TorusFunction same = translate(w, 0.0);
    for (int n = -6; n <= 6; ++n) CHECK(same.coefficient(n) == w.coefficient(n));
}

TEST_CASE("one-dimensional Poincare inequality") {
    const TorusFunction cosm1 = TorusFunction::from_real(-1.0, {1.0}, {});
    CHECK(poincare_margin(cosm1, 0.75, 0.0) >= 0.0);
    const TorusFunction zero = TorusFunction::from_real(0.0, {0.0}, {});
    CHECK(poincare_margin(zero, 0.75, 0.0) == 0.0);
    CHECK_THROWS_AS(poincare_margin(TorusFunction::from_real(1.0, {1.0}, {}), 0.75, 0.0), HypothesisError);
    CHECK_THROWS_AS(poincare_margin(cosm1, 0.5, 0.0), DomainError);
    double worst = 1e300;
    for (double s : {0.55, 0.75, 0.95}) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const int degree = 1 + static_cast<int>(seed % 8);
            const TorusFunction w = random_trig_polynomial(degree, seed).vanishing_at(0.0);
            const double margin = poincare_margin(w, s, 0.0);
            worst = std::min(worst, margin / w.l2_norm_squared());
        }
    }
    CHECK(worst > 0.0);
    // period T: vanishing at an arbitrary theta0
    const TorusFunction wt = random_trig_polynomial(5, 7, 3.0).vanishing_at(1.1);
    CHECK(poincare_margin(wt, 0.8, 1.1) > 0.0);
}

TEST_CASE("TorusFunction validation") {
    using C = TorusFunction::Complex;
    CHECK_THROWS_AS(TorusFunction({C(1.0)}), DimensionError);
    CHECK_THROWS_AS(TorusFunction({C(0.0, 1.0), C(0.0), C(0.0, 1.0)}), DomainError);
    CHECK_NOTHROW(TorusFunction({C(0.0, 1.0), C(0.0), C(0.0, 1.0)}, 2.0 * pi, false));
    const TorusFunction w = TorusFunction::from_real(0.5, {1.0}, {2.0});
    CHECK(w(0.3) == doctest::Approx(0.5 + std::cos(0.3) + 2.0 * std::sin(0.3)).epsilon(1e-13));
    CHECK(w.l2_norm_squared() == doctest::Approx(2.0 * pi * (0.25 + 0.5 + 2.0)).epsilon(1e-13));
}
