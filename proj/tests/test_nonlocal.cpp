#include "mhfrac/error.hpp"
#include "mhfrac/geometry.hpp"
#include "mhfrac/nonlocal.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace mhfrac;

namespace {

constexpr double pi = std::numbers::pi;

// Composite Gauss-Legendre (order 16) over [a, b] split into n panels.
double composite(const std::function<double(double)>& f, double a, double b, int n) {
    static const double x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
                                0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
    static const double w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                                0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    const double step = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        const double c = a + (k + 0.5) * step;
        for (int q = 0; q < 8; ++q) total += 0.5 * step * w[q] * (f(c + 0.5 * step * x[q]) + f(c - 0.5 * step * x[q]));
    }
    return total;
}

// Geometric panels [0, e], [e, 2e], ..., ending at b.
double graded(const std::function<double(double)>& f, double e, double b) {
    double total = composite(f, 0.0, std::min(e, b), 2);
    for (double lo = e; lo < b; lo *= 2.0) total += composite(f, lo, std::min(2.0 * lo, b), 2);
    return total;
}

// P_s(B_1) = 2 int_{B_1} (1/s) int_0^{2 pi} t(x, theta)^{-s} dtheta dx, t the ray distance to the circle.
double disk_perimeter_oracle(double s) {
    const double a = 1.0 / (1.0 - s);
    const auto radial = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double e = std::pow(u, a);
        const double r = 1.0 - e;
        const double omr2 = e * (2.0 - e);
        const auto ray = [&](double th) {
            const double rc = r * std::cos(th);
            const double q = std::sqrt(omr2 + rc * rc);
            const double t = rc > 0.0 ? omr2 / (q + rc) : q - rc;
            return std::pow(t, -s) / s;
        };
        const double rho = 2.0 * graded(ray, e, pi);
        return rho * r * a * std::pow(u, a - 1.0);
    };
    return 4.0 * pi * graded(radial, 1e-6, 1.0);
}

Eigen::VectorXd sample(const NonlocalSystem& sys, const std::function<double(Point)>& f) {
    Eigen::VectorXd v(sys.size());
    for (Eigen::Index k = 0; k < sys.size(); ++k) v[k] = f(sys.node_position(k));
    return v;
}

double bump(Point p) {
    const double r2 = p.x * p.x + p.y * p.y;
    return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
}

// Monte-Carlo value of [u]^2 = int |z|^{-2-2s} int |u(x+z) - u(x)|^2 dx dz for u supported in B_1.
double monte_carlo_seminorm(const std::function<double(Point)>& u, double s, int samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double rmax = 2.0;
    const double half = 3.0;  // x in [-3, 3]^2 covers B_1 and B_1 - z
    // r sampled with density (2 - 2s) r^{1-2s} / rmax^{2-2s}
    const double e = 2.0 - 2.0 * s;
    double acc = 0.0;
    double norm2 = 0.0;
    for (int n = 0; n < samples; ++n) {
        const double r = rmax * std::pow(unit(rng), 1.0 / e);
        const double th = 2.0 * pi * unit(rng);
        const Point x{half * (2.0 * unit(rng) - 1.0), half * (2.0 * unit(rng) - 1.0)};
        const double ux = u(x);
        const double d = u({x.x + r * std::cos(th), x.y + r * std::sin(th)}) - ux;
        acc += d * d / (r * r);
        norm2 += ux * ux;
    }
    const double area = 4.0 * half * half;
    // int_0^rmax r^{-1-2s} D dr = (rmax^e / e) E[D / r^2]
    const double near = 2.0 * pi * area * std::pow(rmax, e) / e * acc / samples;
    const double l2 = area * norm2 / samples;
    const double far = 2.0 * l2 * 2.0 * pi * std::pow(rmax, -2.0 * s) / (2.0 * s);
    return near + far;
}

}  // namespace

TEST_CASE("tail density") {
    KernelSpec spec;
    spec.s = 0.75;
    const DomainMask disk = rasterize(ShapeSpec::disk(1.0), 1.0 / 64);
    CHECK(tail_density(disk, spec, {0.0, 0.0}) == doctest::Approx(pi / 0.75).epsilon(0.02));
    spec.s = 0.4;
    CHECK(tail_density(disk, spec, {0.0, 0.0}) == doctest::Approx(pi / 0.4).epsilon(0.02));
    spec.s = 0.75;

    double previous = std::numeric_limits<double>::infinity();
    for (double r : {0.9, 0.7, 0.5, 0.3, 0.1, 0.0}) {
        const double rho = tail_density(disk, spec, {r, 0.0});
        CHECK(rho < previous);
        CHECK(rho > 0.0);
        previous = rho;
    }

    const DomainMask square = rasterize(ShapeSpec::square(1.0), 1.0 / 32);
    // dense polar oracle: rho(0) = int_0^{2 pi} t^{-2s} / (2s), t = 1/2 / max(|cos|, |sin|)
    const double oracle =
        8.0 * composite([](double th) { return std::pow(0.5 / std::cos(th), -1.5) / 1.5; }, 0.0, pi / 4.0, 64);
    CHECK(std::abs(tail_density(square, spec, {0.0, 0.0}) / oracle - 1.0) < 1e-3);

    CHECK_THROWS_AS(tail_density(disk, spec, {1.5, 0.0}), DomainError);
    spec.s = 1.0;
    CHECK_THROWS_AS(tail_density(disk, spec, {0.0, 0.0}), DomainError);
}

TEST_CASE("assembled system: structure") {
    const DomainMask mask = rasterize(ShapeSpec::l_shape(2.0), 0.125);
    for (double s : {0.5, 0.75}) {
        const NonlocalSystem sys = assemble(mask, s, "l");
        const Eigen::MatrixXd a = sys.dense_stiffness();
        const Eigen::MatrixXd b = sys.dense_mass();
        CHECK(a.rows() == sys.size());
        CHECK(b.rows() == sys.size());
        CHECK((a - a.transpose()).norm() <= 1e-12 * a.norm());
        CHECK((b - b.transpose()).norm() == 0.0);
        CHECK(Eigen::LLT<Eigen::MatrixXd>(b).info() == Eigen::Success);

        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * top);
        CHECK(sys.stiffness_norm_bound() >= top);

        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.size());
        CHECK(seminorm_estimate(ones, sys) > 0.0);

        std::mt19937_64 rng(7);
        std::normal_distribution<double> gauss;
        Eigen::VectorXd x(sys.size());
        for (auto& v : x) v = gauss(rng);
        Eigen::VectorXd y;
        sys.apply_stiffness(x, y);
        CHECK((y - a * x).norm() <= 1e-12 * (a * x).norm());
        sys.apply_mass(x, y);
        CHECK((y - b * x).norm() <= 1e-14 * (b * x).norm());
        CHECK(sys.stiffness_entry(3, 5) == a(3, 5));
        CHECK(sys.mass_entry(3, 4) == b(3, 4));
    }
}

TEST_CASE("assembled system: nodes, obstacles and errors") {
    const DomainMask square = rasterize(ShapeSpec::square(2.0), 0.125);
    const NonlocalSystem sys = assemble(square, 0.75);
    // interior nodes of a 16 x 16 cell square
    CHECK(sys.size() == 15 * 15);
    const DomainMask cracked = rasterize(ShapeSpec::cracked_square(2), 0.125);
    const NonlocalSystem csys = assemble(cracked, 0.75);
    for (Eigen::Index k = 0; k < csys.size(); ++k) {
        const Point p = csys.node_position(k);
        for (const Segment& seg : cracked.segments()) CHECK(distance(p, seg) >= 0.125 - 1e-12);
    }
    CHECK(csys.size() < static_cast<Eigen::Index>(31 * 31));

    const DomainMask thin(0.125, {0.0, 0.0}, 4, 1, std::vector<std::uint8_t>(4, 1));
    CHECK_THROWS_AS(assemble(thin, 0.75), EmptyDomainError);
    CHECK_THROWS_AS(assemble(square, 1.0), DomainError);
    Eigen::VectorXd wrong(3);
    CHECK_THROWS_AS(seminorm_estimate(wrong, sys), DimensionError);
}

TEST_CASE("assembled system: grid-shift invariance and domain monotonicity") {
    const double h = 0.125;
    const DomainMask m = rasterize(ShapeSpec::disk(1.0), h);
    const DomainMask shifted(h, {m.origin().x + 5 * h, m.origin().y - 3 * h}, m.nx(), m.ny(), m.cells());
    const NonlocalSystem a = assemble(m, 0.6);
    const NonlocalSystem b = assemble(shifted, 0.6);
    CHECK(a.dense_stiffness() == b.dense_stiffness());
    CHECK(a.dense_mass() == b.dense_mass());

    // enlarge the disk to a square on the same grid
    std::vector<std::uint8_t> cells = m.cells();
    for (int j = 1; j + 1 < m.ny(); ++j)
        for (int i = 1; i + 1 < m.nx(); ++i) cells[static_cast<std::size_t>(j) * m.nx() + i] = 1;
    const DomainMask big(h, m.origin(), m.nx(), m.ny(), cells);
    const NonlocalSystem large = assemble(big, 0.6);
    REQUIRE(large.size() > a.size());
    Eigen::VectorXd small_v = sample(a, bump);
    Eigen::VectorXd large_v = Eigen::VectorXd::Zero(large.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const auto n = a.nodes()[static_cast<std::size_t>(k)];
        large_v[large.node_index(n.i, n.j)] = small_v[k];
    }
    CHECK(seminorm_estimate(large_v, large) <= seminorm_estimate(small_v, a) * (1.0 + 1e-12));
}

TEST_CASE("seminorm estimate") {
    const DomainMask disk = rasterize(ShapeSpec::disk(1.0), 1.0 / 16);
    const NonlocalSystem sys = assemble(disk, 0.75);
    CHECK(seminorm_estimate(Eigen::VectorXd::Zero(sys.size()), sys) == 0.0);
    const Eigen::VectorXd v = sample(sys, bump);
    const double base = seminorm_estimate(v, sys);
    CHECK(seminorm_estimate(3.0 * v, sys) == doctest::Approx(9.0 * base).epsilon(1e-12));

    for (Eigen::Index k = 0; k < sys.size(); k += 17) CHECK(sys.interpolate(v, sys.node_position(k)) == doctest::Approx(v[k]));

    const double mc = monte_carlo_seminorm([&](Point p) { return sys.interpolate(v, p); }, 0.75, 2'000'000, 11);
    CHECK(std::abs(base / mc - 1.0) < 0.01);

    // Leibniz-type product bound
    const Eigen::VectorXd w = sample(sys, [](Point p) { return std::cos(2.0 * p.x) + 0.5 * std::sin(3.0 * p.y); });
    const Eigen::VectorXd uw = v.cwiseProduct(w);
    const double lhs = std::sqrt(seminorm_estimate(uw, sys));
    const double rhs = std::sqrt(base) * w.cwiseAbs().maxCoeff() + std::sqrt(seminorm_estimate(w, sys)) * v.cwiseAbs().maxCoeff();
    CHECK(lhs <= 1.05 * rhs);
}

TEST_CASE("seminorm of a smooth function converges monotonically under refinement") {
    const double oracle = monte_carlo_seminorm(bump, 0.75, 4'000'000, 5);
    std::vector<double> values;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const NonlocalSystem sys = assemble(rasterize(ShapeSpec::disk(1.0), h), 0.75);
        values.push_back(seminorm_estimate(sample(sys, bump), sys));
    }
    const double e0 = std::abs(values[0] - oracle);
    const double e1 = std::abs(values[1] - oracle);
    const double e2 = std::abs(values[2] - oracle);
    CHECK(e1 < e0);
    CHECK(e2 < e1);
    CHECK((values[1] - values[0]) * (values[2] - values[1]) > 0.0);
}

TEST_CASE("fractional perimeter") {
    const DomainMask none(0.1, {0.0, 0.0}, 5, 5, std::vector<std::uint8_t>(25, 0));
    CHECK(fractional_perimeter(none, 0.75) == 0.0);
    CHECK_THROWS_AS(fractional_perimeter(none, 1.0), DomainError);

    const double h = 1.0 / 32;
    for (double s : {0.5, 0.75}) {
        const double p1 = fractional_perimeter(rasterize(ShapeSpec::disk(1.0), h), s);
        const double p2 = fractional_perimeter(rasterize(ShapeSpec::disk(2.0), h), s);
        CHECK(p2 / p1 == doctest::Approx(std::pow(2.0, 2.0 - s)).epsilon(0.02));
        // exact rescaling of the mask
        const DomainMask m = rasterize(ShapeSpec::disk(1.0), h);
        CHECK(fractional_perimeter(scale(m, 2.0), s) == doctest::Approx(std::pow(2.0, 2.0 - s) * p1).epsilon(1e-10));
    }

    // staircase error decays like h^{1-s}; extrapolate with that rate
    const double s = 0.75;
    const double pc = fractional_perimeter(rasterize(ShapeSpec::disk(1.0), 1.0 / 32), s);
    const double pf = fractional_perimeter(rasterize(ShapeSpec::disk(1.0), 1.0 / 64), s);
    const double q = std::pow(2.0, -(1.0 - s));
    const double extrapolated = pf - (pc - pf) * q / (1.0 - q);
    CHECK(std::abs(extrapolated / disk_perimeter_oracle(s) - 1.0) < 0.01);
    CHECK(disk_perimeter_oracle(0.5) == doctest::Approx(124.26127755556).epsilon(1e-6));
}

TEST_CASE("matrix market dump") {
    const NonlocalSystem sys = assemble(rasterize(ShapeSpec::square(1.0), 0.125), 0.75, "sq");
    std::ostringstream out;
    write_matrix_market(out, sys, true);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "%%MatrixMarket matrix coordinate real symmetric");
    std::getline(in, line);
    CHECK(line.find("domain=sq") != std::string::npos);
    long rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == sys.size());
    CHECK(nnz == sys.size() * (sys.size() + 1) / 2);
    long i = 0, j = 0;
    double v = 0.0;
    in >> i >> j >> v;
    CHECK(v == doctest::Approx(sys.stiffness_entry(i - 1, j - 1)).epsilon(1e-15));
    std::ostringstream mass;
    write_matrix_market(mass, sys, false);
    CHECK(mass.str().find("% mass") != std::string::npos);
}
