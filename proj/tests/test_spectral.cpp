#include "mhfrac/constants.hpp"
#include "mhfrac/error.hpp"
#include "mhfrac/geometry.hpp"
#include "mhfrac/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace mhfrac;

namespace {

constexpr double pi = std::numbers::pi;

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd m) {
    const Eigen::Index n = m.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-30 * m.squaredNorm()) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = m(k, k);
    std::sort(out.begin(), out.end());
    return out;
}

// Lower Cholesky factor, written out so the oracle does not share the solver's factorization.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& b) {
    const Eigen::Index n = b.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = b(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = b(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

void check_residual(const EigenEstimate& e, double tol = 1e-8) {
    CHECK(e.lambda > 0.0);
    CHECK(e.residual <= tol * e.lambda);
}

}  // namespace

TEST_CASE("smallest eigenpair of small pencils") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd b = id;
    b(0, 1) = b(1, 0) = 0.3;
    EigenEstimate e = smallest_eigenpair(b, b);
    CHECK(e.lambda == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a.diagonal() << 1.0, 2.0, 3.0;
    e = smallest_eigenpair(a, Eigen::MatrixXd::Identity(3, 3));
    CHECK(e.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.vector[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(e.vector[1]) < 1e-8);
    CHECK(std::abs(e.vector[2]) < 1e-8);
    check_residual(e);

    CHECK_THROWS_AS(smallest_eigenpair(a, id), DimensionError);
    CHECK_THROWS_AS(smallest_eigenpair(Eigen::MatrixXd(2, 3), Eigen::MatrixXd(2, 3)), DimensionError);
}

TEST_CASE("random SPD pencils against a Jacobi oracle") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 50;
        Eigen::MatrixXd ma(n, n), mb(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ma(i, j) = gauss(rng);
                mb(i, j) = gauss(rng);
            }
        const Eigen::MatrixXd a = ma.transpose() * ma + 0.1 * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd b = mb.transpose() * mb + 1.0 * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd l = cholesky(b);
        const Eigen::MatrixXd li = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd c = li * a * li.transpose();
        const double oracle = jacobi_eigenvalues(0.5 * (c + c.transpose()))[0];
        const EigenEstimate e = smallest_eigenpair(a, b);
        CHECK(std::abs(e.lambda / oracle - 1.0) < 1e-8);
        check_residual(e);
        CHECK(e.vector.dot(b * e.vector) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(e.vector.sum() >= 0.0);
    }
}

TEST_CASE("fractional eigenvalue: refinement, positivity and residuals") {
    for (double s : {0.5, 0.75}) {
        double previous = std::numeric_limits<double>::infinity();
        for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
            const EigenEstimate e = lambda1_s(rasterize(ShapeSpec::disk(1.0), h), s);
            check_residual(e);
            CHECK(e.lambda < previous);
            CHECK(e.vector.minCoeff() >= -1e-8 * e.vector.maxCoeff());
            CHECK(e.positions.size() == static_cast<std::size_t>(e.vector.size()));
            CHECK(e.h == h);
            CHECK(e.s == s);
            previous = e.lambda;
        }
    }
}

TEST_CASE("fractional eigenvalue: scaling and monotonicity") {
    const double h = 1.0 / 16;
    for (double s : {0.55, 0.75, 0.9}) {
        const DomainMask m = rasterize(ShapeSpec::square(2.0), h);
        const double base = lambda1_s(m, s).lambda;
        CHECK(lambda1_s(scale(m, 2.0), s).lambda == doctest::Approx(std::pow(2.0, -2.0 * s) * base).epsilon(1e-10));
        const double matched = lambda1_s(rasterize(ShapeSpec::square(4.0), 2.0 * h), s).lambda;
        CHECK(matched == doctest::Approx(std::pow(2.0, -2.0 * s) * base).epsilon(0.03));
    }

    const DomainMask disk = rasterize(ShapeSpec::disk(1.0), h);
    std::vector<std::uint8_t> cells = disk.cells();
    for (int j = 2; j + 2 < disk.ny(); ++j)
        for (int i = 2; i + 2 < disk.nx(); ++i) cells[static_cast<std::size_t>(j) * disk.nx() + i] = 1;
    const DomainMask square(h, disk.origin(), disk.nx(), disk.ny(), cells);
    for (double s : {0.5, 0.75}) CHECK(lambda1_s(disk, s).lambda >= lambda1_s(square, s).lambda);
}

TEST_CASE("local eigenvalue") {
    const EigenEstimate sq = lambda1_local(rasterize(ShapeSpec::square(pi), pi / 128));
    CHECK(sq.lambda == doctest::Approx(2.0).epsilon(0.02));
    check_residual(sq);
    const double j0 = bessel_j0_first_zero();
    const EigenEstimate disk = lambda1_local(rasterize(ShapeSpec::disk(1.0), 1.0 / 64));
    CHECK(disk.lambda == doctest::Approx(j0 * j0).epsilon(0.02));
    CHECK(disk.vector.minCoeff() >= -1e-8 * disk.vector.maxCoeff());

    const DomainMask m = rasterize(ShapeSpec::l_shape(2.0), 1.0 / 16);
    CHECK(lambda1_local(scale(m, 3.0)).lambda == doctest::Approx(lambda1_local(m).lambda / 9.0).epsilon(1e-10));

    double previous = std::numeric_limits<double>::infinity();
    for (int f : {1, 2, 4}) {
        const double lam = lambda1_local(refine(m, f)).lambda;
        CHECK(lam < previous);
        previous = lam;
    }

    // slits are Dirichlet walls: the cracked square lies above the uncracked one
    const double h = 1.0 / 16;
    CHECK(lambda1_local(rasterize(ShapeSpec::cracked_square(2), h)).lambda > lambda1_local(rasterize(ShapeSpec::square(4.0), h)).lambda);
    CHECK_THROWS_AS(lambda1_local(DomainMask(h, {0, 0}, 3, 1, std::vector<std::uint8_t>(3, 1))), EmptyDomainError);
}

TEST_CASE("fractional to local trend near s = 1") {
    const DomainMask m = rasterize(ShapeSpec::disk(1.0), 1.0 / 32);
    const double a = (1.0 - 0.95) * lambda1_s(m, 0.95).lambda;
    const double b = (1.0 - 0.99) * lambda1_s(m, 0.99).lambda;
    CHECK(std::abs(a / b - 1.0) < 0.25);
}

TEST_CASE("mode dump") {
    const EigenEstimate e = lambda1_s(rasterize(ShapeSpec::disk(1.0), 1.0 / 8), 0.75);
    std::ostringstream out;
    write_mode(out, e);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("# lambda=", 0) == 0);
    int lines = 0;
    double x = 0, y = 0, v = 0;
    while (in >> x >> y >> v) ++lines;
    CHECK(lines == e.vector.size());
    EigenEstimate raw;
    raw.vector = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(write_mode(out, raw), DimensionError);
}
