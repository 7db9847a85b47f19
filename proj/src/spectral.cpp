#include "mhfrac/spectral.hpp"

#include "mhfrac/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace mhfrac {

namespace {

struct RitzResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd coefficients;  // B-orthonormal combinations of the basis columns
};

/// Rayleigh-Ritz on span(S) with directions of negligible B-norm dropped.
RitzResult rayleigh_ritz(const Eigen::MatrixXd& s, const Eigen::MatrixXd& as, const Eigen::MatrixXd& bs) {
    Eigen::MatrixXd gb = s.transpose() * bs;
    Eigen::MatrixXd ga = s.transpose() * as;
    gb = 0.5 * (gb + gb.transpose()).eval();
    ga = 0.5 * (ga + ga.transpose()).eval();
    const Eigen::Index m = s.cols();
    Eigen::VectorXd d(m);
    for (Eigen::Index c = 0; c < m; ++c) d[c] = gb(c, c) > 0.0 ? 1.0 / std::sqrt(gb(c, c)) : 0.0;
    const Eigen::MatrixXd gbs = d.asDiagonal() * gb * d.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(gbs);
    const double top = eb.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < m; ++c)
        if (eb.eigenvalues()[c] > 1e-13 * top) keep.push_back(c);
    Eigen::MatrixXd t(m, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        t.col(static_cast<Eigen::Index>(c)) = d.asDiagonal() * eb.eigenvectors().col(keep[c]) / std::sqrt(eb.eigenvalues()[keep[c]]);
    Eigen::MatrixXd h = t.transpose() * ga * t;
    h = 0.5 * (h + h.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(h);
    return {eh.eigenvalues(), t * eh.eigenvectors()};
}

Eigen::MatrixXd hcat(std::initializer_list<const Eigen::MatrixXd*> blocks) {
    Eigen::Index cols = 0;
    Eigen::Index rows = 0;
    for (const auto* b : blocks) {
        cols += b->cols();
        rows = std::max(rows, b->rows());
    }
    Eigen::MatrixXd out(rows, cols);
    Eigen::Index at = 0;
    for (const auto* b : blocks) {
        if (b->cols() == 0) continue;
        out.middleCols(at, b->cols()) = *b;
        at += b->cols();
    }
    return out;
}

/// Tent-shaped start vector: distance of each node to the boundary.
Eigen::VectorXd distance_guess(const DomainMask& mask, const std::vector<Point>& positions) {
    const BoundaryDistance dist(mask);
    Eigen::VectorXd g(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t k = 0; k < positions.size(); ++k) g[static_cast<Eigen::Index>(k)] = dist(positions[k]);
    return g;
}

}  // namespace

void normalize_sign(Eigen::VectorXd& v, const Eigen::VectorXd& bv) {
    const double n2 = v.dot(bv);
    if (!(n2 > 0.0)) throw DomainError("normalize_sign: vector has no positive B-norm");
    v /= std::sqrt(n2);
    if (v.sum() < 0.0) v = -v;
}

EigenEstimate lobpcg(Eigen::Index n, const BlockOperator& apply_a, const BlockOperator& apply_b,
                     const BlockOperator& precondition, const SolverOptions& options, const Eigen::VectorXd& guess) {
    if (n < 1) throw DimensionError("lobpcg: empty problem");
    if (guess.size() != 0 && guess.size() != n) throw DimensionError("lobpcg: guess has the wrong length");
    if (!(options.tolerance > 0.0) || options.max_iterations < 1 || options.block < 1)
        throw DomainError("lobpcg: invalid solver options");
    const Eigen::Index k = std::min<Eigen::Index>(options.block, n);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < n; ++r) x(r, c) = gauss(rng);
    x.col(0) = guess.size() == n && guess.norm() > 0.0 ? guess : Eigen::VectorXd::Ones(n);

    Eigen::MatrixXd ax;
    Eigen::MatrixXd bx;
    apply_a(x, ax);
    apply_b(x, bx);
    RitzResult rr = rayleigh_ritz(x, ax, bx);
    if (rr.coefficients.cols() < k) throw DimensionError("lobpcg: start block is rank deficient");
    Eigen::MatrixXd c0 = rr.coefficients.leftCols(k);
    x = x * c0;
    ax = ax * c0;
    bx = bx * c0;
    Eigen::VectorXd lambda = rr.values.head(k);

    Eigen::MatrixXd p(n, 0), ap(n, 0), bp(n, 0);
    Eigen::MatrixXd w, aw, bw;
    bool explicit_products = true;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const Eigen::MatrixXd r = ax - bx * lambda.asDiagonal();
        const double scale = std::max(std::abs(lambda[0]) * bx.col(0).norm(), std::numeric_limits<double>::min());
        const double rel = r.col(0).norm() / scale;
        if (rel <= options.tolerance || (rel <= 1e3 * options.tolerance && !explicit_products)) {
            if (explicit_products && rel <= options.tolerance) {
                EigenEstimate e;
                e.vector = x.col(0);
                Eigen::VectorXd bv = bx.col(0);
                const double bnorm = e.vector.dot(bv);
                e.lambda = e.vector.dot(ax.col(0)) / bnorm;
                e.residual = (ax.col(0) - e.lambda * bv).norm() / bv.norm();
                normalize_sign(e.vector, bv);
                e.iterations = it;
                return e;
            }
            // refresh products before trusting the implicit residual
            apply_a(x, ax);
            apply_b(x, bx);
            explicit_products = true;
            continue;
        }
        explicit_products = false;

        precondition(r, w);
        w -= x * (bx.transpose() * w);
        apply_a(w, aw);
        apply_b(w, bw);

        const Eigen::MatrixXd s = hcat({&x, &w, &p});
        const Eigen::MatrixXd as = hcat({&ax, &aw, &ap});
        const Eigen::MatrixXd bs = hcat({&bx, &bw, &bp});
        rr = rayleigh_ritz(s, as, bs);
        if (rr.coefficients.cols() < k) throw ConvergenceError("lobpcg: search space collapsed");
        const Eigen::MatrixXd c = rr.coefficients.leftCols(k);
        lambda = rr.values.head(k);
        const Eigen::Index tail = s.cols() - k;
        const Eigen::MatrixXd ct = c.bottomRows(tail);
        p = s.rightCols(tail) * ct;
        ap = as.rightCols(tail) * ct;
        bp = bs.rightCols(tail) * ct;
        x = s * c;
        ax = as * c;
        bx = bs * c;
        if (it % 20 == 0) {
            apply_a(x, ax);
            apply_b(x, bx);
            explicit_products = true;
        }
    }
    throw ConvergenceError("lobpcg: no convergence within the iteration limit");
}

EigenEstimate smallest_eigenpair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SolverOptions& options) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw DimensionError("smallest_eigenpair: A and B must be square of equal size");
    const double eps = 1e-10 * std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300) /
                       std::max(b.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    const Eigen::LDLT<Eigen::MatrixXd> factor(a + eps * b);
    if (factor.info() != Eigen::Success) throw ConvergenceError("smallest_eigenpair: factorization failed");
    const auto apply_a = [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = a * x; };
    const auto apply_b = [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = b * x; };
    const auto prec = [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = factor.solve(x); };
    EigenEstimate e = lobpcg(a.rows(), apply_a, apply_b, prec, options);
    e.h = 0.0;
    return e;
}

EigenEstimate smallest_eigenpair(const NonlocalSystem& system, const SolverOptions& options) {
    const Eigen::Index n = system.size();
    std::vector<Point> positions;
    positions.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) positions.push_back(system.node_position(k));

    // tent start vector from lattice distance to the nearest missing node
    Eigen::VectorXd guess(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto node = system.nodes()[static_cast<std::size_t>(k)];
        int depth = 1;
        while (depth < 64) {
            bool inside = true;
            for (int d = -depth; d <= depth && inside; ++d)
                inside = system.node_index(node.i + d, node.j + depth) >= 0 && system.node_index(node.i + d, node.j - depth) >= 0 &&
                         system.node_index(node.i + depth, node.j + d) >= 0 && system.node_index(node.i - depth, node.j + d) >= 0;
            if (!inside) break;
            ++depth;
        }
        guess[k] = depth;
    }
    Eigen::VectorXd ag;
    Eigen::VectorXd bg;
    system.apply_stiffness(guess, ag);
    system.apply_mass(guess, bg);
    NonlocalSystem work = system;
    work.set_preconditioner_shift(guess.dot(ag) / guess.dot(bg));

    const auto columnwise = [](auto&& op) {
        return [op](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
            y.resize(x.rows(), x.cols());
            Eigen::VectorXd in;
            Eigen::VectorXd out;
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                in = x.col(c);
                op(in, out);
                y.col(c) = out;
            }
        };
    };
    EigenEstimate e = lobpcg(
        n, columnwise([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { work.apply_stiffness(x, y); }),
        columnwise([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { work.apply_mass(x, y); }),
        columnwise([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { work.apply_preconditioner(x, y); }), options, guess);
    e.h = system.h();
    e.s = system.s();
    e.positions = std::move(positions);
    e.label = system.label();
    return e;
}

EigenEstimate lambda1_s(const DomainMask& mask, double s, const SolverOptions& options) {
    return smallest_eigenpair(assemble(mask, s), options);
}

EigenEstimate lambda1_local(const DomainMask& mask, const SolverOptions& options) {
    const double h = mask.h();
    std::vector<GridIndex> nodes;
    std::vector<Point> positions;
    std::vector<int> index(static_cast<std::size_t>(mask.nx() + 1) * (mask.ny() + 1), -1);
    const auto slot = [&](int i, int j) { return static_cast<std::size_t>(j) * (mask.nx() + 1) + i; };
    for (int j = 1; j < mask.ny(); ++j) {
        for (int i = 1; i < mask.nx(); ++i) {
            if (!(mask.occupied(i - 1, j - 1) && mask.occupied(i, j - 1) && mask.occupied(i - 1, j) && mask.occupied(i, j)))
                continue;
            const Point p = mask.node(i, j);
            bool on_obstacle = false;
            for (const Segment& seg : mask.segments()) on_obstacle = on_obstacle || distance(p, seg) <= 1e-12 * h;
            if (on_obstacle) continue;
            index[slot(i, j)] = static_cast<int>(nodes.size());
            nodes.push_back({i, j});
            positions.push_back(p);
        }
    }
    if (nodes.empty()) throw EmptyDomainError("lambda1_local: no interior node");
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nodes.size() * 5);
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const int row = static_cast<int>(k);
        trip.emplace_back(row, row, 4.0 * inv_h2);
        const auto [i, j] = nodes[k];
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const int ni = i + di;
            const int nj = j + dj;
            if (ni < 0 || nj < 0 || ni > mask.nx() || nj > mask.ny()) continue;
            const int m = index[slot(ni, nj)];
            if (m < 0) continue;
            bool blocked = false;
            for (const Segment& seg : mask.segments()) blocked = blocked || blocks(seg, positions[k], positions[static_cast<std::size_t>(m)]);
            if (!blocked) trip.emplace_back(row, m, -inv_h2);
        }
    }
    Eigen::SparseMatrix<double> lap(n, n);
    lap.setFromTriplets(trip.begin(), trip.end());
    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(lap);
    if (factor.info() != Eigen::Success) throw ConvergenceError("lambda1_local: factorization failed");
    EigenEstimate e = lobpcg(
        n, [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = lap * x; },
        [](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = x; },
        [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { y = factor.solve(x); }, options,
        distance_guess(mask, positions));
    e.h = h;
    e.s = 1.0;
    e.positions = std::move(positions);
    return e;
}

void write_mode(std::ostream& out, const EigenEstimate& estimate) {
    if (estimate.positions.size() != static_cast<std::size_t>(estimate.vector.size()))
        throw DimensionError("write_mode: estimate carries no node positions");
    out << "# lambda=" << std::setprecision(12) << estimate.lambda << " s=" << estimate.s << " h=" << estimate.h << "\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < estimate.positions.size(); ++k)
        out << estimate.positions[k].x << " " << estimate.positions[k].y << " " << estimate.vector[static_cast<Eigen::Index>(k)] << "\n";
}

}  // namespace mhfrac
