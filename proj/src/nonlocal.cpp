#include "mhfrac/nonlocal.hpp"

#include "mhfrac/error.hpp"
#include "mhfrac/lattice_kernel.hpp"
#include "mhfrac/quadrature.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace mhfrac {

namespace {

constexpr double kMass1d[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};

void require_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("nonlocal: s must lie in (0, 1)");
}

/// int_box |x - y|^{-p} dy, recursively subdivided near x.
double cell_integral(Point x, const Box& box, double p, int depth) {
    const double size = box.hi.x - box.lo.x;
    const double d = distance(x, box);
    if (d > 2.0 * size || depth >= 24) {
        const auto& gl = quad::gauss_legendre(6);
        const Point c = 0.5 * (box.lo + box.hi);
        const double half = 0.5 * size;
        double sum = 0.0;
        for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
            for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
                const Point y{c.x + half * gl.nodes[a], c.y + half * gl.nodes[b]};
                sum += gl.weights[a] * gl.weights[b] * std::pow(norm(x - y), -p);
            }
        }
        return sum * half * half;
    }
    const Point m = 0.5 * (box.lo + box.hi);
    return cell_integral(x, {box.lo, m}, p, depth + 1) + cell_integral(x, {{m.x, box.lo.y}, {box.hi.x, m.y}}, p, depth + 1) +
           cell_integral(x, {{box.lo.x, m.y}, {m.x, box.hi.y}}, p, depth + 1) + cell_integral(x, {m, box.hi}, p, depth + 1);
}

/// Distance from x (inside the box) to the box boundary along direction theta.
double ray_exit(Point x, const Box& box, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double t = std::numeric_limits<double>::infinity();
    if (c > 0.0) t = std::min(t, (box.hi.x - x.x) / c);
    if (c < 0.0) t = std::min(t, (box.lo.x - x.x) / c);
    if (s > 0.0) t = std::min(t, (box.hi.y - x.y) / s);
    if (s < 0.0) t = std::min(t, (box.lo.y - x.y) / s);
    return t;
}

/// int over the exterior of the box of |x - y|^{-p} dy = int_0^{2pi} t(theta)^{2-p} / (p-2).
double box_exterior(Point x, const Box& box, double p) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> cuts{0.0, two_pi};
    for (Point corner : {box.lo, box.hi, Point{box.lo.x, box.hi.y}, Point{box.hi.x, box.lo.y}}) {
        double a = std::atan2(corner.y - x.y, corner.x - x.x);
        if (a < 0.0) a += two_pi;
        cuts.push_back(a);
    }
    std::sort(cuts.begin(), cuts.end());
    const auto& gl = quad::gauss_legendre(24);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        if (b - a < 1e-15) continue;
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double theta = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
            acc += gl.weights[q] * std::pow(ray_exit(x, box, theta), 2.0 - p);
        }
        total += 0.5 * (b - a) * acc;
    }
    return total / (p - 2.0);
}

}  // namespace

double KernelSpec::exponent() const { return kind == KernelKind::eigen ? 2.0 + 2.0 * s : 2.0 + s; }

void KernelSpec::validate() const {
    require_order(s);
    if (near_radius < 2) throw DomainError("KernelSpec: near radius must be at least 2 cells");
    if (!(tolerance > 0.0)) throw DomainError("KernelSpec: tolerance must be positive");
}

std::vector<StencilEntry> nearfield_stencil(const KernelSpec& spec, double h) {
    spec.validate();
    if (!(h > 0.0)) throw DomainError("nearfield_stencil: h must be positive");
    std::vector<StencilEntry> out;
    const int r = spec.near_radius;
    const bool eigen = spec.kind == KernelKind::eigen;
    const double scale = std::pow(h, eigen ? 2.0 - 2.0 * spec.s : 2.0 - spec.s);
    for (int di = -r; di <= r; ++di) {
        for (int dj = -r; dj <= r; ++dj) {
            if (!eigen && di == 0 && dj == 0) continue;
            // evaluate on the octant representative so symmetric offsets agree bit for bit
            int a = std::abs(di);
            int b = std::abs(dj);
            if (b > a) std::swap(a, b);
            const double unit = eigen ? hat_pair_kernel(a, b, spec.s, spec.tolerance * 1e-1)
                                      : cell_pair_kernel(a, b, spec.s, spec.tolerance * 1e-1);
            out.push_back({di, dj, scale * unit});
        }
    }
    return out;
}

double tail_density(const DomainMask& mask, const KernelSpec& spec, Point x) {
    spec.validate();
    if (!mask.contains(x) || !(distance_to_boundary(mask, x) > 0.0))
        throw DomainError("tail_density: point is not strictly inside the domain");
    const double p = spec.exponent();
    double total = 0.0;
    for (int j = 0; j < mask.ny(); ++j)
        for (int i = 0; i < mask.nx(); ++i)
            if (!mask.occupied(i, j)) total += cell_integral(x, mask.cell_box(i, j), p, 0);
    return total + box_exterior(x, mask.bounding_box(), p);
}

std::vector<GridIndex> admissible_nodes(const DomainMask& mask) {
    std::vector<GridIndex> nodes;
    const double h = mask.h();
    for (int j = 1; j < mask.ny(); ++j) {
        for (int i = 1; i < mask.nx(); ++i) {
            if (!(mask.occupied(i - 1, j - 1) && mask.occupied(i, j - 1) && mask.occupied(i - 1, j) && mask.occupied(i, j)))
                continue;
            const Point c = mask.node(i, j);
            const Box support{{c.x - h, c.y - h}, {c.x + h, c.y + h}};
            bool blocked = false;
            for (const Segment& seg : mask.segments()) {
                if (intersects_open(seg, support)) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) nodes.push_back({i, j});
        }
    }
    return nodes;
}

NonlocalSystem::NonlocalSystem(const DomainMask& mask, double s, std::string label)
    : s_(s), h_(mask.h()), origin_(mask.origin()), label_(std::move(label)) {
    require_order(s);
    nodes_ = admissible_nodes(mask);
    if (nodes_.empty()) throw EmptyDomainError("assemble: no admissible node (domain too thin for h)");
    int imax = nodes_.front().i;
    int jmax = nodes_.front().j;
    imin_ = imax;
    jmin_ = jmax;
    for (const auto& n : nodes_) {
        imin_ = std::min(imin_, n.i);
        jmin_ = std::min(jmin_, n.j);
        imax = std::max(imax, n.i);
        jmax = std::max(jmax, n.j);
    }
    lx_ = imax - imin_ + 1;
    ly_ = jmax - jmin_ + 1;
    index_.assign(static_cast<std::size_t>(lx_) * ly_, -1);
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        index_[static_cast<std::size_t>(nodes_[k].i - imin_) * ly_ + (nodes_[k].j - jmin_)] = static_cast<int>(k);
    scale_ = std::pow(h_, 2.0 - 2.0 * s_);
    table_ = &hat_pair_table(s_);
    conv_ = std::make_shared<const LatticeConvolution>(lx_, ly_, [this](int a, int b) { return (*table_)(a, b); });
    set_preconditioner_shift(0.0);
}

void NonlocalSystem::set_preconditioner_shift(double shift) {
    const auto& sym = conv_->symbol();
    const int px = conv_->px();
    const int py = conv_->py();
    const int half = py / 2 + 1;
    double peak = 0.0;
    for (double v : sym) peak = std::max(peak, v);
    inverse_symbol_.resize(sym.size());
    for (int a = 0; a < px; ++a) {
        const double mx = 2.0 / 3.0 + std::cos(2.0 * std::numbers::pi * a / px) / 3.0;
        for (int b = 0; b < half; ++b) {
            const double my = 2.0 / 3.0 + std::cos(2.0 * std::numbers::pi * b / py) / 3.0;
            const std::size_t k = static_cast<std::size_t>(a) * half + b;
            const double value = scale_ * std::max(sym[k], 1e-6 * peak) + shift * h_ * h_ * mx * my;
            inverse_symbol_[k] = 1.0 / value;
        }
    }
}

int NonlocalSystem::node_index(int i, int j) const {
    const int a = i - imin_;
    const int b = j - jmin_;
    if (a < 0 || b < 0 || a >= lx_ || b >= ly_) return -1;
    return index_[static_cast<std::size_t>(a) * ly_ + b];
}

Point NonlocalSystem::node_position(Eigen::Index k) const {
    const auto& n = nodes_.at(static_cast<std::size_t>(k));
    return {origin_.x + n.i * h_, origin_.y + n.j * h_};
}

double NonlocalSystem::stiffness_entry(Eigen::Index a, Eigen::Index b) const {
    const auto& na = nodes_.at(static_cast<std::size_t>(a));
    const auto& nb = nodes_.at(static_cast<std::size_t>(b));
    return scale_ * (*table_)(na.i - nb.i, na.j - nb.j);
}

double NonlocalSystem::mass_entry(Eigen::Index a, Eigen::Index b) const {
    const auto& na = nodes_.at(static_cast<std::size_t>(a));
    const auto& nb = nodes_.at(static_cast<std::size_t>(b));
    const int di = na.i - nb.i;
    const int dj = na.j - nb.j;
    if (std::abs(di) > 1 || std::abs(dj) > 1) return 0.0;
    return h_ * h_ * kMass1d[di + 1] * kMass1d[dj + 1];
}

void NonlocalSystem::require_size(const Eigen::VectorXd& v) const {
    if (v.size() != size()) throw DimensionError("NonlocalSystem: vector length does not match node count");
}

void NonlocalSystem::apply_stiffness(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    require_size(x);
    std::vector<double> block(static_cast<std::size_t>(lx_) * ly_, 0.0);
    std::vector<double> out(block.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        block[static_cast<std::size_t>(nodes_[k].i - imin_) * ly_ + (nodes_[k].j - jmin_)] = x[static_cast<Eigen::Index>(k)];
    conv_->apply(block.data(), out.data());
    y.resize(size());
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        y[static_cast<Eigen::Index>(k)] = scale_ * out[static_cast<std::size_t>(nodes_[k].i - imin_) * ly_ + (nodes_[k].j - jmin_)];
}

void NonlocalSystem::apply_preconditioner(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    require_size(x);
    std::vector<double> block(static_cast<std::size_t>(lx_) * ly_, 0.0);
    std::vector<double> out(block.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        block[static_cast<std::size_t>(nodes_[k].i - imin_) * ly_ + (nodes_[k].j - jmin_)] = x[static_cast<Eigen::Index>(k)];
    conv_->apply_multiplier(inverse_symbol_, block.data(), out.data());
    y.resize(size());
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        y[static_cast<Eigen::Index>(k)] = out[static_cast<std::size_t>(nodes_[k].i - imin_) * ly_ + (nodes_[k].j - jmin_)];
}

void NonlocalSystem::apply_mass(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    require_size(x);
    y.setZero(size());
    const double h2 = h_ * h_;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        double acc = 0.0;
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const int m = node_index(nodes_[k].i + di, nodes_[k].j + dj);
                if (m >= 0) acc += kMass1d[di + 1] * kMass1d[dj + 1] * x[m];
            }
        }
        y[static_cast<Eigen::Index>(k)] = h2 * acc;
    }
}

Eigen::MatrixXd NonlocalSystem::dense_stiffness() const {
    const Eigen::Index n = size();
    const OffsetTable& table = *table_;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q <= p; ++q) {
            const auto& np = nodes_[static_cast<std::size_t>(p)];
            const auto& nq = nodes_[static_cast<std::size_t>(q)];
            a(p, q) = a(q, p) = scale_ * table(np.i - nq.i, np.j - nq.j);
        }
    }
    return a;
}

Eigen::MatrixXd NonlocalSystem::dense_mass() const { return Eigen::MatrixXd(mass_matrix()); }

Eigen::SparseMatrix<double> NonlocalSystem::mass_matrix() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nodes_.size() * 9);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const int m = node_index(nodes_[k].i + di, nodes_[k].j + dj);
                if (m >= 0) trip.emplace_back(static_cast<int>(k), m, h_ * h_ * kMass1d[di + 1] * kMass1d[dj + 1]);
            }
        }
    }
    Eigen::SparseMatrix<double> b(size(), size());
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

double NonlocalSystem::stiffness_norm_bound() const {
    // some off-diagonal weights are positive for small s, so sum magnitudes
    double row = 0.0;
    for (int di = -(lx_ - 1); di < lx_; ++di)
        for (int dj = -(ly_ - 1); dj < ly_; ++dj) row += std::abs((*table_)(di, dj));
    return scale_ * row;
}

double NonlocalSystem::interpolate(const Eigen::VectorXd& v, Point x) const {
    require_size(v);
    const double gx = (x.x - origin_.x) / h_;
    const double gy = (x.y - origin_.y) / h_;
    const int i0 = static_cast<int>(std::floor(gx));
    const int j0 = static_cast<int>(std::floor(gy));
    double sum = 0.0;
    for (int i = i0; i <= i0 + 1; ++i) {
        for (int j = j0; j <= j0 + 1; ++j) {
            const int k = node_index(i, j);
            if (k < 0) continue;
            sum += v[k] * std::max(0.0, 1.0 - std::abs(gx - i)) * std::max(0.0, 1.0 - std::abs(gy - j));
        }
    }
    return sum;
}

NonlocalSystem assemble(const DomainMask& mask, double s, const std::string& label) {
    return NonlocalSystem(mask, s, label);
}

double seminorm_estimate(const Eigen::VectorXd& v, const NonlocalSystem& system) {
    if (v.size() != system.size()) throw DimensionError("seminorm_estimate: vector length does not match node count");
    Eigen::VectorXd av;
    system.apply_stiffness(v, av);
    return std::max(0.0, v.dot(av));
}

double fractional_perimeter(const DomainMask& E, double s, int pad_cells) {
    require_order(s);
    if (pad_cells < 1) throw DomainError("fractional_perimeter: padding must be positive");
    if (E.empty()) return 0.0;
    const int lx = E.nx() + 2 * pad_cells;
    const int ly = E.ny() + 2 * pad_cells;
    std::vector<double> outside(static_cast<std::size_t>(lx) * ly, 1.0);
    for (int i = 0; i < E.nx(); ++i)
        for (int j = 0; j < E.ny(); ++j)
            if (E.occupied(i, j)) outside[static_cast<std::size_t>(i + pad_cells) * ly + (j + pad_cells)] = 0.0;
    const OffsetTable& table = cell_pair_table(s);
    const LatticeConvolution conv(lx, ly, [&table](int a, int b) { return (a == 0 && b == 0) ? 0.0 : table(a, b); });
    std::vector<double> reach(outside.size());
    conv.apply(outside.data(), reach.data());

    const double h = E.h();
    const Box padded{{E.origin().x - pad_cells * h, E.origin().y - pad_cells * h},
                     {E.origin().x + (E.nx() + pad_cells) * h, E.origin().y + (E.ny() + pad_cells) * h}};
    const double g = 0.5 / std::sqrt(3.0);
    double pairs = 0.0;
    double exterior = 0.0;
    for (int i = 0; i < E.nx(); ++i) {
        for (int j = 0; j < E.ny(); ++j) {
            if (!E.occupied(i, j)) continue;
            pairs += reach[static_cast<std::size_t>(i + pad_cells) * ly + (j + pad_cells)];
            const Point c = E.cell_center(i, j);
            double cell = 0.0;
            for (double ox : {-g, g})
                for (double oy : {-g, g}) cell += box_exterior({c.x + ox * h, c.y + oy * h}, padded, 2.0 + s);
            exterior += 0.25 * h * h * cell;
        }
    }
    return 2.0 * (std::pow(h, 2.0 - s) * pairs + exterior);
}

void write_matrix_market(std::ostream& out, const NonlocalSystem& system, bool stiffness, double drop_below) {
    const Eigen::Index n = system.size();
    std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = stiffness ? system.stiffness_entry(a, b) : system.mass_entry(a, b);
            if (v == 0.0 || std::abs(v) < drop_below) continue;
            entries.emplace_back(a, b, v);
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << "% " << (stiffness ? "stiffness" : "mass") << " s=" << system.s() << " h=" << system.h();
    if (!system.label().empty()) out << " domain=" << system.label();
    out << "\n" << n << " " << n << " " << entries.size() << "\n";
    out << std::setprecision(17);
    for (const auto& [a, b, v] : entries) out << a + 1 << " " << b + 1 << " " << v << "\n";
}

}  // namespace mhfrac
