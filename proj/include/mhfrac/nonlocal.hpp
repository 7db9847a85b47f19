#pragma once

#include "mhfrac/geometry.hpp"
#include "mhfrac/lattice_convolution.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace mhfrac {

class OffsetTable;

enum class KernelKind {
    eigen,      // |x - y|^{-2-2s}
    perimeter,  // |x - y|^{-2-s}
};

struct KernelSpec {
    double s = 0.75;
    KernelKind kind = KernelKind::eigen;
    int near_radius = 4;
    double tolerance = 1e-8;

    double exponent() const;
    /// Throws DomainError for s outside (0, 1) or a near radius below 2.
    void validate() const;
};

struct StencilEntry {
    int di = 0;
    int dj = 0;
    double weight = 0.0;
};

/// Interaction weights for every offset with |d|_inf <= near_radius. For the eigen kernel
/// these are the full-plane energies of two bilinear hats of spacing h; for the perimeter
/// kernel the double integrals over two cells of side h (offset 0 omitted).
std::vector<StencilEntry> nearfield_stencil(const KernelSpec& spec, double h);

/// rho(x) = int_{R^2 \ Omega} |x - y|^{-p} dy for x strictly inside the occupied region.
/// Throws DomainError otherwise.
double tail_density(const DomainMask& mask, const KernelSpec& spec, Point x);

struct GridIndex {
    int i = 0;
    int j = 0;
    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Grid nodes carrying an admissible hat: the four adjacent cells are occupied and no
/// obstacle meets the open support.
std::vector<GridIndex> admissible_nodes(const DomainMask& mask);

/// Discrete form of the full-plane Gagliardo seminorm on the span of the admissible
/// hats. The stiffness matrix is applied matrix-free through the lattice convolution.
class NonlocalSystem {
public:
    NonlocalSystem(const DomainMask& mask, double s, std::string label = {});

    Eigen::Index size() const { return static_cast<Eigen::Index>(nodes_.size()); }
    double s() const { return s_; }
    double h() const { return h_; }
    const std::string& label() const { return label_; }
    Point origin() const { return origin_; }

    const std::vector<GridIndex>& nodes() const { return nodes_; }
    /// Index of node (i, j) or -1.
    int node_index(int i, int j) const;
    Point node_position(Eigen::Index k) const;

    double stiffness_entry(Eigen::Index a, Eigen::Index b) const;
    double mass_entry(Eigen::Index a, Eigen::Index b) const;

    void apply_stiffness(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    void apply_mass(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    /// Approximate inverse of A + shift B from the periodic embedding.
    void apply_preconditioner(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

    Eigen::MatrixXd dense_stiffness() const;
    Eigen::MatrixXd dense_mass() const;
    Eigen::SparseMatrix<double> mass_matrix() const;

    /// Gershgorin bound on the spectral norm of A.
    double stiffness_norm_bound() const;

    /// u(x) = sum_k v_k phi_k(x).
    double interpolate(const Eigen::VectorXd& v, Point x) const;

    /// Set the shift used by apply_preconditioner (default 0).
    void set_preconditioner_shift(double shift);

private:
    void require_size(const Eigen::VectorXd& v) const;

    double s_;
    double h_;
    Point origin_;
    std::string label_;
    std::vector<GridIndex> nodes_;
    int imin_ = 0;
    int jmin_ = 0;
    int lx_ = 0;
    int ly_ = 0;
    std::vector<int> index_;  // lx * ly block, -1 where no node
    double scale_;            // h^{2-2s}
    const OffsetTable* table_;
    std::shared_ptr<const LatticeConvolution> conv_;
    std::vector<double> inverse_symbol_;
};

/// Assemble the system on the admissible nodes of the mask. Throws EmptyDomainError when
/// no node is admissible.
NonlocalSystem assemble(const DomainMask& mask, double s, const std::string& label = {});

/// v^T A v. Throws DimensionError on size mismatch.
double seminorm_estimate(const Eigen::VectorXd& v, const NonlocalSystem& system);

/// P_s(E) = 2 int_E int_{R^2 \ E} |x - y|^{-2-s} for the occupied region E (0 for an
/// empty mask): exact cell-pair interactions inside a padded box plus an angular
/// exterior term.
double fractional_perimeter(const DomainMask& E, double s, int pad_cells = 16);

/// Lower triangle of A (stiffness) or B (mass) as a MatrixMarket "coordinate real
/// symmetric" file with 1-based indices; entries below drop_below in magnitude are
/// omitted.
void write_matrix_market(std::ostream& out, const NonlocalSystem& system, bool stiffness,
                         double drop_below = 0.0);

}  // namespace mhfrac
