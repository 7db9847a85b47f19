#pragma once

#include "mhfrac/geometry.hpp"
#include "mhfrac/nonlocal.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace mhfrac {

struct SolverOptions {
    /// Stop when ||A x - lambda B x|| <= tolerance * lambda * ||B x||.
    double tolerance = 1e-8;
    int max_iterations = 2000;
    /// Block size; extra vectors speed up convergence for clustered spectra.
    int block = 3;
    unsigned seed = 1;
};

struct EigenEstimate {
    double lambda = 0.0;
    /// Unit B-norm, nonnegative mean.
    Eigen::VectorXd vector;
    /// ||A v - lambda B v|| / ||B v||.
    double residual = 0.0;
    double h = 0.0;
    /// Order of the operator; 1 for the local Laplacian.
    double s = 1.0;
    int iterations = 0;
    /// Node positions matching vector (empty for a raw pencil).
    std::vector<Point> positions;
    std::string label;
};

/// Applies an operator to each column of a block.
using BlockOperator = std::function<void(const Eigen::MatrixXd&, Eigen::MatrixXd&)>;

/// Smallest eigenpair of the pencil (A, B) with A symmetric positive semidefinite and B
/// symmetric positive definite, by locally optimal block preconditioned conjugate
/// gradients. `precondition` should approximate (A + sigma B)^{-1} for some sigma > 0.
/// `guess` seeds the first column when nonempty. Throws ConvergenceError.
EigenEstimate lobpcg(Eigen::Index n, const BlockOperator& apply_a, const BlockOperator& apply_b,
                     const BlockOperator& precondition, const SolverOptions& options = {},
                     const Eigen::VectorXd& guess = {});

/// Smallest eigenpair of a dense pencil, preconditioned by a factorization of A + eps B.
/// Throws DimensionError or ConvergenceError.
EigenEstimate smallest_eigenpair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const SolverOptions& options = {});

/// Smallest eigenpair of an assembled nonlocal system, preconditioned through the
/// periodic embedding of its stiffness.
EigenEstimate smallest_eigenpair(const NonlocalSystem& system, const SolverOptions& options = {});

/// Fractional eigenvalue estimate on the admissible nodes of the mask.
EigenEstimate lambda1_s(const DomainMask& mask, double s, const SolverOptions& options = {});

/// Dirichlet eigenvalue of the 5-point Laplacian. Unknowns are grid nodes whose four
/// cells are occupied and which lie on no obstacle; neighbours across an obstacle count
/// as boundary values. Throws EmptyDomainError.
EigenEstimate lambda1_local(const DomainMask& mask, const SolverOptions& options = {});

/// Scale to unit B-norm and flip so that the mean is nonnegative.
void normalize_sign(Eigen::VectorXd& v, const Eigen::VectorXd& bv);

/// Write "x y value" lines for every node of the estimate.
void write_mode(std::ostream& out, const EigenEstimate& estimate);

}  // namespace mhfrac
