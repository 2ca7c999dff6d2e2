#pragma once

#include <cstddef>
#include <vector>

#include "icasim/matrix.hpp"

namespace icasim::numkit {

/// Symmetric eigendecomposition result: values descending, eigenvectors as
/// orthonormal columns of `vectors` (column i pairs with values[i]).
struct SymEig {
    std::vector<double> values;
    Matrix vectors;
};

/// Affine whitening transform for one dataset.
/// z = whitener * (x - mean) has identity sample covariance;
/// dewhitener inverts whitener.
struct Whitening {
    Matrix whitener;
    Matrix dewhitener;
    std::vector<double> mean;
};

/// The most significant eigen-matrices of the fourth-order cumulant tensor
/// of a whitened dataset, ordered by |weight| descending. Matrices have unit
/// Frobenius norm; weights are the corresponding tensor eigenvalues.
struct CumulantSet {
    std::vector<Matrix> matrices;
    std::vector<double> weights;
    bool low_sample_warning = false;  ///< set when cols < 10 n^2
};

/// Orthogonal joint diagonalizer of a matrix set.
struct JointDiag {
    Matrix rotation;  ///< orthogonal U; U^T M U jointly near-diagonal
    bool converged = false;
    int sweeps = 0;
    /// Weighted off-diagonal energy before the first sweep and after each
    /// sweep; non-increasing by construction.
    std::vector<double> off_energy;
};

/// Sample covariance over columns, normalized by the number of columns.
/// Requires cols >= 2.
Matrix covariance(const Matrix& x);

/// Eigendecomposition of a symmetric matrix by Jacobi rotations.
/// Input must be symmetric within 1e-10 (absolute, relative to unit scale
/// times Frobenius norm). Large matrices use a fixed round-robin rotation
/// ordering whose inner updates run in parallel; results do not depend on
/// thread count.
SymEig sym_eig(const Matrix& m);

/// Center and whiten: returns (z, transform) with covariance(z) = I.
/// Throws SingularDataError when the covariance has eigenvalues at or below
/// 1e-12 times the largest one.
std::pair<Matrix, Whitening> whiten(const Matrix& x);

/// Estimate the fourth-order cumulant tensor of whitened z and return its
/// `count` most significant eigen-matrices. Precondition: covariance(z) = I
/// within 1e-3; count <= n(n+1)/2.
CumulantSet cum4_eigenmatrices(const Matrix& z, std::size_t count);

/// Jointly diagonalize the weighted set {weight_i * matrix_i} by Jacobi
/// rotation sweeps. Terminates when every rotation sine in a full sweep is
/// below 1e-8 in magnitude, or flags non-convergence after 100 sweeps.
JointDiag joint_diagonalize(const CumulantSet& set);

// Internal kernels shared with the ICA module. Deterministic for any thread
// count: reductions are split into fixed-size blocks combined in index order.

/// Per-row means of x.
std::vector<double> row_means(const Matrix& x);

/// u[t] = sum_i w[i] * z(i, t).
void project_rows(const Matrix& z, const std::vector<double>& w, std::vector<double>& u);

/// Mean of v.
double mean(const std::vector<double>& v);

/// out[i] = (1/cols) sum_t z(i, t) * v[t].
void row_weighted_means(const Matrix& z, const std::vector<double>& v, std::vector<double>& out);

/// Sampled moments E[a^4], E[a^3 b], E[a^2 b^2], E[a b^3], E[b^4] of two rows.
struct PairMoments {
    double m40, m31, m22, m13, m04;
};
PairMoments pair_moments4(const double* a, const double* b, std::size_t n);

namespace ref {

/// Straight-loop serial versions of the parallel kernels above, kept as the
/// reference implementations for tests and the benchmark target.
Matrix covariance(const Matrix& x);
SymEig sym_eig(const Matrix& m);
PairMoments pair_moments4(const double* a, const double* b, std::size_t n);
double mean(const std::vector<double>& v);

/// Gram part of the quadricovariance (see cum4_eigenmatrices) computed the
/// naive way; exposed so tests can cross-check the parallel path.
Matrix quadricov_gram(const Matrix& z);

}  // namespace ref

/// Parallel counterpart of ref::quadricov_gram.
Matrix quadricov_gram(const Matrix& z);

}  // namespace icasim::numkit
