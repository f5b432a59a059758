#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "jadmm/errors.hpp"

namespace jadmm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Linear operator A : R^cols -> R^rows with an explicit adjoint.
///
/// File-loaded operators always carry their dense entries; matrix-free
/// operators supply both apply callbacks. Adjoint consistency
/// <A x, y> = <x, A^T y> is the caller's obligation for custom operators
/// and is spot-checked by the test suite.
class LinOp {
  public:
    using ApplyFn = std::function<Vec(const Vec&)>;

    static LinOp dense(Mat A);
    static LinOp matrix_free(Index rows, Index cols, ApplyFn apply, ApplyFn adjoint);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    Vec apply(const Vec& x) const;
    Vec apply_adjoint(const Vec& y) const;

    bool has_dense() const { return dense_.has_value(); }
    const Mat& dense_entries() const;

  private:
    LinOp() = default;
    Index rows_ = 0, cols_ = 0;
    std::optional<Mat> dense_;
    ApplyFn apply_, adjoint_;
};

/// Eigenvalue extremes of A^T A.
struct SpectralSummary {
    double op_norm_sq = 0.0;  // largest eigenvalue, i.e. ||A||^2
    double sigma_plus = 0.0;  // smallest positive eigenvalue
    double sigma_min = 0.0;   // smallest eigenvalue
    double rank_tol = 0.0;
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Eigenvalue extremes of A^T A. Eigenvalues at or below
/// rank_tol * (largest) count as zero when selecting sigma_plus.
///
/// Dense path: symmetric eigendecomposition of the smaller Gram matrix
/// when its side is at most dense_cutoff. Above the cutoff (or for
/// matrix-free operators): power iteration for the extremes and, if the
/// operator is rank deficient, deflated shifted power iteration for the
/// smallest positive eigenvalue.
SpectralSummary spectral_summary(const LinOp& A, double rank_tol = kDefaultRankTol,
                                 Index dense_cutoff = 512);

/// Euclidean projection of u onto range(S^T) (the row space of S).
Vec project_onto_range_adjoint(const LinOp& S, const Vec& u,
                               double rank_tol = kDefaultRankTol);

/// True iff min_x ||A x - v|| <= tol * max(1, ||v||).
bool range_contains(const LinOp& A, const Vec& v, double tol);

/// Spectral norm of a dense matrix.
double op_norm(const Mat& M);

/// ||A^T B|| for two operators sharing the same row space dimension.
double cross_op_norm(const LinOp& A, const LinOp& B);

}  // namespace jadmm
