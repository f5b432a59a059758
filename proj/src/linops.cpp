#include "jadmm/linops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace jadmm {

LinOp LinOp::dense(Mat A) {
    if (A.rows() == 0 || A.cols() == 0) throw DimensionMismatch("LinOp: empty matrix");
    LinOp op;
    op.rows_ = A.rows();
    op.cols_ = A.cols();
    op.dense_ = std::move(A);
    return op;
}

LinOp LinOp::matrix_free(Index rows, Index cols, ApplyFn apply, ApplyFn adjoint) {
    if (rows <= 0 || cols <= 0) throw DimensionMismatch("LinOp: nonpositive dimensions");
    LinOp op;
    op.rows_ = rows;
    op.cols_ = cols;
    op.apply_ = std::move(apply);
    op.adjoint_ = std::move(adjoint);
    return op;
}

Vec LinOp::apply(const Vec& x) const {
    if (x.size() != cols_) throw DimensionMismatch("LinOp::apply: size mismatch");
    if (dense_) return *dense_ * x;
    return apply_(x);
}

Vec LinOp::apply_adjoint(const Vec& y) const {
    if (y.size() != rows_) throw DimensionMismatch("LinOp::apply_adjoint: size mismatch");
    if (dense_) return dense_->transpose() * y;
    return adjoint_(y);
}

const Mat& LinOp::dense_entries() const {
    if (!dense_) throw Error("LinOp: no dense entries");
    return *dense_;
}

double op_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(0);
}

namespace {

// Power iteration for the largest eigenvalue of a symmetric PSD operator.
// Returns (eigenvalue, eigenvector). `orth` holds directions to deflate.
std::pair<double, Vec> power_iteration(const std::function<Vec(const Vec&)>& apply, Index n,
                                       const std::vector<Vec>& orth, std::mt19937_64& rng,
                                       int max_iter = 5000, double tol = 1e-13) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
    auto deflate = [&](Vec& w) {
        for (const Vec& q : orth) w -= q.dot(w) * q;
    };
    deflate(v);
    double nv = v.norm();
    if (nv == 0.0) return {0.0, Vec::Zero(n)};
    v /= nv;
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = apply(v);
        deflate(w);
        double nw = w.norm();
        if (nw == 0.0) return {0.0, v};
        w /= nw;
        double next = w.dot(apply(w));
        bool settled = std::abs(next - lambda) <= tol * (1.0 + std::abs(next));
        lambda = next;
        v = w;
        if (settled && it > 2) break;
    }
    return {lambda, v};
}

SpectralSummary summary_from_eigenvalues(const Vec& evals, double rank_tol, bool cols_side,
                                         Index cols, Index gram_side) {
    double lmax = std::max(0.0, evals.maxCoeff());
    if (lmax <= 0.0) throw ZeroOperator("spectral_summary: zero operator");
    double thresh = rank_tol * lmax;
    double splus = lmax;
    for (Index i = 0; i < evals.size(); ++i) {
        double ev = std::max(0.0, evals(i));
        if (ev > thresh) splus = std::min(splus, ev);
    }
    double smin;
    if (cols_side) {
        smin = std::max(0.0, evals.minCoeff());
    } else {
        // Nonzero spectrum came from the rows-side Gram; A^T A has
        // cols - rank extra zeros whenever cols exceeds the rows side.
        smin = (cols > gram_side) ? 0.0 : std::max(0.0, evals.minCoeff());
    }
    SpectralSummary s;
    s.op_norm_sq = lmax;
    s.sigma_plus = splus;
    s.sigma_min = std::min(smin, splus);
    s.rank_tol = rank_tol;
    return s;
}

}  // namespace

SpectralSummary spectral_summary(const LinOp& A, double rank_tol, Index dense_cutoff) {
    const Index n = A.cols(), d = A.rows();
    const Index small_side = std::min(n, d);

    if (A.has_dense() && small_side <= dense_cutoff) {
        const Mat& M = A.dense_entries();
        bool cols_side = n <= d;
        Mat gram = cols_side ? Mat(M.transpose() * M) : Mat(M * M.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
        return summary_from_eigenvalues(es.eigenvalues(), rank_tol, cols_side, n,
                                        cols_side ? n : d);
    }

    // Iterative path on the cols-side Gram G = A^T A.
    auto applyG = [&A](const Vec& x) { return A.apply_adjoint(A.apply(x)); };
    std::mt19937_64 rng(0x5eed1234u);
    std::vector<Vec> none;
    auto [lmax, vmax] = power_iteration(applyG, n, none, rng);
    if (lmax <= 0.0) throw ZeroOperator("spectral_summary: zero operator");
    double shift = lmax * (1.0 + 1e-8);
    auto applyShifted = [&](const Vec& x) { return Vec(shift * x - applyG(x)); };
    auto [mu, vmin] = power_iteration(applyShifted, n, none, rng);
    double lmin = std::max(0.0, shift - mu);
    double thresh = rank_tol * lmax;

    SpectralSummary s;
    s.op_norm_sq = lmax;
    s.sigma_min = lmin;
    s.rank_tol = rank_tol;
    if (lmin > thresh) {
        s.sigma_plus = lmin;
        return s;
    }
    // Rank deficient: deflate the (numerical) null space one direction at a
    // time until the dominant shifted eigenvalue corresponds to a positive
    // eigenvalue of G.
    std::vector<Vec> null_basis;
    constexpr int kMaxDeflate = 256;
    for (int round = 0; round <= kMaxDeflate; ++round) {
        auto [muk, vk] = power_iteration(applyShifted, n, null_basis, rng);
        double eig = shift - muk;
        if (eig > thresh) {
            s.sigma_plus = std::max(0.0, eig);
            return s;
        }
        if (round == kMaxDeflate)
            throw Error("spectral_summary: null space too large for the iterative path");
        // re-orthonormalize before storing
        for (const Vec& q : null_basis) vk -= q.dot(vk) * q;
        double nv = vk.norm();
        if (nv == 0.0) throw Error("spectral_summary: deflation breakdown");
        null_basis.push_back(vk / nv);
    }
    throw Error("spectral_summary: unreachable");
}

Vec project_onto_range_adjoint(const LinOp& S, const Vec& u, double rank_tol) {
    if (u.size() != S.cols()) throw DimensionMismatch("project_onto_range_adjoint: size");
    if (S.has_dense()) {
        const Mat& M = S.dense_entries();
        Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinV);
        const Vec& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) <= 0.0) throw ZeroOperator("project_onto_range_adjoint");
        double cut = std::sqrt(rank_tol) * sv(0);
        Vec proj = Vec::Zero(u.size());
        for (Index j = 0; j < sv.size(); ++j) {
            if (sv(j) > cut) {
                Vec vj = svd.matrixV().col(j);
                proj += vj.dot(u) * vj;
            }
        }
        return proj;
    }
    // Matrix-free: P u = S^T w with (S S^T) w = S u solved by CG. The
    // right-hand side lies in range(S S^T), so CG stays consistent.
    Vec rhs = S.apply(u);
    Index d = S.rows();
    auto applyK = [&S](const Vec& x) { return S.apply(S.apply_adjoint(x)); };
    Vec w = Vec::Zero(d), r = rhs, p = r;
    double rr = r.squaredNorm();
    double rhs_norm = std::sqrt(rr);
    if (rhs_norm == 0.0) return Vec::Zero(u.size());
    for (Index it = 0; it < 8 * d + 16; ++it) {
        Vec Kp = applyK(p);
        double pKp = p.dot(Kp);
        if (pKp <= 0.0) break;
        double a = rr / pKp;
        w += a * p;
        r -= a * Kp;
        double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= 1e-14 * rhs_norm) break;
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return S.apply_adjoint(w);
}

bool range_contains(const LinOp& A, const Vec& v, double tol) {
    if (v.size() != A.rows()) return false;
    double ref = std::max(1.0, v.norm());
    if (A.has_dense()) {
        const Mat& M = A.dense_entries();
        Vec x = M.completeOrthogonalDecomposition().solve(v);
        return (M * x - v).norm() <= tol * ref;
    }
    // CG on the normal equations.
    Vec x = Vec::Zero(A.cols());
    Vec r = A.apply_adjoint(v);
    Vec p = r;
    double rr = r.squaredNorm();
    for (Index it = 0; it < 8 * A.cols() + 16 && rr > 0.0; ++it) {
        Vec Gp = A.apply_adjoint(A.apply(p));
        double pGp = p.dot(Gp);
        if (pGp <= 0.0) break;
        double a = rr / pGp;
        x += a * p;
        r -= a * Gp;
        double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= 1e-15 * std::max(1.0, std::sqrt(rr))) break;
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return (A.apply(x) - v).norm() <= tol * ref;
}

double cross_op_norm(const LinOp& A, const LinOp& B) {
    if (A.rows() != B.rows()) throw DimensionMismatch("cross_op_norm: row mismatch");
    if (A.has_dense() && B.has_dense())
        return op_norm(A.dense_entries().transpose() * B.dense_entries());
    // Power iteration on (A^T B)^T (A^T B).
    auto applyG = [&](const Vec& x) { return B.apply_adjoint(A.apply(A.apply_adjoint(B.apply(x)))); };
    std::mt19937_64 rng(0xc105534du);
    std::vector<Vec> none;
    auto [lmax, v] = power_iteration(applyG, B.cols(), none, rng);
    return std::sqrt(std::max(0.0, lmax));
}

}  // namespace jadmm
