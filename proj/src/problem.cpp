#include "jadmm/problem.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>

namespace jadmm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(const Vec& a, const Vec& b) {
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}
}  // namespace

BlockFunction BlockFunction::quadratic(Mat Q, Vec q, double c0) {
    if (Q.rows() != Q.cols() || Q.rows() != q.size())
        throw DimensionMismatch("quadratic: Q/q size mismatch");
    double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + Q.cwiseAbs().maxCoeff()))
        throw Error("quadratic: Q must be symmetric");
    BlockFunction f;
    f.kind_ = FnKind::Quadratic;
    f.dim_ = q.size();
    f.Q_ = 0.5 * (Q + Q.transpose());
    f.q_ = std::move(q);
    f.c0_ = c0;
    f.lip_ = op_norm(f.Q_);
    return f;
}

BlockFunction BlockFunction::l1(double weight, Index dim) {
    if (weight <= 0.0) throw Error("l1: weight must be positive");
    BlockFunction f;
    f.kind_ = FnKind::L1;
    f.dim_ = dim;
    f.weight_ = weight;
    return f;
}

BlockFunction BlockFunction::indicator_box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw DimensionMismatch("indicator_box: lo/hi size");
    if ((hi - lo).minCoeff() < 0.0) throw Error("indicator_box: lo > hi");
    BlockFunction f;
    f.kind_ = FnKind::IndicatorBox;
    f.dim_ = lo.size();
    f.lo_ = std::move(lo);
    f.hi_ = std::move(hi);
    return f;
}

BlockFunction BlockFunction::indicator_finite_set(std::vector<Vec> points) {
    if (points.empty()) throw Error("indicator_finite_set: empty set");
    Index d = points.front().size();
    for (const Vec& p : points)
        if (p.size() != d) throw DimensionMismatch("indicator_finite_set: ragged points");
    BlockFunction f;
    f.kind_ = FnKind::IndicatorFiniteSet;
    f.dim_ = d;
    f.points_ = std::move(points);
    return f;
}

BlockFunction BlockFunction::smooth_custom(Index dim, ValueFn value, GradFn grad,
                                           double lip_grad) {
    if (lip_grad <= 0.0) throw Error("smooth_custom: lip_grad must be positive");
    BlockFunction f;
    f.kind_ = FnKind::SmoothCustom;
    f.dim_ = dim;
    f.value_ = std::move(value);
    f.grad_ = std::move(grad);
    f.lip_ = lip_grad;
    return f;
}

BlockFunction BlockFunction::prox_custom(Index dim, ValueFn value, ProxFn prox) {
    BlockFunction f;
    f.kind_ = FnKind::ProxCustom;
    f.dim_ = dim;
    f.value_ = std::move(value);
    f.prox_ = std::move(prox);
    return f;
}

double BlockFunction::value(const Vec& x) const {
    if (x.size() != dim_) throw DimensionMismatch("BlockFunction::value: size");
    switch (kind_) {
        case FnKind::Quadratic:
            return 0.5 * x.dot(Q_ * x) + q_.dot(x) + c0_;
        case FnKind::L1:
            return weight_ * x.lpNorm<1>();
        case FnKind::IndicatorBox: {
            double slack = 1e-12 * (1.0 + x.cwiseAbs().maxCoeff());
            for (Index i = 0; i < dim_; ++i)
                if (x(i) < lo_(i) - slack || x(i) > hi_(i) + slack) return kInf;
            return 0.0;
        }
        case FnKind::IndicatorFiniteSet: {
            double slack = 1e-12 * (1.0 + x.cwiseAbs().maxCoeff());
            for (const Vec& p : points_)
                if ((x - p).cwiseAbs().maxCoeff() <= slack) return 0.0;
            return kInf;
        }
        case FnKind::SmoothCustom:
        case FnKind::ProxCustom:
            return value_(x);
    }
    return kInf;
}

Vec BlockFunction::gradient(const Vec& x) const {
    switch (kind_) {
        case FnKind::Quadratic:
            return Q_ * x + q_;
        case FnKind::SmoothCustom:
            return grad_(x);
        default:
            throw Error("BlockFunction::gradient: kind has no gradient oracle");
    }
}

double BlockFunction::lip_grad() const {
    if (!is_smooth()) throw Error("BlockFunction::lip_grad: not smooth");
    return lip_;
}

bool BlockFunction::has_prox() const {
    switch (kind_) {
        case FnKind::L1:
        case FnKind::IndicatorBox:
        case FnKind::IndicatorFiniteSet:
        case FnKind::ProxCustom:
        case FnKind::Quadratic:
            return true;
        case FnKind::SmoothCustom:
            return false;
    }
    return false;
}

Vec BlockFunction::prox(const Vec& v, double tau) const {
    if (v.size() != dim_) throw DimensionMismatch("BlockFunction::prox: size");
    if (tau <= 0.0) throw Error("BlockFunction::prox: tau must be positive");
    switch (kind_) {
        case FnKind::L1: {
            double s = tau * weight_;
            Vec z(dim_);
            for (Index i = 0; i < dim_; ++i)
                z(i) = std::copysign(std::max(std::abs(v(i)) - s, 0.0), v(i));
            return z;
        }
        case FnKind::IndicatorBox:
            return v.cwiseMax(lo_).cwiseMin(hi_);
        case FnKind::IndicatorFiniteSet: {
            const Vec* best = &points_.front();
            double best_d = (v - *best).squaredNorm();
            for (const Vec& p : points_) {
                double d = (v - p).squaredNorm();
                if (d < best_d || (d == best_d && lex_less(p, *best))) {
                    best = &p;
                    best_d = d;
                }
            }
            return *best;
        }
        case FnKind::Quadratic: {
            // (I + tau Q) z = v - tau q; requires the system to be PD.
            Mat H = Mat::Identity(dim_, dim_) + tau * Q_;
            Eigen::LLT<Mat> llt(H);
            if (llt.info() != Eigen::Success)
                throw SingularSystem("quadratic prox: I + tau*Q not positive definite");
            return llt.solve(v - tau * q_);
        }
        case FnKind::ProxCustom:
            return prox_(v, tau);
        case FnKind::SmoothCustom:
            throw NoClosedForm("BlockFunction::prox: smooth_custom has no prox oracle");
    }
    throw NoClosedForm("BlockFunction::prox: unsupported kind");
}

Vec BlockFunction::project_domain(const Vec& x) const {
    switch (kind_) {
        case FnKind::IndicatorBox:
        case FnKind::IndicatorFiniteSet:
            return prox(x, 1.0);
        default:
            return x;
    }
}

Problem::Problem(std::vector<Block> blocks, Vec b, std::optional<double> lower_bound_hint)
    : blocks_(std::move(blocks)), b_(std::move(b)), lower_bound_hint_(lower_bound_hint) {
    if (blocks_.size() < 2) throw Error("Problem: need at least two blocks");
    for (const Block& blk : blocks_) {
        if (blk.A.rows() != b_.size())
            throw DimensionMismatch("Problem: A_i row dimension != dim(b)");
        if (blk.A.cols() != blk.f.dim())
            throw DimensionMismatch("Problem: A_i column dimension != block dimension");
    }
    if (!blocks_.back().f.is_smooth())
        throw Error("Problem: last block must be smooth (quadratic or smooth_custom)");
}

double evaluate_objective(const Problem& prob, const std::vector<Vec>& x) {
    if (static_cast<Index>(x.size()) != prob.num_blocks())
        throw DimensionMismatch("evaluate_objective: block count");
    double total = 0.0;
    for (Index i = 0; i < prob.num_blocks(); ++i) {
        double v = prob.block(i).f.value(x[static_cast<size_t>(i)]);
        if (std::isinf(v)) return kInf;
        total += v;
    }
    return total;
}

Vec constraint_violation(const Problem& prob, const std::vector<Vec>& x) {
    if (static_cast<Index>(x.size()) != prob.num_blocks())
        throw DimensionMismatch("constraint_violation: block count");
    Vec r = -prob.rhs();
    for (Index i = 0; i < prob.num_blocks(); ++i)
        r += prob.block(i).A.apply(x[static_cast<size_t>(i)]);
    return r;
}

double feasibility_residual(const Problem& prob, const std::vector<Vec>& x) {
    return constraint_violation(prob, x).norm();
}

double augmented_lagrangian(const Problem& prob, const std::vector<Vec>& x, const Vec& lambda,
                            double beta) {
    double obj = evaluate_objective(prob, x);
    if (std::isinf(obj)) return obj;
    Vec r = constraint_violation(prob, x);
    return obj - lambda.dot(r) + 0.5 * beta * r.squaredNorm();
}

ValidationReport validate(const Problem& prob, double tol, int sample_budget) {
    ValidationReport rep;
    const Index p = prob.num_blocks();
    const LinOp& Ap = prob.block(p - 1).A;

    rep.a0_note = "lower semicontinuity declared by kind; custom oracles carry the obligation";

    // (A1): Im(A_p) contains b and the columns of every other A_i.
    bool ap_nonzero = true;
    try {
        spectral_summary(Ap);
    } catch (const ZeroOperator&) {
        ap_nonzero = false;
        rep.warnings.push_back("last-block operator is zero; range condition fails");
    }
    if (ap_nonzero) {
        bool ok = range_contains(Ap, prob.rhs(), tol);
        double worst = 0.0;
        auto residual_of = [&](const Vec& v) {
            if (!Ap.has_dense()) return ok ? 0.0 : 1.0;
            const Mat& M = Ap.dense_entries();
            Vec sol = M.completeOrthogonalDecomposition().solve(v);
            return (M * sol - v).norm();
        };
        worst = residual_of(prob.rhs());
        for (Index i = 0; i + 1 < p && ok; ++i) {
            const LinOp& Ai = prob.block(i).A;
            for (Index c = 0; c < Ai.cols(); ++c) {
                Vec col = Ai.apply(Vec::Unit(Ai.cols(), c));
                if (!range_contains(Ap, col, tol)) {
                    ok = false;
                    rep.warnings.push_back("column of block " + std::to_string(i + 1) +
                                           " operator outside Im(A_p)");
                }
                worst = std::max(worst, residual_of(col));
            }
        }
        rep.a1_range = ok;
        rep.a1_worst_residual = worst;
    }

    // (A2): empirical Lipschitz constant of the last-block gradient.
    const BlockFunction& fp = prob.block(p - 1).f;
    rep.a2_smooth_last = fp.is_smooth();
    if (rep.a2_smooth_last) {
        rep.a2_lip_declared = fp.lip_grad();
        std::mt19937_64 rng(0xa2a2a2a2u);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst_ratio = 0.0;
        for (int s = 0; s < std::max(1, sample_budget); ++s) {
            Vec a(fp.dim()), bvec(fp.dim());
            for (Index j = 0; j < fp.dim(); ++j) {
                a(j) = gauss(rng);
                bvec(j) = gauss(rng);
            }
            double dist = (a - bvec).norm();
            if (dist == 0.0) continue;
            worst_ratio = std::max(worst_ratio,
                                   (fp.gradient(a) - fp.gradient(bvec)).norm() / dist);
        }
        rep.a2_lip_empirical = worst_ratio;
        if (worst_ratio > rep.a2_lip_declared * (1.0 + 1e-6))
            rep.warnings.push_back("empirical gradient Lipschitz ratio exceeds declared bound");
    } else {
        rep.warnings.push_back("last block is not smooth");
    }

    // (A3): lower-bound evidence.
    if (prob.lower_bound_hint()) {
        rep.a3_kind = LowerBoundEvidence::UserHint;
        rep.a3_value = *prob.lower_bound_hint();
    } else {
        std::mt19937_64 rng(0xa3a3a3a3u);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double best = kInf;
        for (int s = 0; s < std::max(1, sample_budget); ++s) {
            std::vector<Vec> pt;
            pt.reserve(static_cast<size_t>(p));
            for (Index i = 0; i < p; ++i) {
                Vec z(prob.block(i).f.dim());
                for (Index j = 0; j < z.size(); ++j) z(j) = gauss(rng) * (1.0 + s % 5);
                pt.push_back(prob.block(i).f.project_domain(z));
            }
            best = std::min(best, evaluate_objective(prob, pt));
        }
        if (std::isfinite(best)) {
            rep.a3_kind = LowerBoundEvidence::SampledMin;
            rep.a3_value = best;
        }
    }
    return rep;
}

}  // namespace jadmm
