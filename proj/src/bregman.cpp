#include "jadmm/bregman.hpp"

#include <cmath>
#include <random>

namespace jadmm {

BregmanGenerator BregmanGenerator::euclidean(double m, Index dim) {
    if (m <= 0.0) throw Error("euclidean generator: m must be positive");
    BregmanGenerator w;
    w.kind_ = GenKind::Euclidean;
    w.dim_ = dim;
    w.m_ = w.M_ = m;
    return w;
}

BregmanGenerator BregmanGenerator::diagonal(Vec weights) {
    if (weights.size() == 0 || weights.minCoeff() <= 0.0)
        throw Error("diagonal generator: weights must be positive");
    BregmanGenerator w;
    w.kind_ = GenKind::Diagonal;
    w.dim_ = weights.size();
    w.m_ = weights.minCoeff();
    w.M_ = weights.maxCoeff();
    w.weights_ = std::move(weights);
    return w;
}

BregmanGenerator BregmanGenerator::cancel_coupling(double tau, const LinOp* A, double beta) {
    if (A == nullptr) throw Error("cancel_coupling: null operator");
    double a2 = spectral_summary(*A).op_norm_sq;
    if (tau <= beta * a2)
        throw Error("cancel_coupling: tau must exceed beta * ||A||^2");
    BregmanGenerator w;
    w.kind_ = GenKind::CancelCoupling;
    w.dim_ = A->cols();
    w.tau_ = tau;
    w.beta_ = beta;
    w.A_ = A;
    w.m_ = tau - beta * a2;
    w.M_ = tau;
    if (A->has_dense())
        w.AtA_ = A->dense_entries().transpose() * A->dense_entries();
    return w;
}

double BregmanGenerator::value(const Vec& z) const {
    if (z.size() != dim_) throw DimensionMismatch("BregmanGenerator::value: size");
    switch (kind_) {
        case GenKind::Euclidean:
            return 0.5 * m_ * z.squaredNorm();
        case GenKind::Diagonal:
            return 0.5 * z.dot(weights_.cwiseProduct(z));
        case GenKind::CancelCoupling:
            return 0.5 * tau_ * z.squaredNorm() - 0.5 * beta_ * A_->apply(z).squaredNorm();
    }
    return 0.0;
}

Vec BregmanGenerator::grad(const Vec& z) const {
    if (z.size() != dim_) throw DimensionMismatch("BregmanGenerator::grad: size");
    switch (kind_) {
        case GenKind::Euclidean:
            return m_ * z;
        case GenKind::Diagonal:
            return weights_.cwiseProduct(z);
        case GenKind::CancelCoupling:
            if (AtA_.size() > 0) return tau_ * z - beta_ * (AtA_ * z);
            return tau_ * z - beta_ * A_->apply_adjoint(A_->apply(z));
    }
    return Vec::Zero(dim_);
}

Mat BregmanGenerator::hessian() const {
    switch (kind_) {
        case GenKind::Euclidean:
            return m_ * Mat::Identity(dim_, dim_);
        case GenKind::Diagonal:
            return weights_.asDiagonal();
        case GenKind::CancelCoupling: {
            if (AtA_.size() > 0) return tau_ * Mat::Identity(dim_, dim_) - beta_ * AtA_;
            Mat H(dim_, dim_);
            for (Index j = 0; j < dim_; ++j)
                H.col(j) = A_->apply_adjoint(A_->apply(Vec::Unit(dim_, j)));
            return tau_ * Mat::Identity(dim_, dim_) - beta_ * H;
        }
    }
    return Mat();
}

BregmanEval bregman_distance(const BregmanGenerator& w, const Vec& z_new, const Vec& z_base) {
    if (z_new.size() != z_base.size())
        throw DimensionMismatch("bregman_distance: size mismatch");
    BregmanEval e;
    e.value = w.value(z_new) - w.value(z_base) - w.grad(z_base).dot(z_new - z_base);
    e.grad_at_new = w.grad(z_new) - w.grad(z_base);
    return e;
}

std::pair<double, double> certify_moduli(const BregmanGenerator& w, int samples,
                                         std::uint64_t rng_seed) {
    if (samples < 2) throw Error("certify_moduli: need at least two samples");
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<Index> pick_axis(0, w.dim() - 1);
    std::uniform_real_distribution<double> scale_exp(-2.0, 2.0);

    double m_emp = std::numeric_limits<double>::infinity();
    double M_emp = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec z(w.dim()), zp(w.dim());
        double scale = std::pow(10.0, scale_exp(rng));
        for (Index j = 0; j < w.dim(); ++j) z(j) = scale * gauss(rng);
        if (s % 10 == 0) {
            zp = z;
            zp(pick_axis(rng)) += scale * (gauss(rng) + 0.5);
        } else {
            for (Index j = 0; j < w.dim(); ++j) zp(j) = z(j) + scale * gauss(rng);
        }
        double dist2 = (zp - z).squaredNorm();
        if (dist2 == 0.0) continue;
        double curv = 2.0 * bregman_distance(w, zp, z).value / dist2;
        double lip = (w.grad(z) - w.grad(zp)).norm() / std::sqrt(dist2);
        m_emp = std::min(m_emp, curv);
        M_emp = std::max(M_emp, lip);
    }
    return {m_emp, M_emp};
}

}  // namespace jadmm
