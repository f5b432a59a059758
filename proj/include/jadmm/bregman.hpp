#pragma once

#include <cstdint>
#include <utility>

#include "jadmm/linops.hpp"

namespace jadmm {

enum class GenKind { Euclidean, Diagonal, CancelCoupling };

/// Distance generating function w with certified strong-convexity modulus m
/// and gradient Lipschitz modulus M.
///
/// Shipped kinds are all quadratic:
///   euclidean:       w(z) = (m/2)||z||^2
///   diagonal:        w(z) = (1/2) sum weights_i z_i^2
///   cancel_coupling: w(z) = (tau/2)||z||^2 - (beta/2)||A z||^2,
/// the last one chosen so that adding dw to a block subproblem cancels the
/// quadratic coupling term and leaves a plain prox step.
class BregmanGenerator {
  public:
    static BregmanGenerator euclidean(double m, Index dim);
    static BregmanGenerator diagonal(Vec weights);
    static BregmanGenerator cancel_coupling(double tau, const LinOp* A, double beta);

    GenKind kind() const { return kind_; }
    Index dim() const { return dim_; }
    double modulus_m() const { return m_; }
    double modulus_M() const { return M_; }

    double value(const Vec& z) const;
    Vec grad(const Vec& z) const;
    /// Dense Hessian (constant for the quadratic family).
    Mat hessian() const;

    double cancel_tau() const { return tau_; }
    double cancel_beta() const { return beta_; }
    const LinOp* cancel_op() const { return A_; }
    const Vec& diag_weights() const { return weights_; }

  private:
    BregmanGenerator() = default;
    GenKind kind_ = GenKind::Euclidean;
    Index dim_ = 0;
    double m_ = 0.0, M_ = 0.0;
    Vec weights_;
    double tau_ = 0.0, beta_ = 0.0;
    const LinOp* A_ = nullptr;
    Mat AtA_;  // cached for cancel_coupling with dense A
};

struct BregmanEval {
    double value;
    Vec grad_at_new;  // grad w(z_new) - grad w(z_base)
};

/// dw(z_new; z_base) = w(z_new) - w(z_base) - <grad w(z_base), z_new - z_base>.
BregmanEval bregman_distance(const BregmanGenerator& w, const Vec& z_new, const Vec& z_base);

/// Smallest observed curvature ratio and largest observed gradient-Lipschitz
/// ratio over sampled pairs; brackets the declared (m, M). Every tenth pair
/// differs along a coordinate axis so diagonal extremes are attained.
std::pair<double, double> certify_moduli(const BregmanGenerator& w, int samples,
                                         std::uint64_t rng_seed);

}  // namespace jadmm
