#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jadmm/linops.hpp"

namespace jadmm {

enum class FnKind { Quadratic, L1, IndicatorBox, IndicatorFiniteSet, SmoothCustom, ProxCustom };

/// Block objective in oracle form.
///
/// Shipped kinds: quadratic (0.5 x'Qx + q'x + c0), weighted l1, box and
/// finite-set indicators, and custom smooth / prox oracles. Custom oracles
/// carry a documented obligation: the value must be proper lower
/// semicontinuous, gradients reentrant, and prox(v, tau) must return a
/// minimizer of tau*f(z) + 0.5||z - v||^2.
class BlockFunction {
  public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;
    using ProxFn = std::function<Vec(const Vec&, double)>;

    static BlockFunction quadratic(Mat Q, Vec q, double c0 = 0.0);
    static BlockFunction l1(double weight, Index dim);
    static BlockFunction indicator_box(Vec lo, Vec hi);
    static BlockFunction indicator_finite_set(std::vector<Vec> points);
    static BlockFunction smooth_custom(Index dim, ValueFn value, GradFn grad, double lip_grad);
    static BlockFunction prox_custom(Index dim, ValueFn value, ProxFn prox);

    FnKind kind() const { return kind_; }
    Index dim() const { return dim_; }

    /// Extended-real value; +infinity outside an indicator's domain.
    double value(const Vec& x) const;

    bool is_smooth() const { return kind_ == FnKind::Quadratic || kind_ == FnKind::SmoothCustom; }
    Vec gradient(const Vec& x) const;
    double lip_grad() const;

    bool has_prox() const;
    /// argmin_z tau * f(z) + 0.5 ||z - v||^2. Finite-set ties resolve to the
    /// lexicographically smaller point.
    Vec prox(const Vec& v, double tau) const;

    /// Nearest point of the effective domain (identity for full-domain kinds).
    Vec project_domain(const Vec& x) const;

    // kind-specific data, exposed for serialization
    const Mat& quad_Q() const { return Q_; }
    const Vec& quad_q() const { return q_; }
    double quad_c0() const { return c0_; }
    double l1_weight() const { return weight_; }
    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }
    const std::vector<Vec>& finite_points() const { return points_; }

  private:
    BlockFunction() = default;
    FnKind kind_ = FnKind::Quadratic;
    Index dim_ = 0;
    Mat Q_;
    Vec q_;
    double c0_ = 0.0;
    double weight_ = 0.0;
    Vec lo_, hi_;
    std::vector<Vec> points_;
    ValueFn value_;
    GradFn grad_;
    ProxFn prox_;
    double lip_ = 0.0;
};

struct Block {
    BlockFunction f;
    LinOp A;
};

/// Linearly constrained block problem: min sum f_i(x_i) s.t. sum A_i x_i = b.
/// Immutable after construction. The last block must be smooth.
class Problem {
  public:
    Problem(std::vector<Block> blocks, Vec b, std::optional<double> lower_bound_hint = {});

    Index num_blocks() const { return static_cast<Index>(blocks_.size()); }
    Index constraint_dim() const { return b_.size(); }
    const Block& block(Index i) const { return blocks_.at(static_cast<size_t>(i)); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Vec& rhs() const { return b_; }
    std::optional<double> lower_bound_hint() const { return lower_bound_hint_; }

  private:
    std::vector<Block> blocks_;
    Vec b_;
    std::optional<double> lower_bound_hint_;
};

double evaluate_objective(const Problem& prob, const std::vector<Vec>& x);

/// sum A_i x_i - b
Vec constraint_violation(const Problem& prob, const std::vector<Vec>& x);
double feasibility_residual(const Problem& prob, const std::vector<Vec>& x);

/// L_beta(x, lambda) = sum f_i - <lambda, Ax - b> + (beta/2)||Ax - b||^2
double augmented_lagrangian(const Problem& prob, const std::vector<Vec>& x, const Vec& lambda,
                            double beta);

enum class LowerBoundEvidence { UserHint, SampledMin, Unknown };

struct ValidationReport {
    std::string a0_note;
    bool a1_range = false;
    double a1_worst_residual = 0.0;
    bool a2_smooth_last = false;
    double a2_lip_empirical = 0.0;
    double a2_lip_declared = 0.0;
    LowerBoundEvidence a3_kind = LowerBoundEvidence::Unknown;
    double a3_value = 0.0;
    std::vector<std::string> warnings;
    bool passed() const { return a1_range && a2_smooth_last; }
};

/// Checks the structural assumptions to the extent machine-checkable:
/// range containment for the last block, an empirical gradient Lipschitz
/// estimate for it, and lower-bound evidence (hint or sampled; a sampled
/// minimum is weak evidence, never a proof).
ValidationReport validate(const Problem& prob, double tol, int sample_budget);

}  // namespace jadmm
