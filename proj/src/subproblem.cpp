#include "jadmm/subproblem.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace jadmm {

double SubproblemInstance::objective(const Vec& x) const {
    double fx = f->value(x);
    if (std::isinf(fx)) return fx;
    return fx + g_lin.dot(x) + 0.5 * beta * A->apply(x).squaredNorm() +
           bregman_distance(*generator, x, base_point).value;
}

std::vector<SubproblemInstance> assemble_instances(const RunContext& ctx,
                                                   const std::vector<Vec>& x_prev,
                                                   const Vec& lambda_prev, int k) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    if (static_cast<Index>(x_prev.size()) != p)
        throw DimensionMismatch("assemble_instances: block count");

    Vec total = -prob.rhs();
    for (Index j = 0; j < p; ++j) total += prob.block(j).A.apply(x_prev[static_cast<size_t>(j)]);

    std::vector<SubproblemInstance> out;
    out.reserve(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        const Block& blk = prob.block(i);
        Vec c_i = total - blk.A.apply(x_prev[static_cast<size_t>(i)]);
        SubproblemInstance inst;
        inst.block_index = i;
        inst.g_lin = blk.A.apply_adjoint(ctx.cfg.beta * c_i - lambda_prev);
        inst.A = &blk.A;
        inst.beta = ctx.cfg.beta;
        inst.base_point = x_prev[static_cast<size_t>(i)];
        inst.generator = ctx.generator(i, k);
        inst.f = &blk.f;
        out.push_back(std::move(inst));
    }
    return out;
}

SubproblemSolution solve_block_quadratic(const SubproblemInstance& inst) {
    const BlockFunction& f = *inst.f;
    if (f.kind() != FnKind::Quadratic)
        throw NoClosedForm("solve_block_quadratic: block objective not quadratic");
    const Index n = f.dim();
    Mat AtA(n, n);
    if (inst.A->has_dense()) {
        const Mat& M = inst.A->dense_entries();
        AtA = M.transpose() * M;
    } else {
        for (Index j = 0; j < n; ++j)
            AtA.col(j) = inst.A->apply_adjoint(inst.A->apply(Vec::Unit(n, j)));
    }
    Mat H = f.quad_Q() + inst.beta * AtA + inst.generator->hessian();
    Vec rhs = inst.generator->grad(inst.base_point) - f.quad_q() - inst.g_lin;
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success)
        throw SingularSystem(
            "block subproblem Hessian not positive definite; increase the proximal modulus");
    SubproblemSolution sol;
    sol.x_new = llt.solve(rhs);
    sol.optimality_residual = (H * sol.x_new - rhs).norm();
    sol.solver_used = "quadratic_direct";
    return sol;
}

SubproblemSolution solve_block_prox_reduction(const SubproblemInstance& inst) {
    const BregmanGenerator& w = *inst.generator;
    if (w.kind() != GenKind::CancelCoupling)
        throw NoClosedForm("prox reduction needs the coupling-canceling generator");
    if (w.cancel_op() != inst.A || w.cancel_beta() != inst.beta)
        throw NoClosedForm("prox reduction: generator coupling does not match the block");
    if (!inst.f->has_prox())
        throw NoClosedForm("prox reduction: block function has no prox oracle");
    const double tau = w.cancel_tau();
    // Coupling cancels; what remains is <g', x> + (tau/2)||x - base||^2 + f(x).
    Vec g_prime = inst.g_lin + inst.beta * inst.A->apply_adjoint(inst.A->apply(inst.base_point));
    Vec v = inst.base_point - g_prime / tau;
    SubproblemSolution sol;
    sol.x_new = inst.f->prox(v, 1.0 / tau);
    sol.optimality_residual = 0.0;
    sol.solver_used = "prox_cancel";
    return sol;
}

SubproblemSolution solve_block_inner(const SubproblemInstance& inst, const SolverConfig& cfg) {
    const BlockFunction& f = *inst.f;
    if (!f.is_smooth()) throw NoClosedForm("inner solver requires a smooth block");
    const double a2 = spectral_summary(*inst.A).op_norm_sq;
    const double L = f.lip_grad() + inst.beta * a2 + inst.generator->modulus_M();
    auto grad_total = [&](const Vec& x) {
        return Vec(f.gradient(x) + inst.g_lin + inst.apply_quad(x) +
                   inst.generator->grad(x) - inst.generator->grad(inst.base_point));
    };
    Vec x = inst.base_point;
    Vec g = grad_total(x);
    Vec x_old = x, g_old = g;
    double gn = g.norm();
    for (int it = 0; it < cfg.inner_max_iter && gn > cfg.inner_tol; ++it) {
        double step = 1.0 / L;
        if (it > 0) {
            // Barzilai-Borwein step, safeguarded by the 1/L fallback.
            Vec sx = x - x_old, sg = g - g_old;
            double sg2 = sg.squaredNorm();
            if (sg2 > 0.0) {
                double bb = sx.dot(sg) / sg2;
                if (bb > 0.0 && std::isfinite(bb)) step = std::min(bb, 1e4 / L);
            }
        }
        x_old = x;
        g_old = g;
        x -= step * g;
        g = grad_total(x);
        double gn_new = g.norm();
        if (!std::isfinite(gn_new) || gn_new > 1e8 * (1.0 + gn)) {
            // safeguard: retreat to the plain gradient step
            x = x_old - (1.0 / L) * g_old;
            g = grad_total(x);
            gn_new = g.norm();
        }
        gn = gn_new;
    }
    if (gn > std::max(cfg.inner_tol, cfg.exactness_tol))
        throw InnerSolverFailure("inner solver stalled at gradient norm " + std::to_string(gn));
    SubproblemSolution sol;
    sol.x_new = x;
    sol.optimality_residual = gn;
    sol.solver_used = "inner_gd";
    return sol;
}

SubproblemSolution solve_block(const SubproblemInstance& inst, const SolverConfig& cfg) {
    if (inst.f->kind() == FnKind::Quadratic) return solve_block_quadratic(inst);
    if (inst.generator->kind() == GenKind::CancelCoupling && inst.f->has_prox())
        return solve_block_prox_reduction(inst);
    if (inst.f->is_smooth()) return solve_block_inner(inst, cfg);
    throw NoClosedForm(
        "no exact solve path: nonsmooth blocks need the coupling-canceling generator");
}

}  // namespace jadmm
