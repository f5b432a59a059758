#pragma once

#include "jadmm/state.hpp"

namespace jadmm {

/// One block subproblem, frozen at the previous iterate (Jacobi contract:
/// every neighbor term is read from iteration k-1, never k). Minimizes
///   f(x) + <g_lin, x> + (beta/2)||A x||^2 + dw(x; base_point)
/// which equals the augmented Lagrangian restricted to the block plus the
/// proximal term, up to a constant.
struct SubproblemInstance {
    Index block_index = 0;
    Vec g_lin;  // -A_i^* lambda + beta A_i^* (sum_{j != i} A_j x_j^{k-1} - b)
    const LinOp* A = nullptr;
    double beta = 0.0;
    Vec base_point;
    const BregmanGenerator* generator = nullptr;
    const BlockFunction* f = nullptr;

    Vec apply_quad(const Vec& x) const { return beta * A->apply_adjoint(A->apply(x)); }
    double objective(const Vec& x) const;
};

struct SubproblemSolution {
    Vec x_new;
    double optimality_residual = 0.0;
    const char* solver_used = "";
};

std::vector<SubproblemInstance> assemble_instances(const RunContext& ctx,
                                                   const std::vector<Vec>& x_prev,
                                                   const Vec& lambda_prev, int k);

/// Exact block solve. Paths: (a) quadratic objective against any quadratic
/// generator -> one SPD linear system; (b) prox-capable f against the
/// coupling-canceling generator -> a single prox evaluation; (c) smooth
/// custom f -> safeguarded gradient descent to the inner tolerance.
SubproblemSolution solve_block(const SubproblemInstance& inst, const SolverConfig& cfg);

SubproblemSolution solve_block_quadratic(const SubproblemInstance& inst);
SubproblemSolution solve_block_prox_reduction(const SubproblemInstance& inst);
SubproblemSolution solve_block_inner(const SubproblemInstance& inst, const SolverConfig& cfg);

}  // namespace jadmm
