#pragma once

#include <functional>
#include <vector>

#include "jadmm/bregman.hpp"
#include "jadmm/params.hpp"
#include "jadmm/problem.hpp"

namespace jadmm {

/// Full iterate state. Displacement fields at k = 0 follow the seeding
/// conventions: delta_lambda = 0, delta_x_i = 0 for i < p, and
/// delta_x_p = R_p^0 / M_p with R_p^0 = A_p^* lambda^0 - grad f_p(x_p^0).
struct SolverState {
    int k = 0;
    std::vector<Vec> x;
    std::vector<Vec> x_prev;
    std::vector<Vec> delta_x;
    Vec lambda, lambda_prev, delta_lambda;
    std::vector<double> subproblem_residual;
};

/// Everything a run needs besides the state: the problem, the resolved
/// configuration (moduli filled in), per-block generators and spectra, and
/// the analysis constants.
struct RunContext {
    const Problem* prob = nullptr;
    SolverConfig cfg;
    std::vector<BregmanGenerator> generators;
    std::vector<SpectralSummary> spectra;
    RateConstants constants;

    /// Per-iteration generator choice; defaults to the fixed per-block set.
    /// Any override must stay inside the same (m_i, M_i) class.
    std::function<const BregmanGenerator*(Index block, int k)> generator_hook;

    const BregmanGenerator* generator(Index block, int k) const {
        if (generator_hook) return generator_hook(block, k);
        return &generators[static_cast<size_t>(block)];
    }
};

/// Resolves moduli, builds generators (coupling-canceling for prox-only
/// blocks, Euclidean otherwise) and evaluates all rate constants.
RunContext make_context(const Problem& prob, SolverConfig cfg);

}  // namespace jadmm
