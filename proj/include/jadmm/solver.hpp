#pragma once

#include "jadmm/diagnostics.hpp"
#include "jadmm/subproblem.hpp"

namespace jadmm {

enum class RunStatus { Converged, MaxIter, InfeasibleParams, SubproblemFailure };

struct BestIterate {
    int j = 0;
    std::vector<Vec> x;
    Vec lambda_hat;
    std::vector<double> stat_res;
    double feas = 0.0;
    double max_residual = std::numeric_limits<double>::infinity();
};

struct RunResult {
    RunStatus status = RunStatus::MaxIter;
    double achieved_residual = std::numeric_limits<double>::infinity();
    BestIterate best;
    SolverState final_state;
    std::vector<IterationRecord> trace;
    RateConstants constants;
    std::string message;
    bool any_check_failed = false;  // non-advisory verdicts only
};

/// State at k = 0 with the displacement seeds in place.
SolverState init_state(const RunContext& ctx, std::vector<Vec> x0, Vec lambda0);

/// One Jacobi sweep plus the relaxed dual update. All p block solves read
/// only the k-1 snapshot and are committed together at the barrier; a failed
/// block aborts the iteration with no partial commit.
void step(const RunContext& ctx, SolverState& state);

RunResult run(const Problem& prob, const SolverConfig& cfg, std::vector<Vec> x0, Vec lambda0);

/// Default seeds: x_i^0 = projection of the origin into the block domain,
/// lambda^0 = 0.
RunResult run(const Problem& prob, const SolverConfig& cfg);

std::vector<Vec> default_initial_point(const Problem& prob);

}  // namespace jadmm
