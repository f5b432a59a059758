#pragma once

#include <map>
#include <random>
#include <string>

#include "jadmm/state.hpp"

namespace jadmm {

struct Verdict {
    bool holds = true;
    double margin = 0.0;   // slack of the inequality / negated residual of an identity
    bool advisory = false; // computed but not counted (uncertified parameters)
    bool evaluated = false;
};

/// Every analytical quantity of one iteration, plus per-check verdicts.
struct IterationRecord {
    int k = 0;
    std::vector<Vec> x;
    Vec lambda, lambda_prev;
    std::vector<Vec> delta_x;
    Vec delta_lambda;
    Vec lambda_hat;             // lambda^{k-1} - beta (sum A_i x_i^k - b)
    std::vector<Vec> R;         // R_i^k = -sum_{j!=i} beta A_i^* A_j dx_j + dw_i
    std::vector<Vec> delta_w;
    Vec u;                      // grad f_p displacement + R_p displacement
    double eta = 0.0;
    double L_aug = 0.0;
    double L_hat = 0.0;
    double theta_lambda = 0.0;
    double theta_p = 0.0;
    double feas = 0.0;
    double u_norm = 0.0;
    std::vector<double> stat_res;  // ||R_i|| for i < p; ||grad f_p - A_p^* lambda_hat|| last
    std::vector<double> norm_dx;
    double norm_dlambda = 0.0;
    std::vector<double> subproblem_residual;
    std::map<std::string, Verdict> checks;

    double max_residual() const;
};

/// Pseudo-record for k = 0 holding the seeded quantities (eta_0, L_hat_0,
/// the displacement seeds and R_p^0). Anchors the k = 1 checks.
IterationRecord make_seed_record(const RunContext& ctx, const SolverState& s0);

/// Computes every field from the definitions. `skm1` must be the state at
/// k-1 (its own displacement fields are read for the previous-step terms).
IterationRecord record_iteration(const RunContext& ctx, const SolverState& sk,
                                 const SolverState& skm1);

/// Evaluates the inequality/identity battery into rec_k.checks:
/// descent, dual-recursion, theta-bound, potential-descent, potential-floor,
/// affine-increment (full level), feasibility-identity, plus the multiplier
/// and smooth-block inclusion identities. Identity tolerance 1e-10 blend,
/// inequality tolerance 1e-7 blend.
void check_inequalities(const RunContext& ctx, IterationRecord& rec_k,
                        const IterationRecord& rec_km1, std::mt19937_64& rng);

/// Flat, CSV-friendly view of a record.
struct TraceRow {
    int k = 0;
    double L_aug = 0.0, eta = 0.0, L_hat = 0.0, feas = 0.0;
    std::vector<double> stat_res;
    std::vector<double> norm_dx;
    double norm_dlambda = 0.0;
    double theta_lambda = 0.0;
    double u_norm = 0.0;
    bool check_descent = true, check_dualrec = true, check_thetabound = true,
         check_potdescent = true, check_floor = true, check_feasid = true;
};

TraceRow to_row(const IterationRecord& rec);

/// The iteration-k bounds of the convergence theorem with the witnessing
/// index, recomputable from a stored trace.
struct RateCertificate {
    double delta_L0 = 0.0;
    struct PerK {
        int k = 0;
        int witnessed_j = 0;
        double res_bound = 0.0;    // max_i factor_i * sqrt(2 dL0 / (k min delta))
        double feas_bound = 0.0;   // (1/(beta theta)) sqrt(2 dL0 / (k delta_lambda))
        double min_margin = 0.0;   // worst slack over all bounds at witnessed_j
        double sum_margin = 0.0;   // 2 dL0 minus the accumulated weighted displacements
    };
    std::vector<PerK> per_k;
    bool all_hold = true;
};

RateCertificate rate_certificate(const std::vector<TraceRow>& rows, const RateConstants& c);

}  // namespace jadmm
