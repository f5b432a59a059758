#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "jadmm/problem.hpp"

namespace jadmm {

enum class CheckLevel { Off, Cheap, Full };
enum class RunMode { Certified, Practical };

/// Global generator selection. Auto pairs prox-only blocks with the
/// coupling-canceling generator and smooth blocks with the Euclidean one.
enum class GeneratorChoice { Auto, Euclidean, CancelCoupling };

struct SolverConfig {
    double beta = 10.0;
    double theta = 1.0;   // dual relaxation, in (0, 2)
    double alpha = 1.0;
    /// Per-block (m_i, M_i); empty selects defaults (m_i = beta * p * ||A_i||^2).
    std::vector<std::pair<double, double>> moduli;
    int max_iter = 5000;
    double rho_tol = 1e-6;
    CheckLevel check_level = CheckLevel::Cheap;
    RunMode mode = RunMode::Practical;
    GeneratorChoice bregman = GeneratorChoice::Auto;
    std::uint64_t rng_seed = 0;
    bool parallel = false;

    double exactness_tol = 1e-9;  // accepted optimality residual of a block solve
    double inner_tol = 1e-10;     // gradient norm target of the inner solver
    int inner_max_iter = 200;

    void validate_basic() const;  // throws ThetaOutOfRange etc.
};

/// Every constant of the convergence analysis, evaluated for one
/// (problem, config) pair.
struct RateConstants {
    int p = 0;
    double beta = 0.0, theta = 0.0, alpha = 0.0;
    double gamma_theta = 0.0;
    double c1 = 0.0;
    std::vector<double> delta;   // delta_1 .. delta_p
    double delta_lambda = 0.0;   // valid only when min delta > 0
    double sigma_plus_p = 0.0;
    double norm_Ap_sq = 0.0;     // ||A_p||^2
    double norm_Ap_adj_sq = 0.0; // ||A_p^*||^2 (numerically equal)
    double max_Al_sq = 0.0;      // max over the first p-1 blocks of ||A_l||^2
    double lip_p = 0.0;
    std::vector<double> m, M;
    /// sum_{l != i} beta ||A_i^* A_l|| + M_i, the residual bound factor.
    std::vector<double> res_bound_factor;
    double eta0 = 0.0;
    double delta_L0 = 0.0;
    double v_lb = 0.0;
    bool v_lb_is_hint = false;
    bool certified = false;      // all delta_i > 0
    double min_delta() const;
};

/// theta / (1 - |theta - 1|)^2 for theta in (0, 2).
double gamma_theta(double theta);

/// 2|theta-1| / (beta * theta * (1 - |theta-1|) * sigma_plus); zero at theta = 1.
double c1_constant(double theta, double beta, double sigma_plus_p);

/// The p feasibility gaps delta_1..delta_p of the stepsize conditions.
/// Negative entries are reported, not thrown.
std::vector<double> deltas(const SolverConfig& cfg, const Problem& prob,
                           const std::vector<SpectralSummary>& spectra);

/// Dual displacement weight; requires min delta_i > 0.
double delta_lambda_constant(const SolverConfig& cfg, const Problem& prob,
                             const std::vector<SpectralSummary>& spectra,
                             const std::vector<double>& delta);

/// Chooses (alpha, m_i, M_i) making every delta_i positive for the given
/// (beta, theta), or throws InfeasibleForBeta with the smallest workable
/// penalty estimate. The returned config is in certified mode.
SolverConfig auto_tune(const Problem& prob, double beta, double theta);

/// eta0 = (m_p / 4 M_p^2) ||A_p^* lambda0 - grad f_p(x_p0)||^2 and
/// delta_L0 = L_beta(x0, lambda0) - v_lb + eta0 using the best available
/// lower bound for v(beta).
std::pair<double, double> eta0_and_deltaL0(const Problem& prob, const SolverConfig& cfg,
                                           const std::vector<Vec>& x0, const Vec& lambda0,
                                           double v_lb);

/// Effective per-block moduli: the configured list, or defaults when empty.
std::vector<std::pair<double, double>> effective_moduli(const SolverConfig& cfg,
                                                        const Problem& prob,
                                                        const std::vector<SpectralSummary>& spectra);

}  // namespace jadmm
