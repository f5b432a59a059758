#include "jadmm/params.hpp"

#include <algorithm>
#include <cmath>

namespace jadmm {

void SolverConfig::validate_basic() const {
    if (theta <= 0.0 || theta >= 2.0)
        throw ThetaOutOfRange("theta must lie in the open interval (0, 2)");
    if (beta <= 0.0) throw Error("beta must be positive");
    if (alpha <= 0.0) throw Error("alpha must be positive");
    for (const auto& [m, M] : moduli) {
        if (m <= 0.0) throw Error("modulus m must be positive");
        if (M < m) throw Error("modulus M must satisfy M >= m");
    }
    if (max_iter <= 0) throw Error("max_iter must be positive");
    if (rho_tol < 0.0) throw Error("rho_tol must be nonnegative");
}

double RateConstants::min_delta() const {
    double d = std::numeric_limits<double>::infinity();
    for (double v : delta) d = std::min(d, v);
    return d;
}

double gamma_theta(double theta) {
    if (theta <= 0.0 || theta >= 2.0)
        throw ThetaOutOfRange("gamma_theta: theta must lie in (0, 2)");
    double r = 1.0 - std::abs(theta - 1.0);
    return theta / (r * r);
}

double c1_constant(double theta, double beta, double sigma_plus_p) {
    if (theta <= 0.0 || theta >= 2.0)
        throw ThetaOutOfRange("c1: theta must lie in (0, 2)");
    double a = std::abs(theta - 1.0);
    if (a == 0.0) return 0.0;
    return 2.0 * a / (beta * theta * (1.0 - a) * sigma_plus_p);
}

std::vector<std::pair<double, double>> effective_moduli(
    const SolverConfig& cfg, const Problem& prob, const std::vector<SpectralSummary>& spectra) {
    const Index p = prob.num_blocks();
    if (!cfg.moduli.empty()) {
        if (static_cast<Index>(cfg.moduli.size()) != p)
            throw DimensionMismatch("moduli list length != number of blocks");
        return cfg.moduli;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        double a2 = spectra[static_cast<size_t>(i)].op_norm_sq;
        double m = cfg.beta * static_cast<double>(p) * a2;
        if (m <= 0.0) m = 1.0;
        out.emplace_back(m, m);
    }
    return out;
}

std::vector<double> deltas(const SolverConfig& cfg, const Problem& prob,
                           const std::vector<SpectralSummary>& spectra) {
    const Index p = prob.num_blocks();
    if (static_cast<Index>(spectra.size()) != p)
        throw DimensionMismatch("deltas: spectra count");
    auto mods = effective_moduli(cfg, prob, spectra);
    const double gam = gamma_theta(cfg.theta);
    const double sigp = spectra.back().sigma_plus;
    const double ap2 = spectra.back().op_norm_sq;
    double max_al2 = 0.0;
    for (Index l = 0; l + 1 < p; ++l)
        max_al2 = std::max(max_al2, spectra[static_cast<size_t>(l)].op_norm_sq);
    const double Lp = prob.block(p - 1).f.lip_grad();
    const double pd = static_cast<double>(p);

    std::vector<double> d(static_cast<size_t>(p));
    double bracket = ((pd - 2.0 + cfg.alpha) / 2.0 + 2.0 * gam * (pd + 1.0) * ap2 / sigp) *
                     cfg.beta * max_al2;
    for (Index i = 0; i + 1 < p; ++i)
        d[static_cast<size_t>(i)] = mods[static_cast<size_t>(i)].first / 4.0 - bracket;
    const double Mp = mods.back().second;
    d.back() = mods.back().first / 4.0 -
               (cfg.beta * (pd - 1.0) * ap2 / (2.0 * cfg.alpha) +
                gam * (pd + 1.0) * (Lp * Lp + 2.0 * Mp * Mp) / (cfg.beta * sigp));
    return d;
}

double delta_lambda_constant(const SolverConfig& cfg, const Problem& prob,
                             const std::vector<SpectralSummary>& spectra,
                             const std::vector<double>& delta) {
    const Index p = prob.num_blocks();
    double dmin = *std::min_element(delta.begin(), delta.end());
    if (dmin <= 0.0) throw InfeasibleDeltas("delta_lambda: min delta_i <= 0");
    auto mods = effective_moduli(cfg, prob, spectra);
    const double gam = gamma_theta(cfg.theta);
    const double sigp = spectra.back().sigma_plus;
    const double ap2 = spectra.back().op_norm_sq;
    double max_al2 = 0.0;
    for (Index l = 0; l + 1 < p; ++l)
        max_al2 = std::max(max_al2, spectra[static_cast<size_t>(l)].op_norm_sq);
    const double Lp = prob.block(p - 1).f.lip_grad();
    const double Mp = mods.back().second;
    const double pd = static_cast<double>(p);
    double inner = cfg.theta * gam * (pd + 1.0) / (sigp * dmin) *
                   (2.0 * cfg.beta * cfg.beta * ap2 * max_al2 + Lp * Lp + 2.0 * Mp * Mp);
    return 1.0 / inner;
}

SolverConfig auto_tune(const Problem& prob, double beta, double theta) {
    if (theta <= 0.0 || theta >= 2.0)
        throw ThetaOutOfRange("auto_tune: theta must lie in (0, 2)");
    if (beta <= 0.0) throw Error("auto_tune: beta must be positive");
    const Index p = prob.num_blocks();
    const double pd = static_cast<double>(p);
    const double gam = gamma_theta(theta);

    std::vector<SpectralSummary> spectra;
    spectra.reserve(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) spectra.push_back(spectral_summary(prob.block(i).A));
    const double sigp = spectra.back().sigma_plus;
    const double ap2 = spectra.back().op_norm_sq;
    const double Lp = prob.block(p - 1).f.lip_grad();

    // With M_p = m_p the last gap is concave in m_p; its maximizer and the
    // attainable peak (with the alpha term removed) decide feasibility.
    const double m_star = beta * sigp / (16.0 * gam * (pd + 1.0));
    const double peak = m_star / 8.0;
    const double l_term = gam * (pd + 1.0) * Lp * Lp / (beta * sigp);
    const double budget = peak - l_term;
    if (budget <= 0.0) {
        double beta_min = 8.0 * std::sqrt(2.0) * gam * (pd + 1.0) * Lp / sigp;
        throw InfeasibleForBeta(
            "auto_tune: no positive proximal window for this penalty; smallest workable "
            "beta is about " + std::to_string(beta_min),
            beta_min);
    }
    constexpr double kMargin = 0.1;
    double alpha = (1.0 + kMargin) * beta * (pd - 1.0) * ap2 / (2.0 * budget);

    SolverConfig cfg;
    cfg.beta = beta;
    cfg.theta = theta;
    cfg.alpha = alpha;
    cfg.mode = RunMode::Certified;
    cfg.moduli.resize(static_cast<size_t>(p));

    double max_al2 = 0.0;
    for (Index l = 0; l + 1 < p; ++l)
        max_al2 = std::max(max_al2, spectra[static_cast<size_t>(l)].op_norm_sq);
    double bracket =
        ((pd - 2.0 + alpha) / 2.0 + 2.0 * gam * (pd + 1.0) * ap2 / sigp) * beta * max_al2;

    for (Index i = 0; i + 1 < p; ++i) {
        double m = bracket > 0.0 ? 4.0 * (1.0 + kMargin) * bracket : 1.0;
        // Prox-only blocks use the coupling-canceling generator, whose
        // Lipschitz modulus is tau = m + beta ||A_i||^2.
        const BlockFunction& f = prob.block(i).f;
        double a2 = spectra[static_cast<size_t>(i)].op_norm_sq;
        double M = f.is_smooth() ? m : m + beta * a2;
        cfg.moduli[static_cast<size_t>(i)] = {m, M};
    }
    cfg.moduli.back() = {m_star, m_star};

    auto d = deltas(cfg, prob, spectra);
    for (double di : d)
        if (di <= 0.0)
            throw InfeasibleDeltas("auto_tune: produced a nonpositive delta (internal)");
    return cfg;
}

std::pair<double, double> eta0_and_deltaL0(const Problem& prob, const SolverConfig& cfg,
                                           const std::vector<Vec>& x0, const Vec& lambda0,
                                           double v_lb) {
    const Index p = prob.num_blocks();
    std::vector<SpectralSummary> spectra;
    for (Index i = 0; i < p; ++i) spectra.push_back(spectral_summary(prob.block(i).A));
    auto mods = effective_moduli(cfg, prob, spectra);
    const double mp = mods.back().first, Mp = mods.back().second;
    Vec Rp0 = prob.block(p - 1).A.apply_adjoint(lambda0) -
              prob.block(p - 1).f.gradient(x0.back());
    double eta0 = mp / (4.0 * Mp * Mp) * Rp0.squaredNorm();
    double dl0 = augmented_lagrangian(prob, x0, lambda0, cfg.beta) - v_lb + eta0;
    return {eta0, dl0};
}

}  // namespace jadmm
