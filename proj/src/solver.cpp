#include "jadmm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace jadmm {

RunContext make_context(const Problem& prob, SolverConfig cfg) {
    cfg.validate_basic();
    const Index p = prob.num_blocks();

    RunContext ctx;
    ctx.prob = &prob;
    ctx.spectra.reserve(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) ctx.spectra.push_back(spectral_summary(prob.block(i).A));

    cfg.moduli = effective_moduli(cfg, prob, ctx.spectra);
    ctx.cfg = cfg;

    // Generators: coupling-canceling for prox-only blocks (the solve becomes a
    // plain prox step), Euclidean otherwise. M_i follows the generator.
    ctx.generators.reserve(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        const Block& blk = prob.block(i);
        double m = cfg.moduli[static_cast<size_t>(i)].first;
        double a2 = ctx.spectra[static_cast<size_t>(i)].op_norm_sq;
        bool cancel = false;
        switch (cfg.bregman) {
            case GeneratorChoice::Auto:
                cancel = !blk.f.is_smooth();
                break;
            case GeneratorChoice::Euclidean:
                cancel = false;
                break;
            case GeneratorChoice::CancelCoupling:
                cancel = a2 > 0.0;
                break;
        }
        if (cancel) {
            double tau = m + cfg.beta * a2;
            ctx.generators.push_back(BregmanGenerator::cancel_coupling(tau, &blk.A, cfg.beta));
            ctx.cfg.moduli[static_cast<size_t>(i)].second = tau;
        } else {
            ctx.generators.push_back(BregmanGenerator::euclidean(m, blk.f.dim()));
            ctx.cfg.moduli[static_cast<size_t>(i)].second = m;
        }
        // keep a user-declared larger M if one was given
        ctx.cfg.moduli[static_cast<size_t>(i)].second =
            std::max(ctx.cfg.moduli[static_cast<size_t>(i)].second,
                     cfg.moduli[static_cast<size_t>(i)].second);
    }

    RateConstants& c = ctx.constants;
    c.p = static_cast<int>(p);
    c.beta = cfg.beta;
    c.theta = cfg.theta;
    c.alpha = cfg.alpha;
    c.gamma_theta = gamma_theta(cfg.theta);
    c.sigma_plus_p = ctx.spectra.back().sigma_plus;
    c.norm_Ap_sq = ctx.spectra.back().op_norm_sq;
    c.norm_Ap_adj_sq = c.norm_Ap_sq;
    c.max_Al_sq = 0.0;
    for (Index l = 0; l + 1 < p; ++l)
        c.max_Al_sq = std::max(c.max_Al_sq, ctx.spectra[static_cast<size_t>(l)].op_norm_sq);
    c.lip_p = prob.block(p - 1).f.lip_grad();
    c.c1 = c1_constant(cfg.theta, cfg.beta, c.sigma_plus_p);
    c.m.resize(static_cast<size_t>(p));
    c.M.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        c.m[static_cast<size_t>(i)] = ctx.cfg.moduli[static_cast<size_t>(i)].first;
        c.M[static_cast<size_t>(i)] = ctx.cfg.moduli[static_cast<size_t>(i)].second;
    }
    c.delta = deltas(ctx.cfg, prob, ctx.spectra);
    c.certified = c.min_delta() > 0.0;
    if (c.certified)
        c.delta_lambda = delta_lambda_constant(ctx.cfg, prob, ctx.spectra, c.delta);

    c.res_bound_factor.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        double sum = 0.0;
        for (Index l = 0; l < p; ++l) {
            if (l == i) continue;
            sum += cfg.beta * cross_op_norm(prob.block(i).A, prob.block(l).A);
        }
        c.res_bound_factor[static_cast<size_t>(i)] = sum + c.M[static_cast<size_t>(i)];
    }

    if (prob.lower_bound_hint()) {
        c.v_lb = *prob.lower_bound_hint();
        c.v_lb_is_hint = true;
    } else {
        ValidationReport rep = validate(prob, 1e-8, 64);
        if (rep.a3_kind == LowerBoundEvidence::SampledMin) {
            c.v_lb = rep.a3_value;
            c.v_lb_is_hint = false;
        } else if (cfg.check_level == CheckLevel::Full && cfg.mode == RunMode::Certified) {
            throw MissingLowerBound("no lower-bound evidence for v(beta)");
        }
    }
    return ctx;
}

std::vector<Vec> default_initial_point(const Problem& prob) {
    std::vector<Vec> x0;
    x0.reserve(static_cast<size_t>(prob.num_blocks()));
    for (Index i = 0; i < prob.num_blocks(); ++i)
        x0.push_back(prob.block(i).f.project_domain(Vec::Zero(prob.block(i).f.dim())));
    return x0;
}

SolverState init_state(const RunContext& ctx, std::vector<Vec> x0, Vec lambda0) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    if (static_cast<Index>(x0.size()) != p) throw DimensionMismatch("init_state: block count");
    for (Index i = 0; i < p; ++i)
        if (x0[static_cast<size_t>(i)].size() != prob.block(i).f.dim())
            throw DimensionMismatch("init_state: block dimension");
    if (lambda0.size() != prob.constraint_dim())
        throw DimensionMismatch("init_state: multiplier dimension");

    for (Index i = 0; i < p; ++i)
        if (std::isinf(prob.block(i).f.value(x0[static_cast<size_t>(i)])))
            throw Error("init_state: initial point of block " + std::to_string(i + 1) +
                        " lies outside the block domain");

    SolverState s;
    s.k = 0;
    s.x = x0;
    s.x_prev = x0;
    s.lambda = lambda0;
    s.lambda_prev = lambda0;
    s.delta_lambda = Vec::Zero(lambda0.size());
    s.delta_x.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i)
        s.delta_x[static_cast<size_t>(i)] = Vec::Zero(prob.block(i).f.dim());
    // seed: delta_x_p^0 = R_p^0 / M_p
    Vec Rp0 = prob.block(p - 1).A.apply_adjoint(lambda0) -
              prob.block(p - 1).f.gradient(x0.back());
    s.delta_x.back() = Rp0 / ctx.constants.M.back();
    s.subproblem_residual.assign(static_cast<size_t>(p), 0.0);
    return s;
}

void step(const RunContext& ctx, SolverState& state) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    const int k_next = state.k + 1;
    auto instances = assemble_instances(ctx, state.x, state.lambda, k_next);

    std::vector<SubproblemSolution> sols(static_cast<size_t>(p));
    if (ctx.cfg.parallel) {
        std::vector<std::exception_ptr> errs(static_cast<size_t>(p));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(p));
        for (Index i = 0; i < p; ++i) {
            pool.emplace_back([&, i]() {
                try {
                    sols[static_cast<size_t>(i)] =
                        solve_block(instances[static_cast<size_t>(i)], ctx.cfg);
                } catch (...) {
                    errs[static_cast<size_t>(i)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    } else {
        for (Index i = 0; i < p; ++i)
            sols[static_cast<size_t>(i)] = solve_block(instances[static_cast<size_t>(i)], ctx.cfg);
    }

    // barrier commit
    state.x_prev = state.x;
    for (Index i = 0; i < p; ++i) {
        state.x[static_cast<size_t>(i)] = sols[static_cast<size_t>(i)].x_new;
        state.delta_x[static_cast<size_t>(i)] =
            state.x[static_cast<size_t>(i)] - state.x_prev[static_cast<size_t>(i)];
        state.subproblem_residual[static_cast<size_t>(i)] =
            sols[static_cast<size_t>(i)].optimality_residual;
    }
    Vec viol = constraint_violation(prob, state.x);
    state.lambda_prev = state.lambda;
    state.delta_lambda = -ctx.cfg.theta * ctx.cfg.beta * viol;
    state.lambda = state.lambda_prev + state.delta_lambda;
    state.k = k_next;
}

RunResult run(const Problem& prob, const SolverConfig& cfg, std::vector<Vec> x0, Vec lambda0) {
    RunContext ctx = make_context(prob, cfg);
    RunResult res;
    res.constants = ctx.constants;

    if (cfg.mode == RunMode::Certified && !ctx.constants.certified) {
        res.status = RunStatus::InfeasibleParams;
        res.message = "certified mode requested but some delta_i <= 0";
        return res;
    }

    SolverState state = init_state(ctx, std::move(x0), std::move(lambda0));
    auto [eta0, dl0] =
        eta0_and_deltaL0(prob, ctx.cfg, state.x, state.lambda, ctx.constants.v_lb);
    ctx.constants.eta0 = eta0;
    ctx.constants.delta_L0 = dl0;
    res.constants = ctx.constants;

    IterationRecord prev_rec = make_seed_record(ctx, state);
    SolverState prev_state = state;
    std::mt19937_64 rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);

    const bool checking = cfg.check_level != CheckLevel::Off;
    res.trace.reserve(static_cast<size_t>(cfg.max_iter));

    for (int k = 1; k <= cfg.max_iter; ++k) {
        try {
            step(ctx, state);
        } catch (const Error& e) {
            res.status = RunStatus::SubproblemFailure;
            res.message = e.what();
            res.final_state = state;
            return res;
        }
        IterationRecord rec = record_iteration(ctx, state, prev_state);
        if (checking) {
            check_inequalities(ctx, rec, prev_rec, rng);
            for (const auto& [name, v] : rec.checks)
                if (v.evaluated && !v.advisory && !v.holds) res.any_check_failed = true;
        }
        double maxres = rec.max_residual();
        if (maxres < res.best.max_residual) {
            res.best.j = k;
            res.best.x = state.x;
            res.best.lambda_hat = rec.lambda_hat;
            res.best.stat_res = rec.stat_res;
            res.best.feas = rec.feas;
            res.best.max_residual = maxres;
        }
        prev_state = state;
        prev_rec = rec;
        res.trace.push_back(std::move(rec));
        if (cfg.rho_tol > 0.0 && maxres <= cfg.rho_tol) {
            res.status = RunStatus::Converged;
            res.achieved_residual = maxres;
            res.final_state = state;
            return res;
        }
    }
    res.status = RunStatus::MaxIter;
    res.achieved_residual = res.best.max_residual;
    res.final_state = state;
    return res;
}

RunResult run(const Problem& prob, const SolverConfig& cfg) {
    return run(prob, cfg, default_initial_point(prob), Vec::Zero(prob.constraint_dim()));
}

}  // namespace jadmm
