#include "jadmm/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "jadmm/subproblem.hpp"

namespace jadmm {

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kInequalityTol = 1e-7;

Verdict identity_verdict(double residual, double scale) {
    Verdict v;
    v.evaluated = true;
    v.margin = -residual;
    v.holds = residual <= kIdentityTol * (1.0 + std::abs(scale));
    return v;
}

Verdict inequality_verdict(double margin, double scale, bool advisory) {
    Verdict v;
    v.evaluated = true;
    v.margin = margin;
    v.advisory = advisory;
    v.holds = margin >= -kInequalityTol * (1.0 + std::abs(scale));
    return v;
}

Vec seed_Rp0(const RunContext& ctx, const SolverState& s0) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    return prob.block(p - 1).A.apply_adjoint(s0.lambda) -
           prob.block(p - 1).f.gradient(s0.x.back());
}

// R_i at the iteration of `s` (s.k >= 1): definitional formula.
std::vector<Vec> residual_vectors(const RunContext& ctx, const SolverState& s) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    Vec sum_Adx = Vec::Zero(prob.constraint_dim());
    std::vector<Vec> Adx(static_cast<size_t>(p));
    for (Index j = 0; j < p; ++j) {
        Adx[static_cast<size_t>(j)] = prob.block(j).A.apply(s.delta_x[static_cast<size_t>(j)]);
        sum_Adx += Adx[static_cast<size_t>(j)];
    }
    std::vector<Vec> R(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        const BregmanGenerator* w = ctx.generator(i, s.k);
        Vec dw = w->grad(s.x[static_cast<size_t>(i)]) - w->grad(s.x_prev[static_cast<size_t>(i)]);
        R[static_cast<size_t>(i)] =
            -ctx.cfg.beta *
                prob.block(i).A.apply_adjoint(sum_Adx - Adx[static_cast<size_t>(i)]) +
            dw;
    }
    return R;
}

}  // namespace

double IterationRecord::max_residual() const {
    double r = feas;
    for (double s : stat_res) r = std::max(r, s);
    return r;
}

IterationRecord make_seed_record(const RunContext& ctx, const SolverState& s0) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    IterationRecord rec;
    rec.k = 0;
    rec.x = s0.x;
    rec.lambda = s0.lambda;
    rec.lambda_prev = s0.lambda;
    rec.delta_x = s0.delta_x;
    rec.delta_lambda = s0.delta_lambda;
    rec.lambda_hat = s0.lambda;
    rec.R.assign(static_cast<size_t>(p), Vec());
    rec.R.back() = seed_Rp0(ctx, s0);
    rec.eta = ctx.constants.eta0;
    rec.L_aug = augmented_lagrangian(prob, s0.x, s0.lambda, ctx.cfg.beta);
    rec.L_hat = rec.L_aug + rec.eta;
    rec.feas = feasibility_residual(prob, s0.x);
    rec.norm_dx.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) rec.norm_dx[static_cast<size_t>(i)] = s0.delta_x[static_cast<size_t>(i)].norm();
    rec.norm_dlambda = 0.0;
    rec.stat_res.assign(static_cast<size_t>(p), 0.0);
    rec.stat_res.back() = rec.R.back().norm();
    return rec;
}

IterationRecord record_iteration(const RunContext& ctx, const SolverState& sk,
                                 const SolverState& skm1) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    const double beta = ctx.cfg.beta;
    const double theta = ctx.cfg.theta;
    const RateConstants& cst = ctx.constants;

    IterationRecord rec;
    rec.k = sk.k;
    rec.x = sk.x;
    rec.lambda = sk.lambda;
    rec.lambda_prev = sk.lambda_prev;
    rec.delta_x = sk.delta_x;
    rec.delta_lambda = sk.delta_lambda;
    rec.subproblem_residual = sk.subproblem_residual;

    Vec viol = constraint_violation(prob, sk.x);
    rec.feas = viol.norm();
    rec.lambda_hat = sk.lambda_prev - beta * viol;

    rec.delta_w.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        const BregmanGenerator* w = ctx.generator(i, sk.k);
        rec.delta_w[static_cast<size_t>(i)] =
            w->grad(sk.x[static_cast<size_t>(i)]) - w->grad(sk.x_prev[static_cast<size_t>(i)]);
    }
    rec.R = residual_vectors(ctx, sk);

    Vec Rp_prev = (skm1.k == 0) ? seed_Rp0(ctx, skm1) : residual_vectors(ctx, skm1).back();
    Vec dfp = prob.block(p - 1).f.gradient(sk.x.back()) -
              prob.block(p - 1).f.gradient(sk.x_prev.back());
    rec.u = dfp + (rec.R.back() - Rp_prev);
    rec.u_norm = rec.u.norm();

    const LinOp& Ap = prob.block(p - 1).A;
    double apdl_sq = Ap.apply_adjoint(sk.delta_lambda).squaredNorm();
    double apdl_prev_sq = Ap.apply_adjoint(skm1.delta_lambda).squaredNorm();

    rec.eta = 0.5 * cst.c1 * apdl_sq;
    rec.norm_dx.resize(static_cast<size_t>(p));
    for (Index i = 0; i < p; ++i) {
        double nd = sk.delta_x[static_cast<size_t>(i)].norm();
        rec.norm_dx[static_cast<size_t>(i)] = nd;
        rec.eta += 0.25 * cst.m[static_cast<size_t>(i)] * nd * nd;
    }
    rec.norm_dlambda = sk.delta_lambda.norm();

    rec.L_aug = augmented_lagrangian(prob, sk.x, sk.lambda, beta);
    rec.L_hat = rec.L_aug + rec.eta;

    rec.theta_lambda = rec.norm_dlambda * rec.norm_dlambda / (beta * theta) +
                       0.5 * cst.c1 * (apdl_sq - apdl_prev_sq);
    double dxp = rec.norm_dx.back();
    double dxp_prev = skm1.delta_x.back().norm();
    rec.theta_p = ((static_cast<double>(p) - 1.0) * beta * cst.norm_Ap_sq / (2.0 * ctx.cfg.alpha) -
                   cst.m.back() / 4.0) *
                  (dxp * dxp + dxp_prev * dxp_prev);

    rec.stat_res.resize(static_cast<size_t>(p));
    for (Index i = 0; i + 1 < p; ++i)
        rec.stat_res[static_cast<size_t>(i)] = rec.R[static_cast<size_t>(i)].norm();
    rec.stat_res.back() =
        (prob.block(p - 1).f.gradient(sk.x.back()) - Ap.apply_adjoint(rec.lambda_hat)).norm();
    return rec;
}

void check_inequalities(const RunContext& ctx, IterationRecord& rec,
                        const IterationRecord& prev, std::mt19937_64& rng) {
    const Problem& prob = *ctx.prob;
    const Index p = prob.num_blocks();
    const double beta = ctx.cfg.beta;
    const double theta = ctx.cfg.theta;
    const RateConstants& cst = ctx.constants;
    const bool advisory = !cst.certified;
    const bool full = ctx.cfg.check_level == CheckLevel::Full;
    const LinOp& Ap = prob.block(p - 1).A;

    // (7) feasibility identity ||sum A_i x_i - b|| = ||dlambda|| / (beta theta)
    {
        double lhs = rec.feas;
        double rhs = rec.norm_dlambda / (beta * theta);
        rec.checks["feasibility-identity"] = identity_verdict(std::abs(lhs - rhs), rhs);
    }
    // multiplier identity lambda_hat = lambda_prev + dlambda / theta
    {
        Vec recon = rec.lambda_prev + rec.delta_lambda / theta;
        rec.checks["lambdahat-identity"] =
            identity_verdict((recon - rec.lambda_hat).norm(), rec.lambda_hat.norm());
    }
    // (2) dual recursion A_p^* dlambda^k = (1-theta) A_p^* dlambda^{k-1} + theta u^k
    {
        Vec lhs = Ap.apply_adjoint(rec.delta_lambda);
        Vec rhs = (1.0 - theta) * Ap.apply_adjoint(prev.delta_lambda) + theta * rec.u;
        rec.checks["dual-recursion"] = identity_verdict((lhs - rhs).norm(), lhs.norm());
    }
    // smooth-block inclusion 0 = grad f_i - A_i^* lambda_hat + R_i
    {
        double worst = 0.0, scale = 0.0;
        for (Index i = 0; i < p; ++i) {
            const BlockFunction& f = prob.block(i).f;
            if (!f.is_smooth()) continue;
            Vec incl = f.gradient(rec.x[static_cast<size_t>(i)]) -
                       prob.block(i).A.apply_adjoint(rec.lambda_hat) +
                       rec.R[static_cast<size_t>(i)];
            worst = std::max(worst, incl.norm());
            scale = std::max(scale, rec.R[static_cast<size_t>(i)].norm());
        }
        rec.checks["residual-inclusion"] = identity_verdict(worst, scale);
    }
    // (1) descent
    {
        double lhs = rec.L_aug - prev.L_aug;
        Vec sum_Adx = Vec::Zero(prob.constraint_dim());
        double sq_sum = 0.0;
        for (Index i = 0; i < p; ++i) {
            Vec Adx = prob.block(i).A.apply(rec.delta_x[static_cast<size_t>(i)]);
            sum_Adx += Adx;
            sq_sum += Adx.squaredNorm();
        }
        double cross = 0.5 * (sum_Adx.squaredNorm() - sq_sum);
        double rhs = beta * cross + rec.norm_dlambda * rec.norm_dlambda / (theta * beta);
        for (Index i = 0; i < p; ++i) {
            double nd = rec.norm_dx[static_cast<size_t>(i)];
            rhs -= 0.5 * cst.m[static_cast<size_t>(i)] * nd * nd;
        }
        rec.checks["descent"] =
            inequality_verdict(rhs - lhs, std::max(std::abs(lhs), std::abs(rhs)), false);
    }
    // (3) theta bound
    {
        double bound = cst.gamma_theta / (beta * cst.sigma_plus_p) * rec.u_norm * rec.u_norm;
        rec.checks["theta-bound"] = inequality_verdict(bound - rec.theta_lambda,
                                                       std::max(bound, std::abs(rec.theta_lambda)),
                                                       advisory);
    }
    // (4) potential descent
    {
        double lhs = rec.L_hat - prev.L_hat;
        double rhs = 0.0;
        for (Index i = 0; i < p; ++i) {
            double a = rec.norm_dx[static_cast<size_t>(i)];
            double b = prev.norm_dx[static_cast<size_t>(i)];
            rhs -= cst.delta[static_cast<size_t>(i)] * (a * a + b * b);
        }
        rec.checks["potential-descent"] = inequality_verdict(
            rhs - lhs, std::max({std::abs(lhs), std::abs(rhs), std::abs(rec.L_hat)}), advisory);
    }
    // (5) potential floor (enforced only with a true lower bound)
    {
        Verdict v = inequality_verdict(rec.L_hat - cst.v_lb, std::abs(rec.L_hat),
                                       advisory || !cst.v_lb_is_hint);
        rec.checks["potential-floor"] = v;
    }
    // (6) affine increment identity at random in-domain points (full level)
    if (full && p >= 2) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_int_distribution<Index> pick(1, p - 1);  // 0-based block >= 1
        Index i = pick(rng);
        std::vector<Vec> y0(static_cast<size_t>(p)), y(static_cast<size_t>(p));
        for (Index j = 0; j < p; ++j) {
            const BlockFunction& f = prob.block(j).f;
            Vec a(f.dim()), b(f.dim());
            for (Index t = 0; t < f.dim(); ++t) {
                a(t) = rec.x[static_cast<size_t>(j)](t) + gauss(rng);
                b(t) = rec.x[static_cast<size_t>(j)](t) + gauss(rng);
            }
            y0[static_cast<size_t>(j)] = f.project_domain(a);
            y[static_cast<size_t>(j)] = f.project_domain(b);
        }
        auto mixed = [&](Index upto_fresh, bool fresh_i) {
            // blocks < upto_fresh from y, block i per flag, rest from y0
            std::vector<Vec> z = y0;
            for (Index j = 0; j < upto_fresh; ++j) z[static_cast<size_t>(j)] = y[static_cast<size_t>(j)];
            z[static_cast<size_t>(i)] = fresh_i ? y[static_cast<size_t>(i)] : y0[static_cast<size_t>(i)];
            return z;
        };
        const Vec& lam = rec.lambda;
        double lhs = augmented_lagrangian(prob, mixed(i, true), lam, beta) -
                     augmented_lagrangian(prob, mixed(i, false), lam, beta);
        double cross = 0.0;
        Vec Adyi = prob.block(i).A.apply(y[static_cast<size_t>(i)] - y0[static_cast<size_t>(i)]);
        for (Index j = 0; j < i; ++j)
            cross += Adyi.dot(prob.block(j).A.apply(y[static_cast<size_t>(j)] - y0[static_cast<size_t>(j)]));
        double rhs = augmented_lagrangian(prob, mixed(0, true), lam, beta) -
                     augmented_lagrangian(prob, mixed(0, false), lam, beta) + beta * cross;
        rec.checks["affine-increment"] =
            identity_verdict(std::abs(lhs - rhs), std::max(std::abs(lhs), std::abs(rhs)));
    }
    // objective equivalence of the assembled instances, plus a re-solve of
    // every prox block: its committed value must reproduce exactly, which is
    // the constructive form of the inclusion certificate (full level)
    if (full) {
        auto instances = assemble_instances(ctx, prev.x, rec.lambda_prev, rec.k);
        {
            double worst_resolve = 0.0, scale = 0.0;
            bool any = false;
            for (Index i = 0; i < p; ++i) {
                const SubproblemInstance& inst = instances[static_cast<size_t>(i)];
                if (inst.generator->kind() != GenKind::CancelCoupling || !inst.f->has_prox() ||
                    inst.f->kind() == FnKind::Quadratic)
                    continue;
                any = true;
                Vec again = solve_block_prox_reduction(inst).x_new;
                worst_resolve =
                    std::max(worst_resolve, (again - rec.x[static_cast<size_t>(i)]).norm());
                scale = std::max(scale, rec.x[static_cast<size_t>(i)].norm());
            }
            if (any) rec.checks["prox-resolve"] = identity_verdict(worst_resolve, scale);
        }
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst = 0.0;
        for (Index i = 0; i < p; ++i) {
            const SubproblemInstance& inst = instances[static_cast<size_t>(i)];
            const BlockFunction& f = prob.block(i).f;
            std::vector<Vec> z = prev.x;
            for (int s = 0; s < 20; ++s) {
                Vec cand(f.dim());
                for (Index t = 0; t < f.dim(); ++t)
                    cand(t) = inst.base_point(t) + gauss(rng);
                cand = f.project_domain(cand);
                double d_inst = inst.objective(cand) - inst.objective(inst.base_point);
                z[static_cast<size_t>(i)] = cand;
                double d_direct =
                    augmented_lagrangian(prob, z, rec.lambda_prev, beta) +
                    bregman_distance(*inst.generator, cand, inst.base_point).value -
                    augmented_lagrangian(prob, prev.x, rec.lambda_prev, beta);
                z[static_cast<size_t>(i)] = prev.x[static_cast<size_t>(i)];
                double rel = std::abs(d_inst - d_direct) / (1.0 + std::abs(d_direct));
                worst = std::max(worst, rel);
            }
        }
        Verdict v;
        v.evaluated = true;
        v.margin = -worst;
        v.holds = worst <= 1e-8;
        rec.checks["objective-equivalence"] = v;
    }
}

TraceRow to_row(const IterationRecord& rec) {
    TraceRow r;
    r.k = rec.k;
    r.L_aug = rec.L_aug;
    r.eta = rec.eta;
    r.L_hat = rec.L_hat;
    r.feas = rec.feas;
    r.stat_res = rec.stat_res;
    r.norm_dx = rec.norm_dx;
    r.norm_dlambda = rec.norm_dlambda;
    r.theta_lambda = rec.theta_lambda;
    r.u_norm = rec.u_norm;
    auto holds = [&](const char* name) {
        auto it = rec.checks.find(name);
        return it == rec.checks.end() ? true : it->second.holds;
    };
    r.check_descent = holds("descent");
    r.check_dualrec = holds("dual-recursion");
    r.check_thetabound = holds("theta-bound");
    r.check_potdescent = holds("potential-descent");
    r.check_floor = holds("potential-floor");
    r.check_feasid = holds("feasibility-identity");
    return r;
}

RateCertificate rate_certificate(const std::vector<TraceRow>& rows, const RateConstants& c) {
    if (!c.certified)
        throw UncertifiedRun("rate_certificate: parameters are not certified (some delta <= 0)");
    if (!c.v_lb_is_hint)
        throw UncertifiedRun(
            "rate_certificate: no trusted lower bound for v(beta); sampled evidence cannot "
            "certify the bounds");
    if (rows.empty()) throw Error("rate_certificate: empty trace");
    if (rows.front().k != 1) throw Error("rate_certificate: trace must start at k = 1");
    for (size_t idx = 0; idx + 1 < rows.size(); ++idx)
        if (rows[idx + 1].k != rows[idx].k + 1)
            throw Error("rate_certificate: trace rows must be contiguous");
    const size_t p = c.delta.size();
    const double dmin = c.min_delta();
    const double two_dl0 = 2.0 * c.delta_L0;

    // Seeded k = 0 displacement norms.
    std::vector<double> dx_seed(p, 0.0);
    dx_seed.back() = std::sqrt(4.0 * c.eta0 / c.m.back());

    RateCertificate cert;
    cert.delta_L0 = c.delta_L0;
    cert.per_k.reserve(rows.size());

    double running_sum = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    int best_j = 0;
    std::vector<double> prev_dx = dx_seed;
    std::vector<const TraceRow*> by_index(rows.size());
    for (size_t idx = 0; idx < rows.size(); ++idx) by_index[idx] = &rows[idx];

    for (size_t idx = 0; idx < rows.size(); ++idx) {
        const TraceRow& row = *by_index[idx];
        int k = row.k;
        double score = c.delta_lambda * row.norm_dlambda * row.norm_dlambda;
        for (size_t i = 0; i < p; ++i) {
            double a = row.norm_dx[i], b = prev_dx[i];
            score += c.delta[i] * (a * a + b * b);
        }
        running_sum += score;
        if (score < best_score) {
            best_score = score;
            best_j = k;
        }
        prev_dx = row.norm_dx;

        RateCertificate::PerK pk;
        pk.k = k;
        pk.witnessed_j = best_j;
        double disp = std::sqrt(two_dl0 / (static_cast<double>(k) * dmin));
        double res_bound = 0.0;
        for (size_t i = 0; i < p; ++i)
            res_bound = std::max(res_bound, c.res_bound_factor[i] * disp);
        pk.res_bound = res_bound;
        pk.feas_bound =
            std::sqrt(two_dl0 / (static_cast<double>(k) * c.delta_lambda)) / (c.beta * c.theta);
        pk.sum_margin = two_dl0 - running_sum;

        // bounds must hold at the witnessing iteration
        const TraceRow& wit = *by_index[static_cast<size_t>(best_j - 1)];
        double min_margin = pk.sum_margin;
        for (size_t i = 0; i < p; ++i) {
            double bound_i = c.res_bound_factor[i] * disp;
            min_margin = std::min(min_margin, bound_i - wit.stat_res[i]);
        }
        min_margin = std::min(min_margin, pk.feas_bound - wit.feas);
        pk.min_margin = min_margin;
        if (min_margin < 0.0) cert.all_hold = false;
        cert.per_k.push_back(pk);
    }
    return cert;
}

}  // namespace jadmm
