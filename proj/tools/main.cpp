// Command-line driver: solve / validate / certify.
//
// Exit codes: 0 success (solve: converged; certify: all bounds hold),
// 2 iteration budget exhausted, 3 infeasible certified parameters or
// uncertified trace, 4 input errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "jadmm/json_io.hpp"
#include "jadmm/solver.hpp"
#include "jadmm/trace_io.hpp"

namespace {

using namespace jadmm;

int cmd_solve(const std::string& problem_path, SolverConfig cfg, bool do_auto_tune,
              const std::vector<double>& m_list, const std::string& trace_path,
              const std::string& cert_path, const std::string& plot_path,
              const std::string& summary_path) {
    Problem prob = load_problem(problem_path);
    if (do_auto_tune) {
        SolverConfig tuned = auto_tune(prob, cfg.beta, cfg.theta);
        cfg.alpha = tuned.alpha;
        cfg.moduli = tuned.moduli;
    } else if (!m_list.empty()) {
        cfg.moduli.clear();
        for (double m : m_list) cfg.moduli.emplace_back(m, m);
    }
    cfg.validate_basic();

    RunResult res = run(prob, cfg);

    if (res.status == RunStatus::InfeasibleParams) {
        std::cerr << "E: " << res.message << "\n";
        return 3;
    }
    if (res.status == RunStatus::SubproblemFailure) {
        std::cerr << "E: subproblem failure: " << res.message << "\n";
        return 4;
    }

    std::vector<TraceRow> rows;
    rows.reserve(res.trace.size());
    for (const auto& rec : res.trace) rows.push_back(to_row(rec));

    if (!trace_path.empty()) write_trace_csv(trace_path, rows, res.constants.p);
    if (!cert_path.empty()) write_constants_json(cert_path, res.constants);
    if (!plot_path.empty()) write_plotdata_tsv(plot_path, rows, res.constants);

    std::string summary = summarize_run(rows, res.constants);
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        out << summary;
    }
    std::cout << summary;
    std::cout << "status: " << (res.status == RunStatus::Converged ? "converged" : "max_iter")
              << "\n";
    std::cout << "best iteration: " << res.best.j
              << " (max residual " << res.best.max_residual << ")\n";
    std::cout << "best x:";
    for (const Vec& xi : res.best.x)
        for (Index t = 0; t < xi.size(); ++t) std::cout << ' ' << xi(t);
    std::cout << "\nbest lambda_hat:";
    for (Index t = 0; t < res.best.lambda_hat.size(); ++t)
        std::cout << ' ' << res.best.lambda_hat(t);
    std::cout << "\n";
    if (res.any_check_failed)
        std::cout << "warning: some non-advisory runtime checks failed (see trace)\n";
    return res.status == RunStatus::Converged ? 0 : 2;
}

int cmd_validate(const std::string& problem_path, double tol, int samples) {
    Problem prob = load_problem(problem_path);
    ValidationReport rep = validate(prob, tol, samples);
    std::cout << "a0 (lower semicontinuity): " << rep.a0_note << "\n";
    std::cout << "a1 (range condition): " << (rep.a1_range ? "pass" : "FAIL")
              << " worst residual " << rep.a1_worst_residual << "\n";
    std::cout << "a2 (smooth last block): " << (rep.a2_smooth_last ? "pass" : "FAIL")
              << " empirical Lipschitz " << rep.a2_lip_empirical << " declared "
              << rep.a2_lip_declared << "\n";
    std::cout << "a3 (lower bound): ";
    switch (rep.a3_kind) {
        case LowerBoundEvidence::UserHint:
            std::cout << "user hint " << rep.a3_value;
            break;
        case LowerBoundEvidence::SampledMin:
            std::cout << "sampled minimum " << rep.a3_value << " (weak evidence)";
            break;
        case LowerBoundEvidence::Unknown:
            std::cout << "unknown";
            break;
    }
    std::cout << "\n";
    for (const std::string& w : rep.warnings) std::cout << "warning: " << w << "\n";
    return rep.passed() ? 0 : 1;
}

int cmd_certify(const std::string& trace_path, const std::string& constants_path) {
    RateConstants c = read_constants_json(constants_path);
    if (!c.certified || !c.v_lb_is_hint) {
        std::cerr << "E: trace was produced in practical mode or without a trusted lower "
                     "bound; nothing to certify\n";
        return 3;
    }
    int p = 0;
    std::vector<TraceRow> rows = read_trace_csv(trace_path, &p);
    if (p != c.p) {
        std::cerr << "E: trace block count " << p << " != constants block count " << c.p << "\n";
        return 4;
    }
    RateCertificate cert = rate_certificate(rows, c);
    for (const auto& pk : cert.per_k)
        std::cout << "k=" << pk.k << " witnessed_j=" << pk.witnessed_j
                  << " res_bound=" << pk.res_bound << " feas_bound=" << pk.feas_bound
                  << " min_margin=" << pk.min_margin << " sum_margin=" << pk.sum_margin << "\n";
    std::cout << (cert.all_hold ? "all bounds hold" : "BOUND VIOLATION") << "\n";
    return cert.all_hold ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jacobi-type proximal ADMM solver with runtime certificates"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run the solver on a problem file");
    std::string problem_path, trace_path, cert_path, plot_path, summary_path;
    std::string check_str = "cheap", mode_str = "practical", bregman_str = "auto";
    std::vector<double> m_list;
    bool do_auto_tune = false;
    jadmm::SolverConfig cfg;
    solve->add_option("--problem", problem_path, "problem JSON path")->required();
    solve->add_option("--beta", cfg.beta, "penalty parameter");
    solve->add_option("--theta", cfg.theta, "dual relaxation in (0,2)");
    solve->add_option("--alpha", cfg.alpha, "splitting weight of the analysis");
    solve->add_flag("--auto-tune", do_auto_tune, "derive certified (alpha, m_i)");
    solve->add_option("--m", m_list, "per-block proximal moduli")->delimiter(',');
    solve->add_option("--max-iter", cfg.max_iter, "iteration budget");
    solve->add_option("--rho", cfg.rho_tol, "target residual");
    solve->add_option("--check", check_str, "off|cheap|full");
    solve->add_option("--mode", mode_str, "certified|practical");
    solve->add_option("--bregman", bregman_str,
                      "generator selection: auto|euclidean|cancel_coupling");
    solve->add_option("--trace", trace_path, "write trace CSV here");
    solve->add_option("--cert", cert_path, "write constants JSON here");
    solve->add_option("--plot", plot_path, "write plot TSV here");
    solve->add_option("--summary", summary_path, "write summary text here");
    solve->add_option("--seed", cfg.rng_seed, "rng seed for runtime checks");
    solve->add_flag("--parallel", cfg.parallel, "solve blocks concurrently");

    // validate
    auto* val = app.add_subcommand("validate", "check the structural assumptions");
    std::string vproblem;
    double vtol = 1e-8;
    int vsamples = 200;
    val->add_option("--problem", vproblem, "problem JSON path")->required();
    val->add_option("--tol", vtol, "range-test tolerance");
    val->add_option("--samples", vsamples, "sampling budget");

    // certify
    auto* cert = app.add_subcommand("certify", "recompute the rate certificate from a trace");
    std::string ctrace, cconst;
    cert->add_option("--trace", ctrace, "trace CSV path")->required();
    cert->add_option("--constants", cconst, "constants JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    try {
        if (solve->parsed()) {
            if (check_str == "off")
                cfg.check_level = jadmm::CheckLevel::Off;
            else if (check_str == "cheap")
                cfg.check_level = jadmm::CheckLevel::Cheap;
            else if (check_str == "full")
                cfg.check_level = jadmm::CheckLevel::Full;
            else {
                std::cerr << "E: unknown check level '" << check_str << "'\n";
                return 4;
            }
            if (mode_str == "certified")
                cfg.mode = jadmm::RunMode::Certified;
            else if (mode_str == "practical")
                cfg.mode = jadmm::RunMode::Practical;
            else {
                std::cerr << "E: unknown mode '" << mode_str << "'\n";
                return 4;
            }
            if (bregman_str == "auto")
                cfg.bregman = jadmm::GeneratorChoice::Auto;
            else if (bregman_str == "euclidean")
                cfg.bregman = jadmm::GeneratorChoice::Euclidean;
            else if (bregman_str == "cancel_coupling")
                cfg.bregman = jadmm::GeneratorChoice::CancelCoupling;
            else {
                std::cerr << "E: unknown bregman kind '" << bregman_str << "'\n";
                return 4;
            }
            return cmd_solve(problem_path, cfg, do_auto_tune, m_list, trace_path, cert_path,
                             plot_path, summary_path);
        }
        if (val->parsed()) return cmd_validate(vproblem, vtol, vsamples);
        if (cert->parsed()) return cmd_certify(ctrace, cconst);
    } catch (const jadmm::ThetaOutOfRange& e) {
        std::cerr << "E: theta out of (0,2): " << e.what() << "\n";
        return 4;
    } catch (const jadmm::InfeasibleForBeta& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 3;
    } catch (const jadmm::UncertifiedRun& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 3;
    } catch (const jadmm::Error& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
