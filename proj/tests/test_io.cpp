#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "jadmm/json_io.hpp"
#include "jadmm/solver.hpp"
#include "jadmm/trace_io.hpp"
#include "test_helpers.hpp"

using namespace jadmm;

namespace {
std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("problem JSON round trip is bit exact") {
    Problem orig = jadmm_test::make_lasso3();
    std::string text = problem_to_json_text(orig);
    Problem back = problem_from_json_text(text);
    REQUIRE(back.num_blocks() == orig.num_blocks());
    for (Index i = 0; i < orig.num_blocks(); ++i) {
        const Mat& a = orig.block(i).A.dense_entries();
        const Mat& b = back.block(i).A.dense_entries();
        REQUIRE(a.rows() == b.rows());
        REQUIRE(a.cols() == b.cols());
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        CHECK(orig.block(i).f.kind() == back.block(i).f.kind());
    }
    CHECK((orig.rhs() - back.rhs()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(orig.lower_bound_hint() == back.lower_bound_hint());

    // doubles with long mantissas survive the round trip exactly
    Mat Q(1, 1);
    Q << 0.1 + 1e-17;
    Vec q(1);
    q << -1.0 / 3.0;
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Q, q, 0.3333333333333333),
                      LinOp::dense(Mat::Constant(1, 1, 1.0 / 7.0))});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec b(1);
    b << 2.0 / 3.0;
    Problem tricky(std::move(blocks), b);
    Problem tricky_back = problem_from_json_text(problem_to_json_text(tricky));
    CHECK(tricky_back.block(0).A.dense_entries()(0, 0) == 1.0 / 7.0);
    CHECK(tricky_back.block(0).f.quad_q()(0) == -1.0 / 3.0);
    CHECK(tricky_back.rhs()(0) == 2.0 / 3.0);
}

TEST_CASE("unknown function kinds are rejected") {
    CHECK_THROWS_AS(
        problem_from_json_text(R"({"b":[1.0],"blocks":[
            {"A":[[1.0]],"f":{"kind":"mystery"}},
            {"A":[[1.0]],"f":{"kind":"quadratic","Q":[[1.0]],"q":[0.0]}}]})"),
        Error);
}

TEST_CASE("trace CSV round trip preserves rows") {
    Problem prob = jadmm_test::make_qp2();
    SolverConfig cfg;
    cfg.beta = 10.0;
    cfg.max_iter = 40;
    cfg.rho_tol = 0.0;
    RunResult res = run(prob, cfg);
    std::vector<TraceRow> rows;
    for (const auto& rec : res.trace) rows.push_back(to_row(rec));

    std::string path = tmp_path("jadmm_trace_test.csv");
    write_trace_csv(path, rows, res.constants.p);
    int p = 0;
    auto back = read_trace_csv(path, &p);
    REQUIRE(p == res.constants.p);
    REQUIRE(back.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].k == rows[i].k);
        CHECK(back[i].L_aug == rows[i].L_aug);
        CHECK(back[i].L_hat == rows[i].L_hat);
        CHECK(back[i].feas == rows[i].feas);
        CHECK(back[i].norm_dlambda == rows[i].norm_dlambda);
        for (int j = 0; j < p; ++j) {
            CHECK(back[i].stat_res[static_cast<size_t>(j)] ==
                  rows[i].stat_res[static_cast<size_t>(j)]);
            CHECK(back[i].norm_dx[static_cast<size_t>(j)] ==
                  rows[i].norm_dx[static_cast<size_t>(j)]);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("constants JSON round trip") {
    Problem prob = jadmm_test::make_qp2();
    SolverConfig cfg = auto_tune(prob, 100.0, 1.3);
    cfg.max_iter = 10;
    cfg.rho_tol = 0.0;
    RunResult res = run(prob, cfg);
    std::string path = tmp_path("jadmm_constants_test.json");
    write_constants_json(path, res.constants);
    RateConstants back = read_constants_json(path);
    CHECK(back.p == res.constants.p);
    CHECK(back.beta == res.constants.beta);
    CHECK(back.theta == res.constants.theta);
    CHECK(back.gamma_theta == res.constants.gamma_theta);
    CHECK(back.c1 == res.constants.c1);
    CHECK(back.delta == res.constants.delta);
    CHECK(back.delta_lambda == res.constants.delta_lambda);
    CHECK(back.eta0 == res.constants.eta0);
    CHECK(back.delta_L0 == res.constants.delta_L0);
    CHECK(back.certified == res.constants.certified);
    CHECK(back.res_bound_factor == res.constants.res_bound_factor);
    std::remove(path.c_str());
}

TEST_CASE("certificate recomputed from a stored certified trace holds") {
    Problem prob = jadmm_test::make_toy_nonconvex();
    SolverConfig cfg = auto_tune(prob, 100.0, 1.0);
    cfg.max_iter = 120;
    cfg.rho_tol = 0.0;
    RunResult res = run(prob, cfg);
    std::vector<TraceRow> rows;
    for (const auto& rec : res.trace) rows.push_back(to_row(rec));

    std::string tpath = tmp_path("jadmm_cert_trace.csv");
    std::string cpath = tmp_path("jadmm_cert_constants.json");
    write_trace_csv(tpath, rows, res.constants.p);
    write_constants_json(cpath, res.constants);

    auto rows_back = read_trace_csv(tpath);
    RateConstants c_back = read_constants_json(cpath);
    RateCertificate cert = rate_certificate(rows_back, c_back);
    CHECK(cert.all_hold);

    // truncated to a single iteration: the witness is that iteration
    std::vector<TraceRow> one(rows_back.begin(), rows_back.begin() + 1);
    RateCertificate c1 = rate_certificate(one, c_back);
    CHECK(c1.all_hold);
    CHECK(c1.per_k.size() == 1);
    CHECK(c1.per_k[0].witnessed_j == 1);

    std::remove(tpath.c_str());
    std::remove(cpath.c_str());
}

TEST_CASE("serial replay produces identical trace bytes") {
    Problem prob = jadmm_test::make_qp2();
    SolverConfig cfg;
    cfg.beta = 10.0;
    cfg.max_iter = 60;
    cfg.rho_tol = 0.0;
    cfg.rng_seed = 42;
    auto dump = [&](const std::string& path) {
        RunResult res = run(prob, cfg);
        std::vector<TraceRow> rows;
        for (const auto& rec : res.trace) rows.push_back(to_row(rec));
        write_trace_csv(path, rows, res.constants.p);
    };
    std::string p1 = tmp_path("jadmm_replay_1.csv"), p2 = tmp_path("jadmm_replay_2.csv");
    dump(p1);
    dump(p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK_FALSE(s1.empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

}  // TEST_SUITE
