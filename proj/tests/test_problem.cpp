#include <doctest.h>

#include <cmath>

#include "jadmm/problem.hpp"
#include "test_helpers.hpp"

using namespace jadmm;
using jadmm_test::make_lasso3;
using jadmm_test::make_qp2;
using jadmm_test::make_toy_nonconvex;
using jadmm_test::random_vec;

namespace {
Problem two_identity_blocks() {
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(1, 1))});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec b(1);
    b << 1.0;
    return Problem(std::move(blocks), b);
}
}  // namespace

TEST_SUITE("problem") {

TEST_CASE("objective evaluation") {
    Problem prob = two_identity_blocks();
    std::vector<Vec> x{Vec::Zero(1), Vec::Zero(1)};
    CHECK(evaluate_objective(prob, x) == doctest::Approx(0.0));

    // l1 plus quadratic
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::l1(1.0, 2), LinOp::dense(Mat::Ones(1, 2))});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec b(1);
    b << 0.0;
    Problem mixed(std::move(blocks), b);
    Vec x1(2), x2(1);
    x1 << 3.0, -1.0;
    x2 << 2.0;
    CHECK(evaluate_objective(mixed, {x1, x2}) == doctest::Approx(6.0));

    // violated box indicator
    std::vector<Block> blocks2;
    blocks2.push_back({BlockFunction::indicator_box(Vec::Zero(1), Vec::Ones(1)),
                       LinOp::dense(Mat::Identity(1, 1))});
    blocks2.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                       LinOp::dense(Mat::Identity(1, 1))});
    Problem boxed(std::move(blocks2), b);
    Vec bad(1);
    bad << 2.0;
    CHECK(std::isinf(evaluate_objective(boxed, {bad, Vec::Zero(1)})));
}

TEST_CASE("feasibility residual") {
    Problem prob = two_identity_blocks();
    Vec xa(1), xb(1);
    xa << -1.0;
    xb << 2.0;
    CHECK(feasibility_residual(prob, {xa, xb}) == doctest::Approx(0.0));
    CHECK(feasibility_residual(prob, {Vec::Zero(1), Vec::Zero(1)}) == doctest::Approx(1.0));
    Vec wrong(2);
    CHECK_THROWS_AS(feasibility_residual(prob, {wrong, xb}), DimensionMismatch);
}

TEST_CASE("feasibility residual is invariant under block permutation") {
    Problem lasso = make_lasso3();
    std::mt19937_64 rng(3);
    std::vector<Vec> x{random_vec(2, rng), random_vec(2, rng), random_vec(2, rng)};
    double base = feasibility_residual(lasso, x);

    std::vector<Block> perm_blocks;
    // swapping the first two keeps the smooth block last
    perm_blocks.push_back(lasso.blocks()[1]);
    perm_blocks.push_back(lasso.blocks()[0]);
    perm_blocks.push_back(lasso.blocks()[2]);
    Problem perm(std::move(perm_blocks), lasso.rhs());
    CHECK(feasibility_residual(perm, {x[1], x[0], x[2]}) == doctest::Approx(base));
}

TEST_CASE("construction rejects structural violations") {
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(2, 2), Vec::Zero(2)),
                      LinOp::dense(Mat::Identity(1, 2))});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(2, 2))});  // wrong row dim
    Vec b(1);
    b << 0.0;
    CHECK_THROWS_AS(Problem(std::move(blocks), b), DimensionMismatch);

    std::vector<Block> blocks2;
    blocks2.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                       LinOp::dense(Mat::Identity(1, 1))});
    blocks2.push_back({BlockFunction::l1(1.0, 1), LinOp::dense(Mat::Identity(1, 1))});
    CHECK_THROWS_AS(Problem(std::move(blocks2), b), Error);  // nonsmooth last block
}

TEST_CASE("prox oracles satisfy the local optimality test") {
    std::mt19937_64 rng(17);
    std::vector<BlockFunction> fns;
    fns.push_back(BlockFunction::l1(0.7, 3));
    fns.push_back(BlockFunction::indicator_box(-Vec::Ones(3), Vec::Ones(3)));
    std::vector<Vec> pts{random_vec(3, rng), random_vec(3, rng), random_vec(3, rng)};
    fns.push_back(BlockFunction::indicator_finite_set(pts));
    Mat Q = jadmm_test::random_mat(3, 3, rng);
    Q = Mat(0.5 * (Q + Q.transpose())) + 3.0 * Mat::Identity(3, 3);
    fns.push_back(BlockFunction::quadratic(Q, random_vec(3, rng)));

    for (const auto& f : fns) {
        for (int trial = 0; trial < 5; ++trial) {
            Vec v = random_vec(3, rng, 2.0);
            double tau = 0.1 + 2.0 * std::abs(random_vec(1, rng)(0));
            Vec z = f.prox(v, tau);
            double obj_z = tau * f.value(z) + 0.5 * (z - v).squaredNorm();
            for (int s = 0; s < 50; ++s) {
                Vec zp = f.project_domain(z + random_vec(3, rng, 0.3));
                double obj_p = tau * f.value(zp) + 0.5 * (zp - v).squaredNorm();
                CHECK(obj_z <= obj_p + 1e-9);
            }
        }
    }
}

TEST_CASE("finite-set prox resolves ties lexicographically") {
    std::vector<Vec> pts;
    Vec a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    pts.push_back(a);
    pts.push_back(b);
    BlockFunction f = BlockFunction::indicator_finite_set(pts);
    Vec mid(2);
    mid << 0.5, 0.5;  // equidistant
    Vec z = f.prox(mid, 1.0);
    CHECK(z(0) == 0.0);
    CHECK(z(1) == 1.0);
}

TEST_CASE("validate: shipped problems pass the checkable assumptions") {
    for (const Problem& prob : {make_qp2(), make_toy_nonconvex(), make_lasso3()}) {
        ValidationReport rep = validate(prob, 1e-8, 200);
        CHECK(rep.a1_range);
        CHECK(rep.a2_smooth_last);
        CHECK(rep.a2_lip_empirical <= rep.a2_lip_declared * (1.0 + 1e-6));
        CHECK(rep.a3_kind == LowerBoundEvidence::UserHint);
    }
}

TEST_CASE("validate: identity last block is surjective") {
    Problem prob = two_identity_blocks();
    ValidationReport rep = validate(prob, 1e-8, 50);
    CHECK(rep.a1_range);
}

TEST_CASE("validate: zero last-block operator fails the range condition") {
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Identity(1, 1))});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                      LinOp::dense(Mat::Zero(1, 1))});
    Vec b(1);
    b << 1.0;
    Problem prob(std::move(blocks), b);
    ValidationReport rep = validate(prob, 1e-8, 50);
    CHECK_FALSE(rep.a1_range);
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("validate: b outside the last-block range") {
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 1.0;
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(2, 2), Vec::Zero(2)),
                      LinOp::dense(D)});
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(2, 2), Vec::Zero(2)),
                      LinOp::dense(D)});
    Vec b(2);
    b << 0.0, 1.0;
    Problem prob(std::move(blocks), b);
    CHECK_FALSE(validate(prob, 1e-8, 50).a1_range);
}

TEST_CASE("validate: exact Lipschitz constant for a scaled identity Hessian") {
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(2, 2), Vec::Zero(2)),
                      LinOp::dense(Mat::Identity(1, 2))});
    blocks.push_back({BlockFunction::quadratic(2.0 * Mat::Identity(2, 2), Vec::Zero(2)),
                      LinOp::dense(Mat::Identity(1, 2))});
    Vec b(1);
    b << 0.0;
    Problem prob(std::move(blocks), b);
    ValidationReport rep = validate(prob, 1e-9, 100);
    CHECK(rep.a2_lip_empirical == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.a2_lip_declared == doctest::Approx(2.0));
}

TEST_CASE("gradient Lipschitz spot test for declared bounds") {
    std::mt19937_64 rng(23);
    Mat Q = jadmm_test::random_mat(4, 4, rng);
    Q = Mat(0.5 * (Q + Q.transpose()));
    BlockFunction f = BlockFunction::quadratic(Q, Vec::Zero(4));
    for (int s = 0; s < 100; ++s) {
        Vec x = random_vec(4, rng), y = random_vec(4, rng);
        if ((x - y).norm() == 0.0) continue;
        CHECK((f.gradient(x) - f.gradient(y)).norm() <=
              f.lip_grad() * (x - y).norm() * (1.0 + 1e-12));
    }
}

}  // TEST_SUITE
