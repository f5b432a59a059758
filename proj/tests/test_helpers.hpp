#pragma once

#include <random>

#include "jadmm/problem.hpp"

namespace jadmm_test {

using jadmm::Index;
using jadmm::Mat;
using jadmm::Vec;

inline Vec random_vec(Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = scale * g(rng);
    return v;
}

inline Mat random_mat(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) M(i, j) = scale * g(rng);
    return M;
}

// 1-d grid minimizer, the independent oracle for scalar subproblems.
inline double grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int coarse = 4001, int refinements = 8) {
    double best_x = lo, best_v = f(lo);
    double a = lo, b = hi;
    for (int round = 0; round < refinements; ++round) {
        double h = (b - a) / (coarse - 1);
        for (int i = 0; i < coarse; ++i) {
            double x = a + i * h;
            double v = f(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        a = best_x - h;
        b = best_x + h;
    }
    return best_x;
}

// Shipped problems, built in-memory so unit tests do not depend on files.
inline jadmm::Problem make_qp2() {
    using jadmm::Block;
    using jadmm::BlockFunction;
    using jadmm::LinOp;
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), Vec::Zero(1), 0.0),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec q2(1);
    q2 << -3.0;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), q2, 4.5),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec b(1);
    b << 1.0;
    return jadmm::Problem(std::move(blocks), b, 0.0);
}

inline jadmm::Problem make_toy_nonconvex() {
    using jadmm::Block;
    using jadmm::BlockFunction;
    using jadmm::LinOp;
    std::vector<Block> blocks;
    std::vector<Vec> pts;
    pts.push_back(Vec::Zero(1));
    pts.push_back(Vec::Ones(1));
    blocks.push_back({BlockFunction::indicator_finite_set(pts),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec q2(1);
    q2 << -0.6;
    blocks.push_back({BlockFunction::quadratic(Mat::Identity(1, 1), q2, 0.18),
                      LinOp::dense(Mat::Identity(1, 1))});
    Vec b(1);
    b << 1.0;
    return jadmm::Problem(std::move(blocks), b, 0.0);
}

inline jadmm::Problem make_lasso3() {
    using jadmm::Block;
    using jadmm::BlockFunction;
    using jadmm::LinOp;
    Mat A1(2, 2), A2(2, 2), Q2(2, 2);
    A1 << 1.0, 0.5, 0.0, 1.0;
    A2 << 1.0, 0.0, 0.3, 1.0;
    Q2 << 2.0, 0.3, 0.3, 1.5;
    Vec q3(2);
    q3 << -1.0, 0.5;
    std::vector<Block> blocks;
    blocks.push_back({BlockFunction::l1(0.1, 2), LinOp::dense(A1)});
    blocks.push_back({BlockFunction::quadratic(Q2, Vec::Zero(2), 0.0), LinOp::dense(A2)});
    blocks.push_back(
        {BlockFunction::quadratic(Mat::Identity(2, 2), q3, 0.625), LinOp::dense(Mat::Identity(2, 2))});
    Vec b(2);
    b << 0.5, 0.5;
    return jadmm::Problem(std::move(blocks), b, 0.0);
}

}  // namespace jadmm_test
