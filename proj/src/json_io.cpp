#include "jadmm/json_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace jadmm {

using nlohmann::json;

namespace {

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error("json: matrix must be a nonempty array of rows");
    size_t rows = j.size();
    size_t cols = j[0].size();
    Mat M(static_cast<Index>(rows), static_cast<Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw Error("json: ragged matrix");
        for (size_t c = 0; c < cols; ++c) M(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
    return M;
}

Vec vec_from_json(const json& j) {
    Vec v(static_cast<Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

BlockFunction fn_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadratic") {
        Mat Q = mat_from_json(j.at("Q"));
        Vec q = j.contains("q") ? vec_from_json(j.at("q")) : Vec(Vec::Zero(Q.rows()));
        double c0 = j.value("c0", 0.0);
        return BlockFunction::quadratic(std::move(Q), std::move(q), c0);
    }
    if (kind == "l1")
        return BlockFunction::l1(j.at("weight").get<double>(), j.at("dim").get<Index>());
    if (kind == "indicator_box")
        return BlockFunction::indicator_box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (kind == "indicator_finite_set") {
        std::vector<Vec> pts;
        for (const auto& pj : j.at("points")) pts.push_back(vec_from_json(pj));
        return BlockFunction::indicator_finite_set(std::move(pts));
    }
    throw Error("json: unknown or non-serializable function kind '" + kind + "'");
}

json fn_to_json(const BlockFunction& f) {
    json j;
    switch (f.kind()) {
        case FnKind::Quadratic:
            j["kind"] = "quadratic";
            j["Q"] = mat_to_json(f.quad_Q());
            j["q"] = vec_to_json(f.quad_q());
            j["c0"] = f.quad_c0();
            break;
        case FnKind::L1:
            j["kind"] = "l1";
            j["weight"] = f.l1_weight();
            j["dim"] = f.dim();
            break;
        case FnKind::IndicatorBox:
            j["kind"] = "indicator_box";
            j["lo"] = vec_to_json(f.box_lo());
            j["hi"] = vec_to_json(f.box_hi());
            break;
        case FnKind::IndicatorFiniteSet: {
            j["kind"] = "indicator_finite_set";
            json pts = json::array();
            for (const Vec& p : f.finite_points()) pts.push_back(vec_to_json(p));
            j["points"] = std::move(pts);
            break;
        }
        default:
            throw Error("json: oracle-backed function kinds are not serializable");
    }
    return j;
}

}  // namespace

Problem problem_from_json_text(const std::string& text) {
    json j = json::parse(text);
    Vec b = vec_from_json(j.at("b"));
    std::vector<Block> blocks;
    for (const auto& bj : j.at("blocks")) {
        Block blk{fn_from_json(bj.at("f")), LinOp::dense(mat_from_json(bj.at("A")))};
        blocks.push_back(std::move(blk));
    }
    std::optional<double> hint;
    if (j.contains("lower_bound_hint") && !j.at("lower_bound_hint").is_null())
        hint = j.at("lower_bound_hint").get<double>();
    return Problem(std::move(blocks), std::move(b), hint);
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return problem_from_json_text(ss.str());
}

std::string problem_to_json_text(const Problem& prob) {
    json j;
    j["b"] = vec_to_json(prob.rhs());
    json blocks = json::array();
    for (Index i = 0; i < prob.num_blocks(); ++i) {
        json bj;
        bj["A"] = mat_to_json(prob.block(i).A.dense_entries());
        bj["f"] = fn_to_json(prob.block(i).f);
        blocks.push_back(std::move(bj));
    }
    j["blocks"] = std::move(blocks);
    if (prob.lower_bound_hint())
        j["lower_bound_hint"] = *prob.lower_bound_hint();
    else
        j["lower_bound_hint"] = nullptr;
    return j.dump(2);
}

void save_problem(const std::string& path, const Problem& prob) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << problem_to_json_text(prob) << "\n";
}

}  // namespace jadmm
