#include "jadmm/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace jadmm {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows, int p) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open trace file: " + path);
    out << "k,L_aug,eta,L_hat,feas";
    for (int i = 1; i <= p; ++i) out << ",stat_res_" << i;
    for (int i = 1; i <= p; ++i) out << ",norm_dx_" << i;
    out << ",norm_dlambda,theta_lambda,u_norm"
        << ",check_descent,check_dualrec,check_thetabound,check_potdescent,check_floor,"
           "check_feasid\n";
    for (const TraceRow& r : rows) {
        out << r.k << ',' << fmt(r.L_aug) << ',' << fmt(r.eta) << ',' << fmt(r.L_hat) << ','
            << fmt(r.feas);
        for (double v : r.stat_res) out << ',' << fmt(v);
        for (double v : r.norm_dx) out << ',' << fmt(v);
        out << ',' << fmt(r.norm_dlambda) << ',' << fmt(r.theta_lambda) << ',' << fmt(r.u_norm)
            << ',' << (r.check_descent ? 1 : 0) << ',' << (r.check_dualrec ? 1 : 0) << ','
            << (r.check_thetabound ? 1 : 0) << ',' << (r.check_potdescent ? 1 : 0) << ','
            << (r.check_floor ? 1 : 0) << ',' << (r.check_feasid ? 1 : 0) << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(const std::string& path, int* p_out) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw Error("empty trace file: " + path);
    int p = 0;
    {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ','))
            if (col.rfind("stat_res_", 0) == 0) ++p;
    }
    if (p <= 0) throw Error("trace file has no stat_res columns: " + path);
    if (p_out) *p_out = p;

    std::vector<TraceRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string tok;
        auto next = [&]() -> double {
            if (!std::getline(ls, tok, ',')) throw Error("truncated trace row");
            return std::stod(tok);
        };
        TraceRow r;
        r.k = static_cast<int>(next());
        r.L_aug = next();
        r.eta = next();
        r.L_hat = next();
        r.feas = next();
        r.stat_res.resize(static_cast<size_t>(p));
        for (int i = 0; i < p; ++i) r.stat_res[static_cast<size_t>(i)] = next();
        r.norm_dx.resize(static_cast<size_t>(p));
        for (int i = 0; i < p; ++i) r.norm_dx[static_cast<size_t>(i)] = next();
        r.norm_dlambda = next();
        r.theta_lambda = next();
        r.u_norm = next();
        r.check_descent = next() != 0.0;
        r.check_dualrec = next() != 0.0;
        r.check_thetabound = next() != 0.0;
        r.check_potdescent = next() != 0.0;
        r.check_floor = next() != 0.0;
        r.check_feasid = next() != 0.0;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_constants_json(const std::string& path, const RateConstants& c) {
    json j;
    j["p"] = c.p;
    j["beta"] = c.beta;
    j["theta"] = c.theta;
    j["alpha"] = c.alpha;
    j["gamma_theta"] = c.gamma_theta;
    j["c1"] = c.c1;
    j["delta"] = c.delta;
    j["delta_lambda"] = c.delta_lambda;
    j["sigma_plus_p"] = c.sigma_plus_p;
    j["norm_Ap_sq"] = c.norm_Ap_sq;
    j["norm_Ap_adj_sq"] = c.norm_Ap_adj_sq;
    j["max_Al_sq"] = c.max_Al_sq;
    j["lip_p"] = c.lip_p;
    j["m"] = c.m;
    j["M"] = c.M;
    j["res_bound_factor"] = c.res_bound_factor;
    j["eta0"] = c.eta0;
    j["delta_L0"] = c.delta_L0;
    j["v_lb"] = c.v_lb;
    j["v_lb_is_hint"] = c.v_lb_is_hint;
    j["certified"] = c.certified;
    std::ofstream out(path);
    if (!out) throw Error("cannot open constants file: " + path);
    out << j.dump(2) << "\n";
}

RateConstants read_constants_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open constants file: " + path);
    json j = json::parse(in);
    RateConstants c;
    c.p = j.at("p").get<int>();
    c.beta = j.at("beta").get<double>();
    c.theta = j.at("theta").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.gamma_theta = j.at("gamma_theta").get<double>();
    c.c1 = j.at("c1").get<double>();
    c.delta = j.at("delta").get<std::vector<double>>();
    c.delta_lambda = j.at("delta_lambda").get<double>();
    c.sigma_plus_p = j.at("sigma_plus_p").get<double>();
    c.norm_Ap_sq = j.at("norm_Ap_sq").get<double>();
    c.norm_Ap_adj_sq = j.at("norm_Ap_adj_sq").get<double>();
    c.max_Al_sq = j.at("max_Al_sq").get<double>();
    c.lip_p = j.at("lip_p").get<double>();
    c.m = j.at("m").get<std::vector<double>>();
    c.M = j.at("M").get<std::vector<double>>();
    c.res_bound_factor = j.at("res_bound_factor").get<std::vector<double>>();
    c.eta0 = j.at("eta0").get<double>();
    c.delta_L0 = j.at("delta_L0").get<double>();
    c.v_lb = j.at("v_lb").get<double>();
    c.v_lb_is_hint = j.at("v_lb_is_hint").get<bool>();
    c.certified = j.at("certified").get<bool>();
    return c;
}

void write_plotdata_tsv(const std::string& path, const std::vector<TraceRow>& rows,
                        const RateConstants& c) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open plotdata file: " + path);
    out << "k\tsqrt_k_times_min_residual\ttheorem_bound\n";
    double best = std::numeric_limits<double>::infinity();
    double factor = 0.0;
    for (double f : c.res_bound_factor) factor = std::max(factor, f);
    // the bound column only exists for certified runs
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (c.certified && c.v_lb_is_hint && c.delta_L0 >= 0.0) {
        double disp = std::sqrt(2.0 * c.delta_L0 / c.min_delta());
        bound = std::max(factor * disp,
                         std::sqrt(2.0 * c.delta_L0 / c.delta_lambda) / (c.beta * c.theta));
    }
    for (const TraceRow& r : rows) {
        double maxres = r.feas;
        for (double s : r.stat_res) maxres = std::max(maxres, s);
        best = std::min(best, maxres);
        out << r.k << '\t' << fmt(std::sqrt(static_cast<double>(r.k)) * best) << '\t'
            << fmt(bound) << '\n';
    }
}

void write_certificate_json(const std::string& path, const RateCertificate& cert,
                            const RateConstants& c) {
    json j;
    j["delta_L0"] = cert.delta_L0;
    j["all_hold"] = cert.all_hold;
    j["certified"] = c.certified;
    json per = json::array();
    for (const auto& pk : cert.per_k) {
        per.push_back({{"k", pk.k},
                       {"witnessed_j", pk.witnessed_j},
                       {"res_bound", pk.res_bound},
                       {"feas_bound", pk.feas_bound},
                       {"min_margin", pk.min_margin},
                       {"sum_margin", pk.sum_margin}});
    }
    j["per_k"] = std::move(per);
    std::ofstream out(path);
    if (!out) throw Error("cannot open certificate file: " + path);
    out << j.dump(2) << "\n";
}

std::string summarize_run(const std::vector<TraceRow>& rows, const RateConstants& c) {
    std::ostringstream os;
    os << "iterations: " << rows.size() << "\n";
    if (!rows.empty()) {
        const TraceRow& last = rows.back();
        double maxres = last.feas;
        for (double s : last.stat_res) maxres = std::max(maxres, s);
        os << "final feasibility: " << last.feas << "\n";
        os << "final max residual: " << maxres << "\n";
        os << "final L_hat: " << last.L_hat << "\n";
    }
    os << "mode: " << (c.certified ? "certified" : "practical") << "\n";
    if (c.certified) {
        os << "min delta: " << c.min_delta() << ", delta_lambda: " << c.delta_lambda << "\n";
        os << "delta_L0: " << c.delta_L0 << "\n";
    }
    return os.str();
}

}  // namespace jadmm
