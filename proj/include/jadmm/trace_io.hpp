#pragma once

#include <string>
#include <vector>

#include "jadmm/diagnostics.hpp"

namespace jadmm {

/// Columns, in stable order:
/// k, L_aug, eta, L_hat, feas, stat_res_1..p, norm_dx_1..p, norm_dlambda,
/// theta_lambda, u_norm, check_descent, check_dualrec, check_thetabound,
/// check_potdescent, check_floor, check_feasid  (booleans as 0/1).
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows, int p);
std::vector<TraceRow> read_trace_csv(const std::string& path, int* p_out = nullptr);

void write_constants_json(const std::string& path, const RateConstants& c);
RateConstants read_constants_json(const std::string& path);

/// Columns: k, sqrt_k_times_min_residual, theorem_bound. The residual is the
/// best max-residual up to k; the bound is the theorem constant, so the
/// second column staying below the third is the O(1/sqrt(k)) statement.
void write_plotdata_tsv(const std::string& path, const std::vector<TraceRow>& rows,
                        const RateConstants& c);

void write_certificate_json(const std::string& path, const RateCertificate& cert,
                            const RateConstants& c);

std::string summarize_run(const std::vector<TraceRow>& rows, const RateConstants& c);

}  // namespace jadmm
