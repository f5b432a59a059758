#pragma once

#include <string>

#include "jadmm/problem.hpp"

namespace jadmm {

/// Problem JSON schema:
///   {"b": [...],
///    "blocks": [{"A": [[...], ...], "f": {"kind": "...", ...}}, ...],
///    "lower_bound_hint": number|null}
/// Matrices are row-major arrays of rows; numbers are IEEE doubles.
/// Serializable f kinds: quadratic {Q, q, c0}, l1 {weight, dim},
/// indicator_box {lo, hi}, indicator_finite_set {points}. Oracle-backed
/// kinds exist only in the library API.
Problem load_problem(const std::string& path);
Problem problem_from_json_text(const std::string& text);
std::string problem_to_json_text(const Problem& prob);
void save_problem(const std::string& path, const Problem& prob);

}  // namespace jadmm
