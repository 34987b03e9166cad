#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace heatctl {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense linear program:
///   minimize    c' x
///   subject to  A x <= b,  E x = f,  lo <= x <= hi
/// with +-infinity allowed in the bounds.
struct LpProblem {
    std::size_t n = 0;
    std::vector<double> c;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<std::vector<double>> e;
    std::vector<double> f;
    std::vector<double> lo, hi;

    LpProblem() = default;
    explicit LpProblem(std::size_t num_vars)
        : n(num_vars), c(num_vars, 0.0), lo(num_vars, -kInf), hi(num_vars, kInf) {}

    std::size_t add_ineq(std::vector<double> row, double rhs);
    std::size_t add_eq(std::vector<double> row, double rhs);

    /// Throws std::invalid_argument on dimension mismatches, NaNs, or
    /// non-finite objective coefficients.
    void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::kIterationLimit;
    std::vector<double> x;
    double objective = 0.0;

    /// Lower bound from the final dual point; at optimality the gap to
    /// `objective` is at most ~1e-6 relative on well-scaled problems.
    double dual_objective = 0.0;
    std::vector<double> row_duals;  // inequality rows, then equality rows

    /// For kInfeasible / kUnbounded: the certificate (Farkas vector or
    /// improving ray) was checked against the input data.
    bool certified = false;
    int iterations = 0;
};

struct LpOptions {
    int max_iterations = 0;    // 0 = automatic: 50*(rows+cols) + 1000
    double feas_tol = 1e-7;    // absolute, per constraint row
    double opt_tol = 1e-9;     // reduced-cost threshold
};

/// Bounded-variable revised simplex (two-phase, dense basis inverse,
/// Bland's rule after a degenerate-pivot streak).
LpSolution solve_lp(const LpProblem& p, const LpOptions& options = {});

/// Plain-text dump for external cross-checking. Line 1: "min" and the
/// objective coefficients. Then one line per inequality row
/// ("coeffs... <= rhs"), per equality row ("coeffs... == rhs"), and per
/// variable bound ("bound j lo hi").
std::string dump_lp(const LpProblem& p);

}  // namespace heatctl
