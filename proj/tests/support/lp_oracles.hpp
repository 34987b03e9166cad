#pragma once

// Test-only LP oracles: exhaustive vertex enumeration for small dense
// programs and a gridded enumeration of the open-loop control problem.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "heatctl/lp.hpp"
#include "heatctl/ocp.hpp"
#include "heatctl/rng.hpp"
#include "support/oracles.hpp"

namespace testsupport {

struct VertexOracle {
    bool feasible = false;
    double objective = 0.0;
};

inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[best][c])) best = r;
        if (std::abs(a[best][c]) < 1e-10) return false;
        std::swap(a[c], a[best]);
        std::swap(b[c], b[best]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double factor = a[r][c] / a[c][c];
            if (factor == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
            b[r] -= factor * b[c];
        }
    }
    x.resize(n);
    for (std::size_t c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
    return true;
}

/// Enumerates every basic point: all (n - #eq)-subsets of the pooled
/// inequality rows and bound rows, with the equalities always active.
inline VertexOracle enumerate_vertices(const heatctl::LpProblem& p) {
    const std::size_t n = p.n;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        rows.push_back(p.a[i]);
        rhs.push_back(p.b[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> up(n, 0.0), down(n, 0.0);
        up[j] = 1.0;
        down[j] = -1.0;
        rows.push_back(up);
        rhs.push_back(p.hi[j]);
        rows.push_back(down);
        rhs.push_back(-p.lo[j]);
    }
    const std::size_t pool = rows.size();
    const std::size_t need = n - p.e.size();
    VertexOracle result;

    auto try_combo = [&](const std::vector<std::size_t>& pick) {
        std::vector<std::vector<double>> sys;
        std::vector<double> sys_rhs;
        for (std::size_t i = 0; i < p.e.size(); ++i) {
            sys.push_back(p.e[i]);
            sys_rhs.push_back(p.f[i]);
        }
        for (std::size_t idx : pick) {
            sys.push_back(rows[idx]);
            sys_rhs.push_back(rhs[idx]);
        }
        std::vector<double> x;
        if (!solve_square(sys, sys_rhs, x)) return;
        for (std::size_t i = 0; i < pool; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += rows[i][j] * x[j];
            if (v > rhs[i] + 1e-7) return;
        }
        for (std::size_t i = 0; i < p.e.size(); ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += p.e[i][j] * x[j];
            if (std::abs(v - p.f[i]) > 1e-7) return;
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += p.c[j] * x[j];
        if (!result.feasible || obj < result.objective) {
            result.feasible = true;
            result.objective = obj;
        }
    };

    if (need == 0) {
        try_combo({});
        return result;
    }
    if (pool < need) return result;
    std::vector<std::size_t> combo(need);
    for (std::size_t i = 0; i < need; ++i) combo[i] = i;
    while (true) {
        try_combo(combo);
        std::size_t i = need;
        bool advanced = false;
        while (i > 0) {
            --i;
            if (combo[i] != i + pool - need) {
                ++combo[i];
                for (std::size_t k = i + 1; k < need; ++k) combo[k] = combo[k - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) return result;
    }
}

inline heatctl::LpProblem random_bounded_instance(heatctl::Rng& rng) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 5);
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    heatctl::LpProblem p(n);
    for (std::size_t j = 0; j < n; ++j) {
        p.c[j] = -2.0 + 4.0 * rng.uniform();
        p.lo[j] = 0.0;
        p.hi[j] = 1.0 + 4.0 * rng.uniform();
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = -1.0 + 2.0 * rng.uniform();
        p.add_ineq(std::move(row), 0.5 + 2.5 * rng.uniform());  // x = 0 stays feasible
    }
    if (rng.uniform() < 0.3) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = -1.0 + 2.0 * rng.uniform();
        p.add_eq(std::move(row), 0.0);  // passes through the feasible origin
    }
    return p;
}

/// Exhaustive gridded enumeration of the open-loop problem: q_c per step on
/// a uniform grid, temperatures chained exactly, electric power from the
/// exact piecewise map. Considers points whose temperatures stay within
/// band + slack.
inline double ocp_grid_search(const heatctl::OcpSpec& spec, int points, double band_slack) {
    const int L = spec.horizon;
    std::vector<int> idx(L, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        double t = spec.t_init;
        double obj = 0.0;
        double peak = 0.0;
        bool ok = true;
        for (int l = 0; l < L && ok; ++l) {
            const double cap = spec.eta_hat[l] * spec.p_bar + spec.p_r_bar;
            const double q = cap * idx[l] / (points - 1);
            t = spec.dynamics_a * t +
                (1.0 - spec.dynamics_a) *
                    (spec.theta_hat[l] + spec.effective_resistance * (q + spec.q_e_hat[l]));
            if (std::abs(t - spec.t_ref[l]) > spec.comfort_band + band_slack) ok = false;
            const double p = piecewise_power(q, spec.eta_hat[l], spec.p_bar);
            peak = std::max(peak, p);
            obj += spec.dt * (spec.price_energy[l] * p +
                              spec.price_discomfort[l] * std::abs(t - spec.t_ref[l]));
        }
        if (ok) best = std::min(best, obj + spec.price_demand * peak);
        int carry = L - 1;
        while (carry >= 0 && ++idx[carry] == points) idx[carry--] = 0;
        if (carry < 0) break;
    }
    return best;
}

inline heatctl::OcpSpec random_ocp_instance(heatctl::Rng& rng, int L) {
    heatctl::OcpSpec spec;
    spec.horizon = L;
    spec.dt = 1.0;
    spec.dynamics_a = 0.5 + 0.45 * rng.uniform();
    spec.effective_resistance = 0.4 + 0.6 * rng.uniform();
    spec.p_bar = 4.5;
    spec.p_r_bar = 19.2;
    spec.price_demand = rng.uniform() < 0.5 ? 0.8 * rng.uniform() : 0.0;
    spec.comfort_band = 0.5 + 2.5 * rng.uniform();
    spec.setpoint_rate_limit.reset();
    const double t_ref = 19.0 + 2.0 * rng.uniform();
    spec.t_init = t_ref;
    for (int l = 0; l < L; ++l) {
        spec.t_ref.push_back(t_ref);
        const double theta = t_ref - 8.0 + 6.0 * rng.uniform();
        spec.theta_hat.push_back(theta);
        spec.q_e_hat.push_back(std::min(
            1.5 * rng.uniform(),
            std::max(0.0, (t_ref - 1.0 - theta) / spec.effective_resistance)));
        spec.eta_hat.push_back(1.5 + 2.0 * rng.uniform());
        spec.price_energy.push_back(0.05 + 0.45 * rng.uniform());
        spec.price_discomfort.push_back(rng.uniform() < 0.3 ? 0.0 : 2.0 * rng.uniform());
    }
    return spec;
}

}  // namespace testsupport
