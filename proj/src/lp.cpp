#include "heatctl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace heatctl {

std::size_t LpProblem::add_ineq(std::vector<double> row, double rhs) {
    if (row.size() != n) throw std::invalid_argument("LpProblem: inequality row size mismatch");
    a.push_back(std::move(row));
    b.push_back(rhs);
    return a.size() - 1;
}

std::size_t LpProblem::add_eq(std::vector<double> row, double rhs) {
    if (row.size() != n) throw std::invalid_argument("LpProblem: equality row size mismatch");
    e.push_back(std::move(row));
    f.push_back(rhs);
    return e.size() - 1;
}

void LpProblem::validate() const {
    if (c.size() != n || lo.size() != n || hi.size() != n)
        throw std::invalid_argument("LpProblem: vector sizes do not match n");
    if (a.size() != b.size() || e.size() != f.size())
        throw std::invalid_argument("LpProblem: row/rhs count mismatch");
    for (double v : c)
        if (!std::isfinite(v)) throw std::invalid_argument("LpProblem: objective must be finite");
    auto check_rows = [&](const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& rhs, const char* what) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != n)
                throw std::invalid_argument(std::string("LpProblem: ") + what + " row size mismatch");
            for (double v : rows[i])
                if (std::isnan(v)) throw std::invalid_argument("LpProblem: NaN coefficient");
            if (std::isnan(rhs[i])) throw std::invalid_argument("LpProblem: NaN rhs");
        }
    };
    check_rows(a, b, "inequality");
    check_rows(e, f, "equality");
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(lo[j]) || std::isnan(hi[j]))
            throw std::invalid_argument("LpProblem: NaN bound");
        if (lo[j] > hi[j]) throw std::invalid_argument("LpProblem: lo > hi");
    }
}

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::kOptimal: return "optimal";
        case LpStatus::kInfeasible: return "infeasible";
        case LpStatus::kUnbounded: return "unbounded";
        case LpStatus::kIterationLimit: return "iteration limit";
    }
    return "unknown";
}

namespace {

enum class VarState { kBasic, kAtLower, kAtUpper, kFree };

constexpr double kPivTol = 1e-10;
constexpr double kDegenTol = 1e-12;

class Simplex {
  public:
    Simplex(const LpProblem& p, const LpOptions& opt) : p_(p), opt_(opt) {
        mi_ = p.a.size();
        me_ = p.e.size();
        rows_ = mi_ + me_;
        ns_ = p.n + mi_;        // structural + slack
        total_ = ns_ + rows_;   // + artificials
        build_columns();
        max_iterations_ = opt.max_iterations > 0
                              ? opt.max_iterations
                              : static_cast<int>(50 * (rows_ + total_) + 1000);
    }

    LpSolution run() {
        LpSolution sol;
        crash_basis();
        // Phase 1: drive the artificial infeasibility to zero.
        set_phase1_costs();
        if (!iterate(sol)) return sol;  // iteration limit
        double infeas = 0.0;
        for (std::size_t j = ns_; j < total_; ++j) infeas += std::max(0.0, x_[j]);
        if (infeas > infeasibility_threshold()) {
            sol.status = LpStatus::kInfeasible;
            sol.iterations = iterations_;
            sol.certified = verify_farkas();
            return sol;
        }
        retire_artificials();
        refactor();
        // Phase 2: optimize the real objective.
        set_phase2_costs();
        phase2_ = true;
        for (int repair = 0; repair < 3; ++repair) {
            if (!iterate(sol)) return sol;
            if (unbounded_) {
                sol.status = LpStatus::kUnbounded;
                sol.iterations = iterations_;
                sol.certified = verify_ray();
                return sol;
            }
            refactor();
            if (max_row_violation() <= opt_.feas_tol) break;
        }
        finish_optimal(sol);
        return sol;
    }

  private:
    const LpProblem& p_;
    LpOptions opt_;
    std::size_t mi_ = 0, me_ = 0, rows_ = 0, ns_ = 0, total_ = 0;
    std::vector<std::vector<double>> col_;  // total_ columns of length rows_
    std::vector<double> rhs_;
    std::vector<double> lo_, hi_, cost_, x_;
    std::vector<VarState> state_;
    std::vector<std::size_t> basis_;
    std::vector<std::vector<double>> binv_;
    std::vector<double> y_, w_;
    int iterations_ = 0;
    int pivots_since_refactor_ = 0;
    long degen_streak_ = 0;
    bool bland_ = false;
    bool phase2_ = false;
    bool unbounded_ = false;
    int max_iterations_ = 0;
    // snapshot for the unbounded ray / Farkas vector
    std::size_t ray_var_ = 0;
    double ray_dir_ = 1.0;
    std::vector<double> ray_w_;
    std::vector<double> farkas_y_;

    double infeasibility_threshold() const {
        double maxb = 0.0;
        for (double v : rhs_) maxb = std::max(maxb, std::abs(v));
        return opt_.feas_tol * (1.0 + maxb);
    }

    void build_columns() {
        col_.assign(total_, std::vector<double>(rows_, 0.0));
        rhs_.resize(rows_);
        for (std::size_t i = 0; i < mi_; ++i) {
            for (std::size_t j = 0; j < p_.n; ++j) col_[j][i] = p_.a[i][j];
            col_[p_.n + i][i] = 1.0;  // slack
            rhs_[i] = p_.b[i];
        }
        for (std::size_t i = 0; i < me_; ++i) {
            for (std::size_t j = 0; j < p_.n; ++j) col_[j][mi_ + i] = p_.e[i][j];
            rhs_[mi_ + i] = p_.f[i];
        }
        lo_.assign(total_, 0.0);
        hi_.assign(total_, kInf);
        for (std::size_t j = 0; j < p_.n; ++j) {
            lo_[j] = p_.lo[j];
            hi_[j] = p_.hi[j];
        }
        // slacks: [0, inf); artificials get their columns in crash_basis
        x_.assign(total_, 0.0);
        state_.assign(total_, VarState::kAtLower);
        cost_.assign(total_, 0.0);
    }

    void crash_basis() {
        for (std::size_t j = 0; j < ns_; ++j) {
            if (lo_[j] > -kInf && hi_[j] < kInf)
                set_nonbasic_at(j, std::abs(lo_[j]) <= std::abs(hi_[j]) ? VarState::kAtLower
                                                                        : VarState::kAtUpper);
            else if (lo_[j] > -kInf)
                set_nonbasic_at(j, VarState::kAtLower);
            else if (hi_[j] < kInf)
                set_nonbasic_at(j, VarState::kAtUpper);
            else {
                state_[j] = VarState::kFree;
                x_[j] = 0.0;
            }
        }
        std::vector<double> residual = rhs_;
        for (std::size_t j = 0; j < ns_; ++j) {
            if (x_[j] == 0.0) continue;
            for (std::size_t i = 0; i < rows_; ++i) residual[i] -= col_[j][i] * x_[j];
        }
        basis_.resize(rows_);
        binv_.assign(rows_, std::vector<double>(rows_, 0.0));
        for (std::size_t i = 0; i < rows_; ++i) {
            const double sign = residual[i] >= 0.0 ? 1.0 : -1.0;
            const std::size_t art = ns_ + i;
            col_[art].assign(rows_, 0.0);
            col_[art][i] = sign;
            x_[art] = std::abs(residual[i]);
            state_[art] = VarState::kBasic;
            basis_[i] = art;
            binv_[i][i] = sign;
        }
    }

    void set_nonbasic_at(std::size_t j, VarState s) {
        state_[j] = s;
        x_[j] = s == VarState::kAtLower ? lo_[j] : hi_[j];
    }

    void set_phase1_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t j = ns_; j < total_; ++j) cost_[j] = 1.0;
    }

    void set_phase2_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t j = 0; j < p_.n; ++j) cost_[j] = p_.c[j];
    }

    void retire_artificials() {
        // Pivot out any artificial still in the basis; rows where that is
        // impossible are redundant and keep a frozen artificial.
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < ns_) continue;
            std::size_t replacement = total_;
            for (std::size_t j = 0; j < ns_; ++j) {
                if (state_[j] == VarState::kBasic) continue;
                if (hi_[j] - lo_[j] <= 0.0) continue;
                double wi = 0.0;
                for (std::size_t k = 0; k < rows_; ++k) wi += binv_[i][k] * col_[j][k];
                if (std::abs(wi) > 1e-7) {
                    replacement = j;
                    ftran(j);
                    const std::size_t art = basis_[i];
                    pivot(i, j, x_[j]);
                    state_[art] = VarState::kAtLower;
                    x_[art] = 0.0;
                    break;
                }
            }
            if (replacement == total_) x_[basis_[i]] = 0.0;
        }
        for (std::size_t j = ns_; j < total_; ++j) {
            lo_[j] = 0.0;
            hi_[j] = 0.0;
            if (state_[j] != VarState::kBasic) {
                state_[j] = VarState::kAtLower;
                x_[j] = 0.0;
            }
        }
    }

    void compute_duals() {
        y_.assign(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t k = 0; k < rows_; ++k) y_[k] += cb * binv_[i][k];
        }
    }

    double reduced_cost(std::size_t j) const {
        double d = cost_[j];
        const std::vector<double>& cj = col_[j];
        for (std::size_t k = 0; k < rows_; ++k) d -= y_[k] * cj[k];
        return d;
    }

    void ftran(std::size_t j) {
        w_.assign(rows_, 0.0);
        const std::vector<double>& cj = col_[j];
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < rows_; ++k) s += binv_[i][k] * cj[k];
            w_[i] = s;
        }
    }

    void pivot(std::size_t row, std::size_t entering, double entering_value) {
        const double piv = w_[row];
        std::vector<double>& br = binv_[row];
        const double inv = 1.0 / piv;
        for (std::size_t k = 0; k < rows_; ++k) br[k] *= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == row) continue;
            const double factor = w_[i];
            if (factor == 0.0) continue;
            std::vector<double>& bi = binv_[i];
            for (std::size_t k = 0; k < rows_; ++k) bi[k] -= factor * br[k];
        }
        basis_[row] = entering;
        state_[entering] = VarState::kBasic;
        x_[entering] = entering_value;
        if (++pivots_since_refactor_ >= 64) refactor();
    }

    void refactor() {
        // Gauss-Jordan inverse of the current basis matrix with partial
        // pivoting, then recompute the basic values from the nonbasics.
        const std::size_t m = rows_;
        std::vector<std::vector<double>> work(m, std::vector<double>(2 * m, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            const std::vector<double>& cj = col_[basis_[i]];
            for (std::size_t r = 0; r < m; ++r) work[r][i] = cj[r];
            work[i][m + i] = 1.0;
        }
        for (std::size_t c = 0; c < m; ++c) {
            std::size_t best = c;
            for (std::size_t r = c + 1; r < m; ++r)
                if (std::abs(work[r][c]) > std::abs(work[best][c])) best = r;
            if (std::abs(work[best][c]) < 1e-13)
                throw std::runtime_error("solve_lp: singular basis during refactorization");
            std::swap(work[c], work[best]);
            const double inv = 1.0 / work[c][c];
            for (std::size_t k = c; k < 2 * m; ++k) work[c][k] *= inv;
            for (std::size_t r = 0; r < m; ++r) {
                if (r == c) continue;
                const double factor = work[r][c];
                if (factor == 0.0) continue;
                for (std::size_t k = c; k < 2 * m; ++k) work[r][k] -= factor * work[c][k];
            }
        }
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t k = 0; k < m; ++k) binv_[r][k] = work[r][m + k];
        // x_B = B^-1 (rhs - N x_N)
        std::vector<double> residual = rhs_;
        for (std::size_t j = 0; j < total_; ++j) {
            if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
            for (std::size_t i = 0; i < rows_; ++i) residual[i] -= col_[j][i] * x_[j];
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < rows_; ++k) v += binv_[i][k] * residual[k];
            x_[basis_[i]] = v;
        }
        pivots_since_refactor_ = 0;
    }

    /// Runs pivots until the current phase is optimal. Returns false when
    /// the iteration limit was hit (sol filled accordingly).
    bool iterate(LpSolution& sol) {
        unbounded_ = false;
        while (true) {
            if (iterations_ >= max_iterations_) {
                sol.status = LpStatus::kIterationLimit;
                sol.iterations = iterations_;
                sol.x.assign(p_.n, 0.0);
                for (std::size_t j = 0; j < p_.n; ++j) sol.x[j] = x_[j];
                sol.objective = std::numeric_limits<double>::quiet_NaN();
                return false;
            }
            compute_duals();
            // pricing
            std::size_t entering = total_;
            double entering_dir = 1.0;
            double best_viol = opt_.opt_tol;
            for (std::size_t j = 0; j < total_; ++j) {
                if (state_[j] == VarState::kBasic) continue;
                if (hi_[j] - lo_[j] <= 0.0) continue;
                const double d = reduced_cost(j);
                double viol = 0.0;
                double dir = 1.0;
                if (state_[j] == VarState::kAtLower && d < -opt_.opt_tol) {
                    viol = -d;
                } else if (state_[j] == VarState::kAtUpper && d > opt_.opt_tol) {
                    viol = d;
                    dir = -1.0;
                } else if (state_[j] == VarState::kFree && std::abs(d) > opt_.opt_tol) {
                    viol = std::abs(d);
                    dir = d > 0.0 ? -1.0 : 1.0;
                } else {
                    continue;
                }
                if (bland_) {
                    entering = j;
                    entering_dir = dir;
                    break;
                }
                if (viol > best_viol) {
                    best_viol = viol;
                    entering = j;
                    entering_dir = dir;
                }
            }
            if (entering == total_) return true;  // phase optimal

            ftran(entering);
            const double dir = entering_dir;

            // Ratio test over the basic variables plus the entering
            // variable's own opposite bound.
            double flip_limit = kInf;
            if (lo_[entering] > -kInf && hi_[entering] < kInf)
                flip_limit = hi_[entering] - lo_[entering];
            double t_min = flip_limit;
            std::size_t leave_row = rows_;  // rows_ = bound flip
            bool leave_at_upper = false;
            auto ratio_of = [&](std::size_t i, double& ratio, bool& at_upper) -> bool {
                const double delta = -dir * w_[i];
                const std::size_t v = basis_[i];
                if (delta < -kPivTol) {
                    if (lo_[v] <= -kInf) return false;
                    ratio = (x_[v] - lo_[v]) / (-delta);
                    at_upper = false;
                    return true;
                }
                if (delta > kPivTol) {
                    if (hi_[v] >= kInf) return false;
                    ratio = (hi_[v] - x_[v]) / delta;
                    at_upper = true;
                    return true;
                }
                return false;
            };
            for (std::size_t i = 0; i < rows_; ++i) {
                double ratio;
                bool at_upper;
                if (!ratio_of(i, ratio, at_upper)) continue;
                ratio = std::max(ratio, 0.0);
                if (ratio < t_min - 1e-12) {
                    t_min = ratio;
                    leave_row = i;
                    leave_at_upper = at_upper;
                }
            }
            // tie-break pass: stability (largest pivot) or Bland (smallest index)
            if (leave_row != rows_) {
                double best_metric = std::abs(w_[leave_row]);
                std::size_t best_index = basis_[leave_row];
                for (std::size_t i = 0; i < rows_; ++i) {
                    double ratio;
                    bool at_upper;
                    if (!ratio_of(i, ratio, at_upper)) continue;
                    ratio = std::max(ratio, 0.0);
                    if (ratio > t_min + 1e-12) continue;
                    if (bland_) {
                        if (basis_[i] < best_index) {
                            best_index = basis_[i];
                            leave_row = i;
                            leave_at_upper = at_upper;
                        }
                    } else if (std::abs(w_[i]) > best_metric) {
                        best_metric = std::abs(w_[i]);
                        leave_row = i;
                        leave_at_upper = at_upper;
                    }
                }
            }

            if (t_min >= kInf) {
                if (!phase2_)
                    throw std::runtime_error("solve_lp: unbounded phase-1 subproblem (numerical)");
                unbounded_ = true;
                ray_var_ = entering;
                ray_dir_ = dir;
                ray_w_ = w_;
                return true;
            }

            const double t = t_min;
            // apply the step
            x_[entering] += dir * t;
            for (std::size_t i = 0; i < rows_; ++i) {
                const std::size_t v = basis_[i];
                x_[v] -= dir * w_[i] * t;
            }
            if (leave_row == rows_) {
                // bound flip, no basis change
                state_[entering] =
                    state_[entering] == VarState::kAtLower ? VarState::kAtUpper : VarState::kAtLower;
                x_[entering] = state_[entering] == VarState::kAtLower ? lo_[entering] : hi_[entering];
            } else {
                const std::size_t leaving = basis_[leave_row];
                state_[leaving] = leave_at_upper ? VarState::kAtUpper : VarState::kAtLower;
                x_[leaving] = leave_at_upper ? hi_[leaving] : lo_[leaving];
                pivot(leave_row, entering, x_[entering]);
            }
            ++iterations_;
            if (t <= kDegenTol) {
                if (++degen_streak_ > static_cast<long>(5 * (rows_ + total_))) bland_ = true;
            } else {
                degen_streak_ = 0;
            }
        }
    }

    double max_row_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < mi_; ++i) {
            double v = -p_.b[i];
            for (std::size_t j = 0; j < p_.n; ++j) v += p_.a[i][j] * x_[j];
            worst = std::max(worst, v);
        }
        for (std::size_t i = 0; i < me_; ++i) {
            double v = -p_.f[i];
            for (std::size_t j = 0; j < p_.n; ++j) v += p_.e[i][j] * x_[j];
            worst = std::max(worst, std::abs(v));
        }
        return worst;
    }

    void finish_optimal(LpSolution& sol) {
        sol.status = LpStatus::kOptimal;
        sol.iterations = iterations_;
        sol.x.assign(p_.n, 0.0);
        for (std::size_t j = 0; j < p_.n; ++j) {
            double v = x_[j];
            // snap values that drifted marginally outside their box
            if (p_.lo[j] > -kInf) v = std::max(v, p_.lo[j]);
            if (p_.hi[j] < kInf) v = std::min(v, p_.hi[j]);
            sol.x[j] = v;
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < p_.n; ++j) obj += p_.c[j] * sol.x[j];
        sol.objective = obj;

        compute_duals();
        sol.row_duals = y_;
        double dual = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) dual += y_[i] * rhs_[i];
        bool dual_finite = true;
        for (std::size_t j = 0; j < ns_; ++j) {
            if (state_[j] == VarState::kBasic) continue;
            double d = reduced_cost(j);
            if (std::abs(d) <= 10.0 * opt_.opt_tol) continue;
            if (d > 0.0) {
                if (lo_[j] <= -kInf) { dual_finite = false; break; }
                dual += d * lo_[j];
            } else {
                if (hi_[j] >= kInf) { dual_finite = false; break; }
                dual += d * hi_[j];
            }
        }
        sol.dual_objective = dual_finite ? dual : -kInf;
    }

    bool verify_farkas() {
        compute_duals();  // phase-1 costs still active
        farkas_y_ = y_;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const double sign = attempt == 0 ? 1.0 : -1.0;
            double bound = 0.0;
            bool ok = true;
            for (std::size_t j = 0; j < ns_ && ok; ++j) {
                double yaj = 0.0;
                for (std::size_t k = 0; k < rows_; ++k) yaj += sign * farkas_y_[k] * col_[j][k];
                if (std::abs(yaj) <= 1e-9) continue;
                if (yaj > 0.0) {
                    if (hi_[j] >= kInf) { ok = false; break; }
                    bound += yaj * hi_[j];
                } else {
                    if (lo_[j] <= -kInf) { ok = false; break; }
                    bound += yaj * lo_[j];
                }
            }
            if (!ok) continue;
            double yb = 0.0;
            for (std::size_t k = 0; k < rows_; ++k) yb += sign * farkas_y_[k] * rhs_[k];
            if (yb - bound > 1e-9 * (1.0 + std::abs(yb))) return true;
        }
        return false;
    }

    bool verify_ray() {
        // Assemble the improving direction in original variable space.
        std::vector<double> ray(p_.n, 0.0);
        if (ray_var_ < p_.n) ray[ray_var_] = ray_dir_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t v = basis_[i];
            if (v < p_.n) ray[v] = -ray_dir_ * ray_w_[i];
        }
        double scale = 1.0;
        for (double v : ray) scale = std::max(scale, std::abs(v));
        double cray = 0.0;
        for (std::size_t j = 0; j < p_.n; ++j) cray += p_.c[j] * ray[j];
        if (!(cray < -1e-12)) return false;
        for (std::size_t i = 0; i < mi_; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < p_.n; ++j) v += p_.a[i][j] * ray[j];
            // account for an entering slack loosening its own row
            if (ray_var_ == p_.n + i) v += ray_dir_;
            if (v > 1e-7 * scale) return false;
        }
        for (std::size_t i = 0; i < me_; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < p_.n; ++j) v += p_.e[i][j] * ray[j];
            if (std::abs(v) > 1e-7 * scale) return false;
        }
        for (std::size_t j = 0; j < p_.n; ++j) {
            if (p_.lo[j] > -kInf && ray[j] < -1e-9 * scale) return false;
            if (p_.hi[j] < kInf && ray[j] > 1e-9 * scale) return false;
        }
        return true;
    }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, const LpOptions& options) {
    p.validate();
    Simplex solver(p, options);
    return solver.run();
}

std::string dump_lp(const LpProblem& p) {
    std::string out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out += buf;
    };
    out += "min";
    for (double v : p.c) {
        out += ' ';
        num(v);
    }
    out += '\n';
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        for (std::size_t j = 0; j < p.n; ++j) {
            if (j) out += ' ';
            num(p.a[i][j]);
        }
        out += " <= ";
        num(p.b[i]);
        out += '\n';
    }
    for (std::size_t i = 0; i < p.e.size(); ++i) {
        for (std::size_t j = 0; j < p.n; ++j) {
            if (j) out += ' ';
            num(p.e[i][j]);
        }
        out += " == ";
        num(p.f[i]);
        out += '\n';
    }
    for (std::size_t j = 0; j < p.n; ++j) {
        out += "bound " + std::to_string(j) + ' ';
        num(p.lo[j]);
        out += ' ';
        num(p.hi[j]);
        out += '\n';
    }
    return out;
}

}  // namespace heatctl
