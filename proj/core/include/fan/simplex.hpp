#pragma once

// Dense two-phase simplex for  min c.x  s.t.  A x <= b, x >= 0.
// Templated on the scalar: double with a small pivot tolerance for the
// branch-and-bound workhorse, exact Rat with zero tolerance as the arbiter
// for infeasibility proofs and borderline nodes. Dantzig pricing with a
// permanent switch to Bland's rule after a stall budget, so termination is
// guaranteed for both scalar types.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fan/rational.hpp"

namespace fan {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
    LpStatus status{LpStatus::Infeasible};
    T objective{};
    std::vector<T> x;  // on Infeasible: the phase-I point (least total violation)
};

template <class T>
class Simplex {
public:
    // A: m x n, rows as <=
    Simplex(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const std::vector<T>& c, T eps)
        : eps_(eps), m_(a.size()), n_(c.size()), cost_(c) {
        // columns: n structural, m slack, up to m artificial, then rhs
        art_of_row_.assign(m_, -1);
        size_t n_art = 0;
        for (size_t i = 0; i < m_; ++i)
            if (b[i] < T(0)) ++n_art;
        cols_ = n_ + m_ + n_art;
        tab_.assign(m_, std::vector<T>(cols_ + 1, T(0)));
        basis_.assign(m_, 0);
        size_t art = n_ + m_;
        for (size_t i = 0; i < m_; ++i) {
            bool neg = b[i] < T(0);
            for (size_t j = 0; j < n_; ++j) tab_[i][j] = neg ? -a[i][j] : a[i][j];
            tab_[i][n_ + i] = neg ? T(-1) : T(1);
            tab_[i][cols_] = neg ? -b[i] : b[i];
            if (neg) {
                tab_[i][art] = T(1);
                basis_[i] = art;
                art_of_row_[i] = static_cast<long long>(art);
                ++art;
            } else {
                basis_[i] = n_ + i;
            }
        }
        first_art_ = n_ + m_;
    }

    LpResult<T> solve() {
        LpResult<T> res;
        // phase I: minimize sum of artificials
        if (first_art_ < cols_) {
            std::vector<T> phase1(cols_, T(0));
            for (size_t j = first_art_; j < cols_; ++j) phase1[j] = T(1);
            T p1 = run(phase1, /*allow_art=*/true);
            if (p1 > eps_) {
                res.status = LpStatus::Infeasible;
                res.x = extract();
                res.objective = p1;
                return res;
            }
            // drive remaining artificials out of the basis where possible
            for (size_t i = 0; i < m_; ++i) {
                if (basis_[i] < first_art_) continue;
                size_t piv = cols_;
                for (size_t j = 0; j < first_art_; ++j) {
                    T v = tab_[i][j] < T(0) ? -tab_[i][j] : tab_[i][j];
                    if (v > eps_) {
                        piv = j;
                        break;
                    }
                }
                if (piv < cols_) pivot(i, piv);
                // else: redundant row; the artificial stays basic at zero and
                // phase II never prices artificial columns back in
            }
        }
        std::vector<T> full_cost(cols_, T(0));
        for (size_t j = 0; j < n_; ++j) full_cost[j] = cost_[j];
        T obj = run(full_cost, /*allow_art=*/false);
        if (unbounded_) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        res.status = LpStatus::Optimal;
        res.objective = obj;
        res.x = extract();
        return res;
    }

private:
    T eps_;
    size_t m_, n_, cols_{0}, first_art_{0};
    std::vector<std::vector<T>> tab_;
    std::vector<size_t> basis_;
    std::vector<long long> art_of_row_;
    std::vector<T> cost_;
    bool unbounded_{false};

    std::vector<T> extract() const {
        std::vector<T> x(n_, T(0));
        for (size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = tab_[i][cols_];
        return x;
    }

    void pivot(size_t r, size_t s) {
        T inv = T(1) / tab_[r][s];
        for (size_t j = 0; j <= cols_; ++j) tab_[r][j] = tab_[r][j] * inv;
        tab_[r][s] = T(1);  // kill residual rounding on the pivot itself
        for (size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            T f = tab_[i][s];
            if (f == T(0)) continue;
            for (size_t j = 0; j <= cols_; ++j) tab_[i][j] = tab_[i][j] - f * tab_[r][j];
            tab_[i][s] = T(0);
        }
        basis_[r] = s;
    }

    // minimize cost over current tableau; returns objective value
    T run(const std::vector<T>& cost, bool allow_art) {
        unbounded_ = false;
        size_t limit = allow_art ? cols_ : first_art_;
        size_t stall_budget = 16 * (m_ + cols_ + 8);
        bool bland = false;
        for (size_t iter = 0;; ++iter) {
            if (iter > stall_budget) bland = true;
            if (iter > 64 * stall_budget) throw std::runtime_error("simplex: iteration limit exceeded");

            // reduced costs: r_j = cost_j - cost_B . column_j
            size_t enter = cols_;
            T best_rc = -eps_;
            for (size_t j = 0; j < limit; ++j) {
                bool basic = false;
                for (size_t i = 0; i < m_; ++i)
                    if (basis_[i] == j) {
                        basic = true;
                        break;
                    }
                if (basic) continue;
                T rc = cost[j];
                for (size_t i = 0; i < m_; ++i) {
                    if (cost[basis_[i]] != T(0)) rc = rc - cost[basis_[i]] * tab_[i][j];
                }
                if (bland) {
                    if (rc < -eps_) {
                        enter = j;
                        break;
                    }
                } else if (rc < best_rc) {
                    best_rc = rc;
                    enter = j;
                }
            }
            if (enter == cols_) break;  // optimal

            size_t leave = m_;
            T best_ratio{};
            for (size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] > eps_) {
                    T ratio = tab_[i][cols_] / tab_[i][enter];
                    if (leave == m_ || ratio < best_ratio ||
                        (ratio == best_ratio && basis_[i] < basis_[leave])) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m_) {
                unbounded_ = true;
                return T(0);
            }
            pivot(leave, enter);
        }
        T obj{};
        for (size_t i = 0; i < m_; ++i)
            if (cost[basis_[i]] != T(0)) obj = obj + cost[basis_[i]] * tab_[i][cols_];
        return obj;
    }
};

template <class T>
LpResult<T> solve_lp(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const std::vector<T>& c,
                     T eps) {
    Simplex<T> s(a, b, c, eps);
    return s.solve();
}

}  // namespace fan
