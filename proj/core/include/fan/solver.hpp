#pragma once

// Stage I solver: exact branch-and-bound over cell counts (LP relaxation by
// dense simplex, integer incumbents verified in exact arithmetic), the
// per-sample brute-force oracle, and the McCormick row set for the product
// terms of the per-sample formulation.

#include <array>
#include <string>
#include <vector>

#include "fan/constraints.hpp"

namespace fan {

enum class SolveStatus { Optimal, FeasibleBestEffort, Infeasible };

std::string to_string(SolveStatus s);

struct IpSolution {
    SolveStatus status{SolveStatus::Infeasible};
    CellCounts counts;
    long long objective{-1};
    std::vector<ConstraintValue> constraint_report;
    long long nodes_explored{0};
    double bound_gap{0.0};  // best-effort only: incumbent minus best open bound
    std::string note;       // infeasibility certificate / diagnostics
};

IpSolution solve(const CellTable& table, const GroupStats& stats, const GroupErrorRates& errors,
                 const ConstraintSpec& spec, const SolveOptions& options = {});

// Exhaustive search over per-sample decisions; the validation oracle for
// solve(). Evaluates every constraint directly from per-sample tallies in
// integer arithmetic, sharing no code with the LP path.
IpSolution brute_force_solve(const std::vector<int>& group, const std::vector<int>& label,
                             const std::vector<int>& pred, const GroupErrorRates& errors,
                             const ConstraintSpec& spec, int cap = 12);

// Full exact constraint report for a solution; empty violations() == feasible.
std::vector<ConstraintValue> verify_solution(const IpSolution& solution, const CellTable& table,
                                             const GroupStats& stats, const GroupErrorRates& errors,
                                             const ConstraintSpec& spec);
std::vector<ConstraintValue> violations(const std::vector<ConstraintValue>& report);

// ---------------------------------------------------------------------------
// McCormick rows for u_n = yhat_n * omega_n with yhat_n affine in f_n:
// yhat_n = pred_n + (1 - 2 pred_n) f_n.
// ---------------------------------------------------------------------------

struct McCormickRow {
    double c_omega{0}, c_f{0}, c_u{0};
    double rhs{0};
    Sense sense{Sense::LE};
};

struct LinearizedSystem {
    std::vector<int> pred;
    std::vector<std::array<McCormickRow, 4>> sample_rows;

    static int yhat_of(int pred_label, int f) { return pred_label ^ f; }
    bool rows_satisfied(size_t n, int omega, int f, int u) const;
};

LinearizedSystem mccormick_linearize(const std::vector<int>& pred_labels);

}  // namespace fan
