#pragma once

// Closed-form feasibility analysis: the exact DP threshold on the
// higher-qualification group's abstention budget, the always-feasible
// results for EOp/EOd, the sufficient condition under equal-abstention
// constraints, the non-triviality interval under EOp, and a grid sweep that
// cross-validates every formula against the solver.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fan/solver.hpp"

namespace fan {

struct FeasibilityInputs {
    std::vector<double> tau;    // qualification rate per group
    std::vector<double> e;      // baseline error rate per group
    std::vector<double> eta;    // no-harm slack per group
    std::vector<double> delta;  // abstention budget per group
    double eps{0.0};
    std::optional<double> sigma1;  // positive-label abstention-gap bound

    int n_groups() const { return static_cast<int>(tau.size()); }
    double e_prime(int z) const {
        double v = (1.0 + eta[static_cast<size_t>(z)]) * e[static_cast<size_t>(z)];
        return std::min(1.0, std::max(0.0, v));
    }
    double a_prime(int z) const { return 1.0 - e_prime(z); }
};

FeasibilityInputs inputs_from(const GroupStats& stats, const GroupErrorRates& errors,
                              const ConstraintSpec& spec);

// Minimum admissible delta for the higher-qualification group of the ordered
// pair; may be <= 0 (no restriction). Returns -infinity when a'_hi = 0
// (always feasible for this pair).
double dp_min_delta(const FeasibilityInputs& in, int hi, int lo);

struct PairCondition {
    int hi{0}, lo{0};
    double min_delta{0.0};
    bool degenerate{false};  // a'_hi = 0
    bool satisfied{true};
};

struct DpReport {
    bool feasible{true};
    std::vector<PairCondition> pairs;
};

DpReport dp_feasible(const FeasibilityInputs& in);

bool eop_feasible(const FeasibilityInputs& in);
bool eod_feasible(const FeasibilityInputs& in);

// Sufficient (not necessary) condition for DP with the sigma_1 equal-
// abstention constraint, on the ordered pair (hi, lo).
bool dp_equal_abstention_sufficient(const FeasibilityInputs& in, int hi, int lo);

struct DeltaInterval {
    double lo{0.0}, hi{1.0};
    bool degenerate{false};  // 1 - (1+eta)e = 0, third bound skipped
    bool empty() const { return lo > hi + 1e-15; }
};

// Admissible delta interval under EOp with the non-triviality floor e_o = e.
DeltaInterval eop_nontrivial_bounds(double e, double eta, double tau);

struct SweepPoint {
    double eps{0.0}, delta{0.0}, eta{0.0};
    std::optional<double> sigma;
    bool formula_feasible{false};
    SolveStatus solver_status{SolveStatus::Infeasible};
    long long objective{-1};
    bool disagree{false};
    double margin{0.0};  // one-sample granularity 1/min_z N_z
};

// Formula verdict vs solver verdict on a finite grid. eta/sigma grids may be
// empty (treated as {0} / no sigma constraint).
std::vector<SweepPoint> sweep_feasibility(const std::vector<double>& eps_grid,
                                          const std::vector<double>& delta_grid,
                                          const std::vector<double>& eta_grid,
                                          const std::vector<double>& sigma_grid, const CellTable& table,
                                          const GroupStats& stats, const GroupErrorRates& errors,
                                          Fairness fairness);

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

}  // namespace fan
