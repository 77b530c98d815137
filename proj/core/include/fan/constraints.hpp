#pragma once

// Constraint system of the abstain/flip integer program: the hyperparameter
// spec, exact rational evaluation of every constraint family, and the
// integer-coefficient row form handed to the LP/branch-and-bound solver.
//
// Empirical fairness forms (unconditioned convention): disparity numerators
// count only non-abstained samples, denominators are full group (or
// group-label) sizes, so abstained samples count as not accepted.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fan/baseline.hpp"
#include "fan/cells.hpp"
#include "fan/rational.hpp"

namespace fan {

enum class Fairness { DP, EOp, EOd };

std::string to_string(Fairness f);
Fairness fairness_from_string(const std::string& s);

struct ConstraintSpec {
    Fairness fairness{Fairness::DP};
    Rat eps{0};                                  // disparity bound
    std::vector<Rat> delta;                      // per-group abstention budget
    std::vector<Rat> eta;                        // per-group no-harm slack (may be negative)
    std::optional<std::array<Rat, 2>> sigma;     // per-label abstention-gap bound
    std::optional<std::vector<Rat>> nontriviality;  // per-group error floor e_{o,z}
    // Restrict the non-triviality sum to non-abstained samples instead of the
    // literal all-samples form.
    bool nontriviality_nonabstained_only{false};

    void validate(int n_groups) const;
    bool nontriviality_literal() const {
        return nontriviality.has_value() && !nontriviality_nonabstained_only;
    }
};

enum class Sense { LE, GE };

struct ConstraintValue {
    std::string name;
    std::string family;  // disparity | abstention | no_harm | equal_abstention | non_triviality
    Rat value;
    Rat bound;
    Sense sense{Sense::LE};

    bool satisfied() const { return sense == Sense::LE ? value <= bound : value >= bound; }
    Rat slack() const { return sense == Sense::LE ? bound - value : value - bound; }
};

// Exact left-hand sides of every constraint for the given counts. Throws
// std::domain_error when a required stratum is empty (naming it).
std::vector<ConstraintValue> constraint_values(const CellCounts& counts, const CellTable& table,
                                               const GroupStats& stats, const GroupErrorRates& errors,
                                               const ConstraintSpec& spec);

// Aggregate decision tallies per group that all constraint formulas consume.
struct GroupTally {
    long long accepted{0};    // omega=1, yhat=1
    long long tp{0};          // omega=1, yhat=1, y=1
    long long tn{0};          // omega=1, yhat=0, y=0
    long long nonabst{0};     // omega=1
    long long nonabst_y[2]{0, 0};
    long long err{0};         // omega=1, yhat != y
    long long err_all{0};     // yhat != y including abstained (f on abstained counts)
};

std::vector<GroupTally> tally_counts(const CellCounts& counts, const CellTable& table);

// ---------------------------------------------------------------------------
// Integer-coefficient row form. Variables per cell are (n_keep, n_flip) and,
// under the literal non-triviality variant, n_abstain_flip; n_abstain is the
// cell remainder. All rows are "coef . x <= rhs" with integer data, bounds
// pre-rounded (floor/ceil) so integer feasibility matches the rational check
// exactly.
// ---------------------------------------------------------------------------

struct IpRow {
    std::vector<long long> coef;  // dense over variables
    i128 rhs{0};
    std::string family;
    std::string name;
};

struct IntegerProgram {
    int n_cells{0};
    int n_vars{0};
    bool has_abstain_flip_vars{false};
    std::vector<long long> objective;  // minimize objective . x
    std::vector<long long> var_upper;  // per-variable bound (cell size)
    std::vector<IpRow> rows;

    int keep_var(int cell) const { return 2 * cell; }
    int flip_var(int cell) const { return 2 * cell + 1; }
    int abstain_flip_var(int cell) const { return 2 * n_cells + cell; }
};

struct SolveOptions {
    long long node_cap{200000};
    // Probe: pin abstention counts of label-0 cells to zero. Under DP/EOp
    // this never changes the optimum (label-0 abstentions can always be
    // traded for keeps), which the property tests assert.
    bool forbid_label0_abstention{false};
    // After the optimum is found, re-solve at fixed objective minimizing total
    // abstentions (canonical, surrogate-friendlier optimum).
    bool minimize_abstentions_secondary{false};
};

IntegerProgram build_ip(const CellTable& table, const GroupStats& stats, const GroupErrorRates& errors,
                        const ConstraintSpec& spec, const SolveOptions& options = {});

// Counts from a variable assignment of the above program.
CellCounts counts_from_assignment(const IntegerProgram& ip, const CellTable& table,
                                  const std::vector<long long>& x);

}  // namespace fan
