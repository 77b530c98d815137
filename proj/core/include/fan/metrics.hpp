#pragma once

// Evaluation of decision outputs: group accuracies conditioned on
// non-abstained samples, abstention rates, unconditioned fairness disparities
// (abstained samples count as not accepted, denominators are full group or
// group-label sizes), and no-harm margins against (1+eta_z) e_z.

#include <optional>
#include <vector>

#include "fan/constraints.hpp"
#include "fan/surrogate.hpp"

namespace fan {

struct GroupEval {
    long long size{0};
    long long nonabstained{0};
    long long correct_nonabstained{0};
    std::array<long long, 2> label_size{0, 0};
    std::array<long long, 2> nonabstained_y{0, 0};

    bool accuracy_defined() const { return nonabstained > 0; }
    Rat accuracy() const { return Rat(correct_nonabstained, nonabstained); }
    Rat abstention_rate() const { return Rat(size - nonabstained, size); }
    std::optional<Rat> abstention_rate_label(int y) const {
        if (label_size[static_cast<size_t>(y)] == 0) return std::nullopt;
        return Rat(label_size[static_cast<size_t>(y)] - nonabstained_y[static_cast<size_t>(y)],
                   label_size[static_cast<size_t>(y)]);
    }
};

struct PairDisparity {
    int z1{0}, z2{0};
    Rat dp{0};
    std::optional<Rat> tpr_gap;  // undefined when a label-1 stratum is empty
    std::optional<Rat> tnr_gap;
    std::optional<Rat> eod_avg;  // (tpr gap + tnr gap) / 2
};

struct EvalReport {
    Fairness fairness{Fairness::DP};
    std::vector<GroupEval> groups;
    std::vector<PairDisparity> pairs;
    // e'_z minus the group's non-abstained error rate; >= 0 means no harm.
    // Undefined when the whole group abstained.
    std::vector<std::optional<Rat>> no_harm_margin;

    std::optional<Rat> overall_accuracy() const;
    // largest pairwise disparity under the report's fairness notion
    std::optional<Rat> max_disparity() const;
};

std::vector<FanOutput> outputs_from_decisions(const DecisionVector& d, const std::vector<int>& pred);

EvalReport evaluate(const Dataset& d, const std::vector<FanOutput>& outputs,
                    const GroupErrorRates& baseline_errors, const ConstraintSpec& spec);

struct BaselineComparison {
    double disparity_reduction{0.0};
    std::vector<double> group_accuracy_increase;  // NaN when either side undefined
    double min_group_accuracy_increase{0.0};
};

BaselineComparison compare_to_baseline(const EvalReport& model_report, const EvalReport& baseline_report);

// flat CSV projection of a report, one row per evaluation, for sweep
// aggregation; empty fields for undefined values
std::string eval_csv_header(int n_groups);
std::string eval_csv_row(const EvalReport& r);

}  // namespace fan
