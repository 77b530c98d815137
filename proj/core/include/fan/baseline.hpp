#pragma once

// Baseline classifier h: confidence scores S = h(X), thresholded predictions
// yhat_b = 1[S >= t0], and exact per-group error rates e_z.

#include <vector>

#include "fan/dataset.hpp"
#include "fan/mlp.hpp"
#include "fan/rational.hpp"

namespace fan {

struct BaselineModel {
    Mlp net;
    double t0{0.5};
    double train_accuracy{0.0};
};

BaselineModel train_baseline(const Dataset& train, const MlpConfig& cfg, double t0 = 0.5);

std::vector<double> score(const BaselineModel& model, const Dataset& d);

std::vector<int> predicted_labels(const std::vector<double>& scores, double t0);

// Per-group error counts of the baseline, kept as integers so e_z and the
// no-harm bound (1+eta_z) e_z stay exact ratios.
struct GroupErrorRates {
    std::vector<long long> errors;
    std::vector<long long> sizes;

    int n_groups() const { return static_cast<int>(sizes.size()); }
    Rat e(int z) const { return Rat(errors[static_cast<size_t>(z)], sizes[static_cast<size_t>(z)]); }
    // (1 + eta_z) e_z clamped into [0,1]
    Rat e_prime(int z, const Rat& eta) const { return clamp01((Rat(1) + eta) * e(z)); }
};

GroupErrorRates group_error_rates(const Dataset& d, const std::vector<int>& pred);

}  // namespace fan
