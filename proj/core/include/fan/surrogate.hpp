#pragma once

// Stage II: the abstention block and flip block learn the canonical Stage-I
// decisions from (features, baseline score), and compose with the baseline
// into the deployed decision rule: abstain when the abstention block says 0,
// otherwise predict the (possibly flipped) thresholded baseline label.

#include <vector>

#include "fan/baseline.hpp"
#include "fan/cells.hpp"
#include "fan/mlp.hpp"

namespace fan {

struct SurrogateConfig {
    MlpConfig mlp;
    // Reweight BCE for label imbalance. On by default for the abstention
    // block, whose positive class dominates whenever delta is small; off for
    // the flip block, where weighting trades away plain accuracy on the
    // heavily overlapped flip class.
    bool ab_class_weighting{true};
    bool fb_class_weighting{false};
    bool fb_include_abstained{false};  // train the flip block on abstained rows too
};

struct TrainedSurrogate {
    Mlp net;
    double train_accuracy{0.0};
    bool constant_model{false};  // single-class labels collapsed to a constant
    std::vector<double> loss_curve;
};

// features concatenated with the baseline score (input dim = feature_dim + 1)
std::vector<std::vector<double>> augment_with_scores(const Dataset& d, const std::vector<double>& scores);

TrainedSurrogate train_ab(const std::vector<std::vector<double>>& x_aug, const std::vector<int>& omega_labels,
                          const SurrogateConfig& cfg);
TrainedSurrogate train_fb(const std::vector<std::vector<double>>& x_aug, const std::vector<int>& flip_labels,
                          const SurrogateConfig& cfg);

struct FanModel {
    BaselineModel baseline;
    Mlp ab;
    Mlp fb;
};

struct FanOutput {
    bool abstained{false};
    int label{0};  // meaningful only when !abstained
};

FanOutput fan_predict(const FanModel& fan, const Sample& s);
std::vector<FanOutput> fan_predict_all(const FanModel& fan, const Dataset& d);

struct StageTwoResult {
    FanModel model;
    TrainedSurrogate ab;
    TrainedSurrogate fb;
};

// Full stage-II training from canonical decisions on the training set.
StageTwoResult train_surrogates(const Dataset& train, const BaselineModel& baseline,
                                const DecisionVector& decisions, const SurrogateConfig& cfg);

struct CurveStats {
    std::vector<double> mean, stddev;
};

// Per-epoch mean and standard deviation across runs (truncated to the
// shortest run).
CurveStats aggregate_curves(const std::vector<std::vector<double>>& runs);

}  // namespace fan
