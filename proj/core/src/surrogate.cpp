#include "fan/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace fan {

std::vector<std::vector<double>> augment_with_scores(const Dataset& d, const std::vector<double>& scores) {
    if (scores.size() != d.size()) throw std::invalid_argument("augment_with_scores: length mismatch");
    std::vector<std::vector<double>> x;
    x.reserve(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        std::vector<double> row = d.samples[i].features;
        row.push_back(scores[i]);
        x.push_back(std::move(row));
    }
    return x;
}

namespace {

TrainedSurrogate train_block(const std::vector<std::vector<double>>& x, const std::vector<int>& labels,
                             const MlpConfig& mlp_cfg, bool class_weighting) {
    if (x.size() != labels.size()) throw std::invalid_argument("surrogate train: length mismatch");
    if (x.empty()) throw std::invalid_argument("surrogate train: empty training set");
    TrainedSurrogate out;

    long long n1 = 0;
    for (int v : labels) n1 += v;
    long long n0 = static_cast<long long>(labels.size()) - n1;
    if (n0 == 0 || n1 == 0) {
        out.net = Mlp::constant(static_cast<int>(x[0].size()), n1 > 0 ? 1 : 0);
        out.train_accuracy = 1.0;
        out.constant_model = true;
        return out;
    }

    std::vector<double> weights;
    if (class_weighting) {
        double total = static_cast<double>(labels.size());
        double w0 = total / (2.0 * static_cast<double>(n0));
        double w1 = total / (2.0 * static_cast<double>(n1));
        weights.reserve(labels.size());
        for (int v : labels) weights.push_back(v ? w1 : w0);
    }

    out.net = Mlp(static_cast<int>(x[0].size()), mlp_cfg);
    out.loss_curve = out.net.train(x, labels, weights);
    out.train_accuracy = out.net.accuracy(x, labels);
    return out;
}

}  // namespace

TrainedSurrogate train_ab(const std::vector<std::vector<double>>& x_aug, const std::vector<int>& omega_labels,
                          const SurrogateConfig& cfg) {
    return train_block(x_aug, omega_labels, cfg.mlp, cfg.ab_class_weighting);
}

TrainedSurrogate train_fb(const std::vector<std::vector<double>>& x_aug, const std::vector<int>& flip_labels,
                          const SurrogateConfig& cfg) {
    return train_block(x_aug, flip_labels, cfg.mlp, cfg.fb_class_weighting);
}

FanOutput fan_predict(const FanModel& fan, const Sample& s) {
    double sc = fan.baseline.net.score_one(s.features);
    std::vector<double> aug = s.features;
    aug.push_back(sc);
    FanOutput out;
    if (fan.ab.score_one(aug) < 0.5) {
        out.abstained = true;  // the flip block is never consulted
        return out;
    }
    int yb = sc >= fan.baseline.t0 ? 1 : 0;
    out.label = fan.fb.score_one(aug) >= 0.5 ? 1 - yb : yb;
    return out;
}

std::vector<FanOutput> fan_predict_all(const FanModel& fan, const Dataset& d) {
    std::vector<FanOutput> out;
    out.reserve(d.size());
    for (const auto& s : d.samples) out.push_back(fan_predict(fan, s));
    return out;
}

StageTwoResult train_surrogates(const Dataset& train, const BaselineModel& baseline,
                                const DecisionVector& decisions, const SurrogateConfig& cfg) {
    if (decisions.size() != train.size())
        throw std::invalid_argument("train_surrogates: decisions do not match dataset");
    std::vector<double> scores = score(baseline, train);
    auto x = augment_with_scores(train, scores);

    std::vector<int> omega(decisions.omega.begin(), decisions.omega.end());
    StageTwoResult r;
    r.ab = train_ab(x, omega, cfg);

    std::vector<std::vector<double>> x_fb;
    std::vector<int> f_fb;
    for (size_t i = 0; i < train.size(); ++i) {
        if (!cfg.fb_include_abstained && decisions.omega[i] == 0) continue;
        x_fb.push_back(x[i]);
        f_fb.push_back(decisions.flip[i]);
    }
    if (x_fb.empty()) {  // everything abstained: flip block degenerates
        r.fb.net = Mlp::constant(static_cast<int>(x[0].size()), 0);
        r.fb.train_accuracy = 1.0;
        r.fb.constant_model = true;
    } else {
        r.fb = train_fb(x_fb, f_fb, cfg);
    }

    r.model.baseline = baseline;
    r.model.ab = r.ab.net;
    r.model.fb = r.fb.net;
    return r;
}

CurveStats aggregate_curves(const std::vector<std::vector<double>>& runs) {
    CurveStats cs;
    if (runs.empty()) return cs;
    size_t len = runs[0].size();
    for (const auto& r : runs) len = std::min(len, r.size());
    for (size_t t = 0; t < len; ++t) {
        double m = 0.0;
        for (const auto& r : runs) m += r[t];
        m /= static_cast<double>(runs.size());
        double v = 0.0;
        for (const auto& r : runs) v += (r[t] - m) * (r[t] - m);
        v /= static_cast<double>(runs.size());
        cs.mean.push_back(m);
        cs.stddev.push_back(std::sqrt(v));
    }
    return cs;
}

}  // namespace fan
