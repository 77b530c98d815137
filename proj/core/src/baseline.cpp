#include "fan/baseline.hpp"

#include <stdexcept>

namespace fan {

namespace {

std::vector<std::vector<double>> feature_matrix(const Dataset& d) {
    std::vector<std::vector<double>> x;
    x.reserve(d.size());
    for (const auto& s : d.samples) x.push_back(s.features);
    return x;
}

std::vector<int> label_vector(const Dataset& d) {
    std::vector<int> y;
    y.reserve(d.size());
    for (const auto& s : d.samples) y.push_back(s.label);
    return y;
}

}  // namespace

BaselineModel train_baseline(const Dataset& train, const MlpConfig& cfg, double t0) {
    if (t0 <= 0.0 || t0 >= 1.0) throw std::domain_error("train_baseline: t0 must lie in (0,1)");
    if (train.samples.empty()) throw std::invalid_argument("train_baseline: empty training set");

    BaselineModel m;
    m.t0 = t0;
    m.net = Mlp(train.feature_dim, cfg);
    auto x = feature_matrix(train);
    auto y = label_vector(train);
    m.net.train(x, y);
    m.train_accuracy = m.net.accuracy(x, y, t0);
    return m;
}

std::vector<double> score(const BaselineModel& model, const Dataset& d) {
    std::vector<double> s;
    s.reserve(d.size());
    for (const auto& sample : d.samples) s.push_back(model.net.score_one(sample.features));
    return s;
}

std::vector<int> predicted_labels(const std::vector<double>& scores, double t0) {
    if (t0 <= 0.0 || t0 >= 1.0) throw std::domain_error("predicted_labels: t0 must lie in (0,1)");
    std::vector<int> p;
    p.reserve(scores.size());
    for (double s : scores) p.push_back(s >= t0 ? 1 : 0);
    return p;
}

GroupErrorRates group_error_rates(const Dataset& d, const std::vector<int>& pred) {
    if (pred.size() != d.size()) throw std::invalid_argument("group_error_rates: length mismatch");
    GroupErrorRates g;
    g.errors.assign(static_cast<size_t>(d.n_groups), 0);
    g.sizes.assign(static_cast<size_t>(d.n_groups), 0);
    for (size_t i = 0; i < d.size(); ++i) {
        const Sample& s = d.samples[i];
        ++g.sizes[static_cast<size_t>(s.group)];
        if (pred[i] != s.label) ++g.errors[static_cast<size_t>(s.group)];
    }
    for (int z = 0; z < d.n_groups; ++z)
        if (g.sizes[static_cast<size_t>(z)] == 0)
            throw std::domain_error("group_error_rates: group " + std::to_string(z) + " is empty");
    return g;
}

}  // namespace fan
