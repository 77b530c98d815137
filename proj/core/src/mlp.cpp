#include "fan/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "fan/rng.hpp"

namespace fan {

void MlpConfig::validate() const {
    if (hidden_dims.empty()) throw std::invalid_argument("mlp config: hidden_dims must be non-empty");
    for (int h : hidden_dims)
        if (h < 1) throw std::invalid_argument("mlp config: hidden dims must be positive");
    if (dropout_prob < 0.0 || dropout_prob >= 1.0)
        throw std::invalid_argument("mlp config: dropout_prob must lie in [0,1)");
    if (activation != "relu") throw std::invalid_argument("mlp config: unsupported activation '" + activation + "'");
    if (epochs < 1 || batch_size < 1) throw std::invalid_argument("mlp config: epochs and batch_size must be >= 1");
    if (learning_rate <= 0.0) throw std::invalid_argument("mlp config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("mlp config: momentum must lie in [0,1)");
}

Mlp::Mlp(int input_dim, const MlpConfig& cfg) : input_dim_(input_dim), cfg_(cfg) {
    cfg_.validate();
    Rng rng(cfg_.seed);
    int prev = input_dim;
    std::vector<int> dims = cfg_.hidden_dims;
    dims.push_back(1);
    for (int d : dims) {
        Layer l;
        l.in = prev;
        l.out = d;
        l.w.resize(static_cast<size_t>(d) * static_cast<size_t>(prev));
        l.b.assign(static_cast<size_t>(d), 0.0);
        double bound = 1.0 / std::sqrt(static_cast<double>(prev));
        for (auto& v : l.w) v = rng.uniform(-bound, bound);
        layers_.push_back(std::move(l));
        prev = d;
    }
}

namespace {

inline double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// numerically stable BCE on the logit
inline double bce_logit(double z, int y) {
    return std::max(z, 0.0) - z * static_cast<double>(y) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

std::vector<double> Mlp::train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                               const std::vector<double>& sample_weights) {
    if (x.size() != y.size()) throw std::invalid_argument("mlp train: x/y length mismatch");
    if (x.empty()) throw std::invalid_argument("mlp train: empty training set");
    if (!sample_weights.empty() && sample_weights.size() != x.size())
        throw std::invalid_argument("mlp train: sample_weights length mismatch");
    for (const auto& row : x)
        if (static_cast<int>(row.size()) != input_dim_)
            throw std::invalid_argument("mlp train: feature dim mismatch");

    size_t n = x.size();
    size_t n_layers = layers_.size();

    std::vector<std::vector<double>> vel_w(n_layers), vel_b(n_layers);
    std::vector<std::vector<double>> grad_w(n_layers), grad_b(n_layers);
    for (size_t li = 0; li < n_layers; ++li) {
        vel_w[li].assign(layers_[li].w.size(), 0.0);
        vel_b[li].assign(layers_[li].b.size(), 0.0);
        grad_w[li].assign(layers_[li].w.size(), 0.0);
        grad_b[li].assign(layers_[li].b.size(), 0.0);
    }

    // act[0] = input, act[li+1] = output of layer li (post-activation)
    std::vector<std::vector<double>> act(n_layers + 1);
    std::vector<std::vector<double>> pre(n_layers);  // pre-activation
    std::vector<std::vector<double>> mask(n_layers); // dropout keep masks (hidden only)
    std::vector<std::vector<double>> delta(n_layers);

    Rng rng(cfg_.seed + 0x9e3779b97f4a7c15ULL);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> curve;
    curve.reserve(static_cast<size_t>(cfg_.epochs));

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        double weight_sum = 0.0;

        for (size_t start = 0; start < n; start += static_cast<size_t>(cfg_.batch_size)) {
            size_t end = std::min(n, start + static_cast<size_t>(cfg_.batch_size));
            for (size_t li = 0; li < n_layers; ++li) {
                std::fill(grad_w[li].begin(), grad_w[li].end(), 0.0);
                std::fill(grad_b[li].begin(), grad_b[li].end(), 0.0);
            }
            double batch_weight = 0.0;

            for (size_t bi = start; bi < end; ++bi) {
                size_t i = order[bi];
                double sw = sample_weights.empty() ? 1.0 : sample_weights[i];
                batch_weight += sw;

                // forward
                act[0] = x[i];
                for (size_t li = 0; li < n_layers; ++li) {
                    const Layer& l = layers_[li];
                    pre[li].assign(static_cast<size_t>(l.out), 0.0);
                    for (int o = 0; o < l.out; ++o) {
                        double s = l.b[static_cast<size_t>(o)];
                        const double* wrow = &l.w[static_cast<size_t>(o) * static_cast<size_t>(l.in)];
                        for (int k = 0; k < l.in; ++k) s += wrow[k] * act[li][static_cast<size_t>(k)];
                        pre[li][static_cast<size_t>(o)] = s;
                    }
                    bool hidden = li + 1 < n_layers;
                    act[li + 1].assign(static_cast<size_t>(l.out), 0.0);
                    if (hidden) {
                        mask[li].assign(static_cast<size_t>(l.out), 1.0);
                        double keep = 1.0 - cfg_.dropout_prob;
                        for (int o = 0; o < l.out; ++o) {
                            double a = std::max(0.0, pre[li][static_cast<size_t>(o)]);
                            if (cfg_.dropout_prob > 0.0) {
                                double m = rng.uniform() < keep ? 1.0 / keep : 0.0;
                                mask[li][static_cast<size_t>(o)] = m;
                                a *= m;
                            }
                            act[li + 1][static_cast<size_t>(o)] = a;
                        }
                    } else {
                        act[li + 1][0] = pre[li][0];  // logit, squashed in the loss
                    }
                }

                double z = act[n_layers][0];
                epoch_loss += sw * bce_logit(z, y[i]);
                weight_sum += sw;

                // backward; output delta = p - y
                delta[n_layers - 1].assign(1, sw * (sigmoid(z) - static_cast<double>(y[i])));
                for (size_t li = n_layers; li-- > 0;) {
                    const Layer& l = layers_[li];
                    for (int o = 0; o < l.out; ++o) {
                        double dv = delta[li][static_cast<size_t>(o)];
                        grad_b[li][static_cast<size_t>(o)] += dv;
                        double* gw = &grad_w[li][static_cast<size_t>(o) * static_cast<size_t>(l.in)];
                        for (int k = 0; k < l.in; ++k) gw[k] += dv * act[li][static_cast<size_t>(k)];
                    }
                    if (li == 0) break;
                    delta[li - 1].assign(static_cast<size_t>(l.in), 0.0);
                    for (int k = 0; k < l.in; ++k) {
                        double s = 0.0;
                        for (int o = 0; o < l.out; ++o)
                            s += l.w[static_cast<size_t>(o) * static_cast<size_t>(l.in) + static_cast<size_t>(k)] *
                                 delta[li][static_cast<size_t>(o)];
                        // through dropout mask and relu of the producing layer
                        double m = mask[li - 1][static_cast<size_t>(k)];
                        double g = pre[li - 1][static_cast<size_t>(k)] > 0.0 ? 1.0 : 0.0;
                        delta[li - 1][static_cast<size_t>(k)] = s * m * g;
                    }
                }
            }

            if (batch_weight <= 0.0) continue;
            double scale = cfg_.learning_rate / batch_weight;
            for (size_t li = 0; li < n_layers; ++li) {
                Layer& l = layers_[li];
                for (size_t j = 0; j < l.w.size(); ++j) {
                    vel_w[li][j] = cfg_.momentum * vel_w[li][j] - scale * grad_w[li][j];
                    l.w[j] += vel_w[li][j];
                }
                for (size_t j = 0; j < l.b.size(); ++j) {
                    vel_b[li][j] = cfg_.momentum * vel_b[li][j] - scale * grad_b[li][j];
                    l.b[j] += vel_b[li][j];
                }
            }
        }

        double mean_loss = epoch_loss / (weight_sum > 0 ? weight_sum : 1.0);
        if (!std::isfinite(mean_loss))
            throw std::runtime_error("mlp train: loss diverged at epoch " + std::to_string(epoch));
        curve.push_back(mean_loss);
    }
    return curve;
}

double Mlp::score_one(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim_) throw std::invalid_argument("mlp score: feature dim mismatch");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (size_t li = 0; li < layers_.size(); ++li) {
        const Layer& l = layers_[li];
        next.assign(static_cast<size_t>(l.out), 0.0);
        bool hidden = li + 1 < layers_.size();
        for (int o = 0; o < l.out; ++o) {
            double s = l.b[static_cast<size_t>(o)];
            const double* wrow = &l.w[static_cast<size_t>(o) * static_cast<size_t>(l.in)];
            for (int k = 0; k < l.in; ++k) s += wrow[k] * cur[static_cast<size_t>(k)];
            next[static_cast<size_t>(o)] = hidden ? std::max(0.0, s) : s;
        }
        cur.swap(next);
    }
    return sigmoid(cur[0]);
}

std::vector<double> Mlp::score(const std::vector<std::vector<double>>& x) const {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& row : x) out.push_back(score_one(row));
    return out;
}

double Mlp::accuracy(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                     double threshold) const {
    if (x.empty()) return 0.0;
    size_t correct = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        int pred = score_one(x[i]) >= threshold ? 1 : 0;
        if (pred == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(x.size());
}

Mlp Mlp::constant(int input_dim, int cls) {
    Mlp m;
    m.input_dim_ = input_dim;
    m.cfg_ = MlpConfig{};
    Layer l;
    l.in = input_dim;
    l.out = 1;
    l.w.assign(static_cast<size_t>(input_dim), 0.0);
    l.b.assign(1, cls == 1 ? 50.0 : -50.0);  // saturates the sigmoid
    m.layers_.push_back(std::move(l));
    return m;
}

}  // namespace fan
