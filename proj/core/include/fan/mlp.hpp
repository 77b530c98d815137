#pragma once

// Minimal MLP binary classifier: ReLU hidden layers, dropout between hidden
// layers (training only), sigmoid output, BCE loss, mini-batch SGD with
// momentum. Training is sequential with a seeded per-epoch shuffle, so a
// fixed seed reproduces weights bit for bit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fan {

struct MlpConfig {
    std::vector<int> hidden_dims{16, 16};
    double dropout_prob{0.0};
    std::string activation{"relu"};
    int epochs{100};
    int batch_size{32};
    double learning_rate{0.01};
    double momentum{0.9};
    uint64_t seed{0};

    void validate() const;
};

class Mlp {
public:
    struct Layer {
        int in{0}, out{0};
        std::vector<double> w;  // row-major, out x in
        std::vector<double> b;
    };

    Mlp() = default;
    Mlp(int input_dim, const MlpConfig& cfg);

    // Returns per-epoch mean training loss. sample_weights empty = all ones.
    // Throws on non-finite loss, naming the epoch.
    std::vector<double> train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                              const std::vector<double>& sample_weights = {});

    double score_one(std::span<const double> x) const;  // sigmoid output in [0,1]
    std::vector<double> score(const std::vector<std::vector<double>>& x) const;
    double accuracy(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    double threshold = 0.5) const;

    int input_dim() const { return input_dim_; }
    const MlpConfig& config() const { return cfg_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }
    void set_config(const MlpConfig& cfg) { cfg_ = cfg; }
    void set_input_dim(int d) { input_dim_ = d; }

    // Bias-only network that always outputs the given class probability side.
    static Mlp constant(int input_dim, int cls);

private:
    int input_dim_{0};
    MlpConfig cfg_;
    std::vector<Layer> layers_;
};

}  // namespace fan
