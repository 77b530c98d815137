#pragma once

// Tabular datasets: CSV ingestion with deterministic one-hot encoding,
// a synthetic generator with exact per-group qualification counts, and
// stratified splits. Values are immutable after construction.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fan/rational.hpp"

namespace fan {

struct Sample {
    std::vector<double> features;
    int group{0};
    int label{0};
};

struct Dataset {
    std::vector<Sample> samples;
    int n_groups{0};
    int feature_dim{0};

    size_t size() const { return samples.size(); }
    // Throws on broken invariants (group id range, label domain, dim mismatch,
    // empty declared group).
    void validate() const;
};

struct GroupStats {
    std::vector<long long> sizes;                        // N_z
    std::vector<std::array<long long, 2>> label_counts;  // N_{z,y}

    int n_groups() const { return static_cast<int>(sizes.size()); }
    long long total() const;
    Rat tau(int z) const {  // qualification rate N_{z,1} / N_z
        return Rat(label_counts[z][1], sizes[z]);
    }
};

struct CsvSchema {
    std::vector<std::string> feature_cols;
    std::string group_col;
    std::string label_col;
    bool minmax_scale{false};
};

Dataset load_csv(const std::string& path, const CsvSchema& schema);
void write_csv(const Dataset& d, const std::string& path);

// Exact label counts: round(tau_z * N_z) samples of group z get label 1.
// Features: x0 carries the label signal with additive noise of the given
// scale, x1 carries a group marker, so both the baseline score and the group
// are recoverable from features.
Dataset gen_synthetic(uint64_t seed, int n_groups, const std::vector<long long>& sizes,
                      const std::vector<double>& taus, double score_noise);

struct SplitIndices {
    std::vector<size_t> train, val, test;
};

struct SplitResult {
    Dataset train, val, test;
    SplitIndices indices;
    std::vector<std::string> warnings;  // empty strata are warned about, not fatal
};

// Stratified by (group, label); exact partition; deterministic per seed.
SplitResult split(const Dataset& d, const std::array<double, 3>& fractions, uint64_t seed);

Dataset subset(const Dataset& d, const std::vector<size_t>& idx);

GroupStats group_stats(const Dataset& d);

}  // namespace fan
