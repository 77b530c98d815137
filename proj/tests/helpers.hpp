#pragma once

// Shared test fixtures: seeded random IP instances at oracle scale and random
// constraint specs drawn from small exact fractions.

#include <vector>

#include "fan/baseline.hpp"
#include "fan/cells.hpp"
#include "fan/constraints.hpp"
#include "fan/rng.hpp"

namespace fan::testing {

struct Instance {
    Dataset data;  // 1-d features equal to the score
    std::vector<int> group, label, pred;
    std::vector<double> scores;
    GroupStats stats;
    GroupErrorRates errors;
    CellTable table;
};

// n >= 4 samples over two groups; the first four samples cover every (group,
// label) stratum so EOp/EOd/sigma denominators are never empty.
inline Instance make_instance(Rng& rng, int n, int n_groups = 2) {
    Instance ins;
    ins.data.n_groups = n_groups;
    ins.data.feature_dim = 1;
    for (int i = 0; i < n; ++i) {
        int z, y;
        if (i < 2 * n_groups) {
            z = i % n_groups;
            y = (i / n_groups) % 2;
        } else {
            z = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n_groups)));
            y = static_cast<int>(rng.uniform_int(2));
        }
        double s = rng.uniform();
        ins.data.samples.push_back({{s}, z, y});
        ins.group.push_back(z);
        ins.label.push_back(y);
        ins.scores.push_back(s);
        ins.pred.push_back(s >= 0.5 ? 1 : 0);
    }
    ins.stats = group_stats(ins.data);
    ins.errors = group_error_rates(ins.data, ins.pred);
    ins.table = build_cells(ins.data, ins.pred, ins.scores);
    return ins;
}

struct SpecOptions {
    bool allow_sigma{true};
    bool allow_nontriviality{true};
    bool force_zero_delta{false};
    bool force_zero_eps{false};
};

inline ConstraintSpec random_spec(Rng& rng, const Instance& ins, Fairness fairness,
                                  const SpecOptions& opt = {}) {
    auto pick = [&](const std::vector<Rat>& v) { return v[rng.uniform_int(v.size())]; };
    const std::vector<Rat> eps_choices{Rat(0), Rat(1, 20), Rat(1, 10), Rat(1, 5), Rat(1, 2)};
    const std::vector<Rat> delta_choices{Rat(0), Rat(1, 10), Rat(1, 4), Rat(1, 2), Rat(1)};
    const std::vector<Rat> eta_choices{Rat(-1, 2), Rat(0), Rat(1, 2), Rat(2)};
    const std::vector<Rat> sigma_choices{Rat(0), Rat(1, 10), Rat(1, 3), Rat(1)};

    ConstraintSpec spec;
    spec.fairness = fairness;
    spec.eps = opt.force_zero_eps ? Rat(0) : pick(eps_choices);
    int Z = ins.stats.n_groups();
    for (int z = 0; z < Z; ++z) {
        spec.delta.push_back(opt.force_zero_delta ? Rat(0) : pick(delta_choices));
        spec.eta.push_back(pick(eta_choices));
    }
    if (opt.allow_sigma && rng.uniform() < 0.3) spec.sigma = {pick(sigma_choices), pick(sigma_choices)};
    if (opt.allow_nontriviality && rng.uniform() < 0.25) {
        std::vector<Rat> floors;
        for (int z = 0; z < Z; ++z) floors.push_back(ins.errors.e(z));
        spec.nontriviality = std::move(floors);
        spec.nontriviality_nonabstained_only = rng.uniform() < 0.5;
    }
    return spec;
}

inline Fairness fairness_of(int i) {
    switch (i % 3) {
        case 0: return Fairness::DP;
        case 1: return Fairness::EOp;
        default: return Fairness::EOd;
    }
}

// Two groups of nz samples with exactly realizable qualification and error
// fractions (pos/nz, err/nz); errors split between false negatives and false
// positives. Scores keep predictions consistent with a 0.5 threshold.
inline Instance make_exact_instance(Rng& rng, long long nz, long long pos_hi, long long pos_lo,
                                    long long err_hi, long long err_lo) {
    Instance ins;
    ins.data.n_groups = 2;
    ins.data.feature_dim = 1;
    auto add_group = [&](int z, long long n_pos, long long errors_total) {
        long long fn = errors_total / 2;
        long long fp = errors_total - fn;
        fn = std::min(fn, n_pos);
        fp = std::min(fp, nz - n_pos);
        if (fn + fp < errors_total) fn = errors_total - fp;
        long long seen_pos = 0, seen_neg = 0;
        for (long long i = 0; i < nz; ++i) {
            int y = i < n_pos ? 1 : 0;
            int p;
            if (y == 1)
                p = (seen_pos++ < fn) ? 0 : 1;
            else
                p = (seen_neg++ < fp) ? 1 : 0;
            double s = p ? 0.5 + 0.45 * rng.uniform() : 0.5 - 0.45 * rng.uniform();
            ins.data.samples.push_back({{s}, z, y});
            ins.group.push_back(z);
            ins.label.push_back(y);
            ins.pred.push_back(p);
            ins.scores.push_back(s);
        }
    };
    add_group(0, pos_hi, err_hi);
    add_group(1, pos_lo, err_lo);
    ins.stats = group_stats(ins.data);
    ins.errors = group_error_rates(ins.data, ins.pred);
    ins.table = build_cells(ins.data, ins.pred, ins.scores);
    return ins;
}

}  // namespace fan::testing
