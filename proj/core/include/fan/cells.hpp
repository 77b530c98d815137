#pragma once

// Cell decomposition: samples bucketed by (group, label, baseline prediction).
// The IP objective and every constraint depend on per-sample decisions only
// through per-cell counts, so counts are the solver's entire state space.
// Within-cell order is ascending baseline confidence, ties by sample index.

#include <cstdint>
#include <vector>

#include "fan/dataset.hpp"

namespace fan {

struct CellKey {
    int group{0};
    int label{0};
    int pred{0};
};

inline int cell_index(int group, int label, int pred) { return group * 4 + label * 2 + pred; }

struct CellTable {
    int n_groups{0};
    size_t n_samples{0};
    // one entry per cell, samples sorted by (score, index)
    std::vector<std::vector<size_t>> members;

    int n_cells() const { return static_cast<int>(members.size()); }
    CellKey key_of(int c) const { return CellKey{c / 4, (c / 2) % 2, c % 2}; }
    long long cell_size(int c) const { return static_cast<long long>(members[static_cast<size_t>(c)].size()); }
    // 1 if keeping the baseline prediction in this cell is an error
    int keep_is_error(int c) const {
        CellKey k = key_of(c);
        return k.pred != k.label ? 1 : 0;
    }
};

struct CellCounts {
    struct PerCell {
        long long n_abstain{0};
        long long n_keep{0};
        long long n_flip{0};
        long long n_abstain_flip{0};  // abstained samples carrying f=1; only
                                      // populated under the non-triviality variant
    };
    std::vector<PerCell> cells;

    // Throws when counts do not tally with the table.
    void validate(const CellTable& table) const;
};

// Per-sample decisions: omega = 0 abstain, 1 predict; flip applies to the
// baseline prediction (final label = pred xor flip when omega = 1).
struct DecisionVector {
    std::vector<uint8_t> omega;
    std::vector<uint8_t> flip;

    size_t size() const { return omega.size(); }
};

inline int final_label(int pred, int flip) { return pred ^ flip; }

CellTable build_cells(const Dataset& d, const std::vector<int>& pred,
                      const std::vector<double>& scores);

// Sum over cells of kept-but-wrong and flipped-but-was-right counts: the IP
// objective restated in counts.
long long counts_objective(const CellCounts& counts, const CellTable& table);

// Ascending score within each cell: first n_abstain abstained (f=0 except the
// lowest n_abstain_flip, which carry f=1), next n_flip flipped, rest kept.
DecisionVector decisions_from_counts(const CellCounts& counts, const CellTable& table);

CellCounts counts_from_decisions(const DecisionVector& d, const CellTable& table);

}  // namespace fan
