#include "fan/cells.hpp"

#include <algorithm>
#include <stdexcept>

namespace fan {

void CellCounts::validate(const CellTable& table) const {
    if (static_cast<int>(cells.size()) != table.n_cells())
        throw std::domain_error("cell counts: wrong number of cells");
    for (int c = 0; c < table.n_cells(); ++c) {
        const PerCell& pc = cells[static_cast<size_t>(c)];
        if (pc.n_abstain < 0 || pc.n_keep < 0 || pc.n_flip < 0 || pc.n_abstain_flip < 0)
            throw std::domain_error("cell counts: negative count in cell " + std::to_string(c));
        if (pc.n_abstain + pc.n_keep + pc.n_flip != table.cell_size(c))
            throw std::domain_error("cell counts: cell " + std::to_string(c) + " does not sum to its size");
        if (pc.n_abstain_flip > pc.n_abstain)
            throw std::domain_error("cell counts: n_abstain_flip exceeds n_abstain in cell " + std::to_string(c));
    }
}

CellTable build_cells(const Dataset& d, const std::vector<int>& pred, const std::vector<double>& scores) {
    if (pred.size() != d.size() || scores.size() != d.size())
        throw std::invalid_argument("build_cells: length mismatch");
    CellTable t;
    t.n_groups = d.n_groups;
    t.n_samples = d.size();
    t.members.assign(static_cast<size_t>(d.n_groups) * 4, {});
    for (size_t i = 0; i < d.size(); ++i) {
        const Sample& s = d.samples[i];
        t.members[static_cast<size_t>(cell_index(s.group, s.label, pred[i]))].push_back(i);
    }
    for (auto& cell : t.members) {
        std::sort(cell.begin(), cell.end(), [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) return scores[a] < scores[b];
            return a < b;
        });
    }
    return t;
}

long long counts_objective(const CellCounts& counts, const CellTable& table) {
    counts.validate(table);
    long long errors = 0;
    for (int c = 0; c < table.n_cells(); ++c) {
        const auto& pc = counts.cells[static_cast<size_t>(c)];
        if (table.keep_is_error(c))
            errors += pc.n_keep;  // kept a wrong prediction
        else
            errors += pc.n_flip;  // flipped a right one
    }
    return errors;
}

DecisionVector decisions_from_counts(const CellCounts& counts, const CellTable& table) {
    counts.validate(table);
    DecisionVector d;
    d.omega.assign(table.n_samples, 1);
    d.flip.assign(table.n_samples, 0);
    for (int c = 0; c < table.n_cells(); ++c) {
        const auto& pc = counts.cells[static_cast<size_t>(c)];
        const auto& m = table.members[static_cast<size_t>(c)];
        long long i = 0;
        for (; i < pc.n_abstain; ++i) {
            d.omega[m[static_cast<size_t>(i)]] = 0;
            d.flip[m[static_cast<size_t>(i)]] = i < pc.n_abstain_flip ? 1 : 0;
        }
        for (; i < pc.n_abstain + pc.n_flip; ++i) d.flip[m[static_cast<size_t>(i)]] = 1;
        // remaining n_keep stay (omega=1, flip=0)
    }
    return d;
}

CellCounts counts_from_decisions(const DecisionVector& d, const CellTable& table) {
    if (d.size() != table.n_samples) throw std::invalid_argument("counts_from_decisions: length mismatch");
    CellCounts counts;
    counts.cells.assign(static_cast<size_t>(table.n_cells()), {});
    for (int c = 0; c < table.n_cells(); ++c) {
        auto& pc = counts.cells[static_cast<size_t>(c)];
        for (size_t i : table.members[static_cast<size_t>(c)]) {
            if (d.omega[i] == 0) {
                ++pc.n_abstain;
                if (d.flip[i]) ++pc.n_abstain_flip;
            } else if (d.flip[i]) {
                ++pc.n_flip;
            } else {
                ++pc.n_keep;
            }
        }
    }
    return counts;
}

}  // namespace fan
