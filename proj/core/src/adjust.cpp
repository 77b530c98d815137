#include "fan/adjust.hpp"

#include <map>
#include <stdexcept>

namespace fan {

DecisionVector prediction_adjustment(const DecisionVector& decisions, const CellTable& table, PaOrder order) {
    if (decisions.size() != table.n_samples)
        throw std::invalid_argument("prediction_adjustment: decisions do not match cell table");
    CellCounts counts = counts_from_decisions(decisions, table);

    DecisionVector out;
    out.omega.assign(table.n_samples, 1);
    out.flip.assign(table.n_samples, 0);
    for (int c = 0; c < table.n_cells(); ++c) {
        const auto& pc = counts.cells[static_cast<size_t>(c)];
        const auto& m = table.members[static_cast<size_t>(c)];
        long long i = 0;
        for (; i < pc.n_abstain; ++i) {
            out.omega[m[static_cast<size_t>(i)]] = 0;
            // preserve flip bits on abstained samples (non-triviality variant);
            // zero otherwise, matching the reassignment rule
            out.flip[m[static_cast<size_t>(i)]] = i < pc.n_abstain_flip ? 1 : 0;
        }
        if (order == PaOrder::AbstainFlipKeep) {
            for (; i < pc.n_abstain + pc.n_flip; ++i) out.flip[m[static_cast<size_t>(i)]] = 1;
        } else {
            i += pc.n_keep;  // kept block first, then flips take the top scores
            for (; i < pc.n_abstain + pc.n_keep + pc.n_flip; ++i) out.flip[m[static_cast<size_t>(i)]] = 1;
        }
    }
    return out;
}

double consistency_rate(const DecisionVector& decisions, const Dataset& d) {
    if (decisions.size() != d.size())
        throw std::invalid_argument("consistency_rate: decisions do not match dataset");
    std::map<std::pair<std::vector<double>, int>, std::vector<size_t>> classes;
    for (size_t i = 0; i < d.size(); ++i)
        classes[{d.samples[i].features, d.samples[i].group}].push_back(i);

    long long groups = 0, consistent = 0;
    for (const auto& [key, members] : classes) {
        if (members.size() < 2) continue;
        ++groups;
        bool same = true;
        for (size_t k = 1; k < members.size(); ++k) {
            if (decisions.omega[members[k]] != decisions.omega[members[0]] ||
                decisions.flip[members[k]] != decisions.flip[members[0]]) {
                same = false;
                break;
            }
        }
        if (same) ++consistent;
    }
    if (groups == 0) return 1.0;
    return static_cast<double>(consistent) / static_cast<double>(groups);
}

}  // namespace fan
