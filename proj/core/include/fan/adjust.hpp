#pragma once

// Prediction Adjustment: canonicalize within-cell decisions by ascending
// baseline confidence, preserving per-cell counts exactly. Removes the
// solver's freedom to permute decisions among indistinguishable samples
// before the surrogates learn from them.

#include "fan/cells.hpp"

namespace fan {

enum class PaOrder {
    AbstainFlipKeep,  // default: abstain lowest, then flip, then keep
    AbstainKeepFlip,  // alternate assignment order
};

// Count-preserving: counts_from_decisions(input) == counts_from_decisions(output)
// per cell, including abstained-with-flip counts when present.
DecisionVector prediction_adjustment(const DecisionVector& decisions, const CellTable& table,
                                     PaOrder order = PaOrder::AbstainFlipKeep);

// Among groups of samples with identical (features, group), the fraction of
// groups whose members all received the same (omega, f). 1.0 when no
// duplicates exist.
double consistency_rate(const DecisionVector& decisions, const Dataset& d);

}  // namespace fan
