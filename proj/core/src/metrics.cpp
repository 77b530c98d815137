#include "fan/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fan {

std::optional<Rat> EvalReport::overall_accuracy() const {
    long long correct = 0, total = 0;
    for (const auto& g : groups) {
        correct += g.correct_nonabstained;
        total += g.nonabstained;
    }
    if (total == 0) return std::nullopt;
    return Rat(correct, total);
}

std::optional<Rat> EvalReport::max_disparity() const {
    std::optional<Rat> best;
    for (const auto& p : pairs) {
        std::optional<Rat> v;
        switch (fairness) {
            case Fairness::DP: v = p.dp; break;
            case Fairness::EOp: v = p.tpr_gap; break;
            case Fairness::EOd: v = p.eod_avg; break;
        }
        if (!v) continue;
        if (!best || *v > *best) best = v;
    }
    return best;
}

std::vector<FanOutput> outputs_from_decisions(const DecisionVector& d, const std::vector<int>& pred) {
    if (d.size() != pred.size()) throw std::invalid_argument("outputs_from_decisions: length mismatch");
    std::vector<FanOutput> out(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        if (d.omega[i] == 0) {
            out[i].abstained = true;
        } else {
            out[i].label = final_label(pred[i], d.flip[i]);
        }
    }
    return out;
}

EvalReport evaluate(const Dataset& d, const std::vector<FanOutput>& outputs,
                    const GroupErrorRates& baseline_errors, const ConstraintSpec& spec) {
    if (outputs.size() != d.size()) throw std::invalid_argument("evaluate: outputs do not match dataset");
    int Z = d.n_groups;
    EvalReport rep;
    rep.fairness = spec.fairness;
    rep.groups.assign(static_cast<size_t>(Z), {});

    // per-group counters for disparity numerators
    std::vector<long long> accepted(static_cast<size_t>(Z), 0);
    std::vector<long long> tp(static_cast<size_t>(Z), 0), tn(static_cast<size_t>(Z), 0);

    for (size_t i = 0; i < d.size(); ++i) {
        const Sample& s = d.samples[i];
        GroupEval& g = rep.groups[static_cast<size_t>(s.group)];
        ++g.size;
        ++g.label_size[static_cast<size_t>(s.label)];
        const FanOutput& o = outputs[i];
        if (o.abstained) continue;
        ++g.nonabstained;
        ++g.nonabstained_y[static_cast<size_t>(s.label)];
        if (o.label == s.label) ++g.correct_nonabstained;
        if (o.label == 1) ++accepted[static_cast<size_t>(s.group)];
        if (o.label == 1 && s.label == 1) ++tp[static_cast<size_t>(s.group)];
        if (o.label == 0 && s.label == 0) ++tn[static_cast<size_t>(s.group)];
    }

    for (int z1 = 0; z1 < Z; ++z1) {
        for (int z2 = z1 + 1; z2 < Z; ++z2) {
            const GroupEval& g1 = rep.groups[static_cast<size_t>(z1)];
            const GroupEval& g2 = rep.groups[static_cast<size_t>(z2)];
            PairDisparity p;
            p.z1 = z1;
            p.z2 = z2;
            p.dp = (Rat(accepted[static_cast<size_t>(z1)], g1.size) - Rat(accepted[static_cast<size_t>(z2)], g2.size))
                       .abs();
            if (g1.label_size[1] > 0 && g2.label_size[1] > 0)
                p.tpr_gap =
                    (Rat(tp[static_cast<size_t>(z1)], g1.label_size[1]) - Rat(tp[static_cast<size_t>(z2)], g2.label_size[1]))
                        .abs();
            if (g1.label_size[0] > 0 && g2.label_size[0] > 0)
                p.tnr_gap =
                    (Rat(tn[static_cast<size_t>(z1)], g1.label_size[0]) - Rat(tn[static_cast<size_t>(z2)], g2.label_size[0]))
                        .abs();
            if (p.tpr_gap && p.tnr_gap) p.eod_avg = (*p.tpr_gap + *p.tnr_gap) * Rat(1, 2);
            rep.pairs.push_back(std::move(p));
        }
    }

    for (int z = 0; z < Z; ++z) {
        const GroupEval& g = rep.groups[static_cast<size_t>(z)];
        if (!g.accuracy_defined()) {
            rep.no_harm_margin.push_back(std::nullopt);
            continue;
        }
        Rat err_rate = Rat(g.nonabstained - g.correct_nonabstained, g.nonabstained);
        Rat ep = baseline_errors.e_prime(z, spec.eta[static_cast<size_t>(z)]);
        rep.no_harm_margin.push_back(ep - err_rate);
    }
    return rep;
}

std::string eval_csv_header(int n_groups) {
    std::string h = "fairness,max_disparity,overall_accuracy";
    for (int z = 0; z < n_groups; ++z) {
        std::string s = std::to_string(z);
        h += ",accuracy_g" + s + ",abstention_g" + s + ",abstention_g" + s + "_y0,abstention_g" + s + "_y1";
    }
    return h;
}

std::string eval_csv_row(const EvalReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << to_string(r.fairness) << ",";
    auto md = r.max_disparity();
    if (md) os << md->to_double();
    os << ",";
    auto oa = r.overall_accuracy();
    if (oa) os << oa->to_double();
    for (const auto& g : r.groups) {
        os << ",";
        if (g.accuracy_defined()) os << g.accuracy().to_double();
        os << "," << g.abstention_rate().to_double();
        for (int y = 0; y < 2; ++y) {
            os << ",";
            auto ar = g.abstention_rate_label(y);
            if (ar) os << ar->to_double();
        }
    }
    return os.str();
}

BaselineComparison compare_to_baseline(const EvalReport& model_report, const EvalReport& baseline_report) {
    if (model_report.groups.size() != baseline_report.groups.size())
        throw std::invalid_argument("compare_to_baseline: group count mismatch");
    BaselineComparison cmp;
    auto md = model_report.max_disparity();
    auto bd = baseline_report.max_disparity();
    cmp.disparity_reduction = (bd ? bd->to_double() : 0.0) - (md ? md->to_double() : 0.0);

    double min_inc = std::numeric_limits<double>::infinity();
    for (size_t z = 0; z < model_report.groups.size(); ++z) {
        const auto& gm = model_report.groups[z];
        const auto& gb = baseline_report.groups[z];
        double inc = std::numeric_limits<double>::quiet_NaN();
        if (gm.accuracy_defined() && gb.accuracy_defined())
            inc = gm.accuracy().to_double() - gb.accuracy().to_double();
        cmp.group_accuracy_increase.push_back(inc);
        if (!std::isnan(inc)) min_inc = std::min(min_inc, inc);
    }
    cmp.min_group_accuracy_increase = std::isinf(min_inc) ? std::numeric_limits<double>::quiet_NaN() : min_inc;
    return cmp;
}

}  // namespace fan
