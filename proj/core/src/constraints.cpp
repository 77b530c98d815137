#include "fan/constraints.hpp"

#include <functional>
#include <stdexcept>

namespace fan {

std::string to_string(Fairness f) {
    switch (f) {
        case Fairness::DP: return "DP";
        case Fairness::EOp: return "EOp";
        case Fairness::EOd: return "EOd";
    }
    return "?";
}

Fairness fairness_from_string(const std::string& s) {
    if (s == "DP" || s == "dp") return Fairness::DP;
    if (s == "EOp" || s == "eop" || s == "EOP") return Fairness::EOp;
    if (s == "EOd" || s == "eod" || s == "EOD") return Fairness::EOd;
    throw std::invalid_argument("unknown fairness notion '" + s + "' (expected DP, EOp or EOd)");
}

void ConstraintSpec::validate(int n_groups) const {
    if (eps < Rat(0)) throw std::domain_error("spec: eps must be >= 0");
    if (static_cast<int>(delta.size()) != n_groups || static_cast<int>(eta.size()) != n_groups)
        throw std::domain_error("spec: delta/eta must have one entry per group");
    for (const Rat& d : delta)
        if (d < Rat(0) || d > Rat(1)) throw std::domain_error("spec: delta must lie in [0,1]");
    if (sigma) {
        for (const Rat& s : *sigma)
            if (s < Rat(0)) throw std::domain_error("spec: sigma must be >= 0");
    }
    if (nontriviality) {
        if (static_cast<int>(nontriviality->size()) != n_groups)
            throw std::domain_error("spec: non-triviality floors must have one entry per group");
        for (const Rat& f : *nontriviality)
            if (f < Rat(0) || f > Rat(1)) throw std::domain_error("spec: non-triviality floor must lie in [0,1]");
    }
}

std::vector<GroupTally> tally_counts(const CellCounts& counts, const CellTable& table) {
    counts.validate(table);
    std::vector<GroupTally> t(static_cast<size_t>(table.n_groups));
    for (int c = 0; c < table.n_cells(); ++c) {
        CellKey k = table.key_of(c);
        const auto& pc = counts.cells[static_cast<size_t>(c)];
        GroupTally& g = t[static_cast<size_t>(k.group)];
        long long flip_to_1 = k.pred == 0 ? pc.n_flip : 0;
        long long keep_at_1 = k.pred == 1 ? pc.n_keep : 0;
        g.accepted += keep_at_1 + flip_to_1;
        if (k.label == 1) g.tp += keep_at_1 + flip_to_1;
        if (k.label == 0) g.tn += (k.pred == 0 ? pc.n_keep : 0) + (k.pred == 1 ? pc.n_flip : 0);
        g.nonabst += pc.n_keep + pc.n_flip;
        g.nonabst_y[k.label] += pc.n_keep + pc.n_flip;
        if (k.pred != k.label)
            g.err += pc.n_keep;  // kept wrong predictions
        else
            g.err += pc.n_flip;  // flipped right ones
        // all-sample error count: abstained samples contribute via their f bit
        long long abst_kept_pred = pc.n_abstain - pc.n_abstain_flip;
        if (k.pred != k.label)
            g.err_all += pc.n_keep + abst_kept_pred;
        else
            g.err_all += pc.n_flip + pc.n_abstain_flip;
    }
    return t;
}

namespace {

std::string pair_name(const char* prefix, int z1, int z2) {
    return std::string(prefix) + "[" + std::to_string(z1) + "," + std::to_string(z2) + "]";
}

void require_stratum(long long count, int z, int y) {
    if (count == 0)
        throw std::domain_error("empty stratum: group " + std::to_string(z) + " has no samples with label " +
                                std::to_string(y));
}

}  // namespace

std::vector<ConstraintValue> constraint_values(const CellCounts& counts, const CellTable& table,
                                               const GroupStats& stats, const GroupErrorRates& errors,
                                               const ConstraintSpec& spec) {
    int Z = table.n_groups;
    spec.validate(Z);
    std::vector<GroupTally> tally = tally_counts(counts, table);
    std::vector<ConstraintValue> out;

    // disparity, all unordered pairs
    for (int z1 = 0; z1 < Z; ++z1) {
        for (int z2 = z1 + 1; z2 < Z; ++z2) {
            long long n1 = stats.sizes[static_cast<size_t>(z1)];
            long long n2 = stats.sizes[static_cast<size_t>(z2)];
            if (spec.fairness == Fairness::DP) {
                Rat gap = (Rat(tally[static_cast<size_t>(z1)].accepted, n1) -
                           Rat(tally[static_cast<size_t>(z2)].accepted, n2))
                              .abs();
                out.push_back({pair_name("disparity_dp", z1, z2), "disparity", gap, spec.eps, Sense::LE});
            }
            if (spec.fairness == Fairness::EOp || spec.fairness == Fairness::EOd) {
                long long d1 = stats.label_counts[static_cast<size_t>(z1)][1];
                long long d2 = stats.label_counts[static_cast<size_t>(z2)][1];
                require_stratum(d1, z1, 1);
                require_stratum(d2, z2, 1);
                Rat gap =
                    (Rat(tally[static_cast<size_t>(z1)].tp, d1) - Rat(tally[static_cast<size_t>(z2)].tp, d2)).abs();
                out.push_back({pair_name("disparity_tpr", z1, z2), "disparity", gap, spec.eps, Sense::LE});
            }
            if (spec.fairness == Fairness::EOd) {
                long long d1 = stats.label_counts[static_cast<size_t>(z1)][0];
                long long d2 = stats.label_counts[static_cast<size_t>(z2)][0];
                require_stratum(d1, z1, 0);
                require_stratum(d2, z2, 0);
                Rat gap =
                    (Rat(tally[static_cast<size_t>(z1)].tn, d1) - Rat(tally[static_cast<size_t>(z2)].tn, d2)).abs();
                out.push_back({pair_name("disparity_tnr", z1, z2), "disparity", gap, spec.eps, Sense::LE});
            }
        }
    }

    // abstention rate: non-abstained fraction >= 1 - delta_z
    for (int z = 0; z < Z; ++z) {
        Rat frac(tally[static_cast<size_t>(z)].nonabst, stats.sizes[static_cast<size_t>(z)]);
        out.push_back({"abstention[" + std::to_string(z) + "]", "abstention", frac,
                       Rat(1) - spec.delta[static_cast<size_t>(z)], Sense::GE});
    }

    // no harm: errors among non-abstained <= (1+eta_z) e_z * non-abstained
    for (int z = 0; z < Z; ++z) {
        Rat ep = errors.e_prime(z, spec.eta[static_cast<size_t>(z)]);
        Rat lhs(tally[static_cast<size_t>(z)].err);
        Rat rhs = ep * Rat(tally[static_cast<size_t>(z)].nonabst);
        out.push_back({"no_harm[" + std::to_string(z) + "]", "no_harm", lhs, rhs, Sense::LE});
    }

    // equal abstention: per label, pairwise non-abstention-rate gaps
    if (spec.sigma) {
        for (int y = 0; y < 2; ++y) {
            for (int z1 = 0; z1 < Z; ++z1) {
                for (int z2 = z1 + 1; z2 < Z; ++z2) {
                    long long d1 = stats.label_counts[static_cast<size_t>(z1)][y];
                    long long d2 = stats.label_counts[static_cast<size_t>(z2)][y];
                    require_stratum(d1, z1, y);
                    require_stratum(d2, z2, y);
                    Rat gap = (Rat(tally[static_cast<size_t>(z1)].nonabst_y[y], d1) -
                               Rat(tally[static_cast<size_t>(z2)].nonabst_y[y], d2))
                                  .abs();
                    out.push_back({pair_name(("equal_abstention_y" + std::to_string(y)).c_str(), z1, z2),
                                   "equal_abstention", gap, (*spec.sigma)[static_cast<size_t>(y)], Sense::LE});
                }
            }
        }
    }

    // non-triviality: total errors (all samples, or non-abstained only) >= floor
    if (spec.nontriviality) {
        for (int z = 0; z < Z; ++z) {
            long long lhs_count = spec.nontriviality_nonabstained_only ? tally[static_cast<size_t>(z)].err
                                                                       : tally[static_cast<size_t>(z)].err_all;
            Rat rhs = (*spec.nontriviality)[static_cast<size_t>(z)] * Rat(stats.sizes[static_cast<size_t>(z)]);
            out.push_back(
                {"non_triviality[" + std::to_string(z) + "]", "non_triviality", Rat(lhs_count), rhs, Sense::GE});
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Row construction
// ---------------------------------------------------------------------------

namespace {

struct RowBuilder {
    IntegerProgram* ip;

    IpRow fresh() const {
        IpRow r;
        r.coef.assign(static_cast<size_t>(ip->n_vars), 0);
        return r;
    }

    // adds coef * (accepted count of group z) to the row
    void add_accepted(IpRow& r, int z, long long coef) const {
        for (int y = 0; y < 2; ++y) {
            r.coef[static_cast<size_t>(ip->keep_var(cell_index(z, y, 1)))] += coef;
            r.coef[static_cast<size_t>(ip->flip_var(cell_index(z, y, 0)))] += coef;
        }
    }
    void add_tp(IpRow& r, int z, long long coef) const {
        r.coef[static_cast<size_t>(ip->keep_var(cell_index(z, 1, 1)))] += coef;
        r.coef[static_cast<size_t>(ip->flip_var(cell_index(z, 1, 0)))] += coef;
    }
    void add_tn(IpRow& r, int z, long long coef) const {
        r.coef[static_cast<size_t>(ip->keep_var(cell_index(z, 0, 0)))] += coef;
        r.coef[static_cast<size_t>(ip->flip_var(cell_index(z, 0, 1)))] += coef;
    }
    void add_nonabst(IpRow& r, int z, long long coef) const {
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b) {
                int c = cell_index(z, y, b);
                r.coef[static_cast<size_t>(ip->keep_var(c))] += coef;
                r.coef[static_cast<size_t>(ip->flip_var(c))] += coef;
            }
    }
    void add_nonabst_y(IpRow& r, int z, int y, long long coef) const {
        for (int b = 0; b < 2; ++b) {
            int c = cell_index(z, y, b);
            r.coef[static_cast<size_t>(ip->keep_var(c))] += coef;
            r.coef[static_cast<size_t>(ip->flip_var(c))] += coef;
        }
    }
    // errors among non-abstained
    void add_err(IpRow& r, const CellTable& t, int z, long long coef) const {
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b) {
                int c = cell_index(z, y, b);
                if (t.keep_is_error(c))
                    r.coef[static_cast<size_t>(ip->keep_var(c))] += coef;
                else
                    r.coef[static_cast<size_t>(ip->flip_var(c))] += coef;
            }
    }
};

// floor(eps * d1 * d2) for a rational bound eps
i128 scaled_floor(const Rat& bound, long long d1, long long d2) {
    return Rat(bound.num * d1 * d2, bound.den).floor();
}

void add_abs_pair_rows(IntegerProgram& ip, const RowBuilder& rb, const std::string& name_prefix,
                       const std::string& family, const Rat& bound, long long d1, long long d2,
                       const std::function<void(IpRow&, int, long long)>& add_term, int z1, int z2) {
    i128 rhs = scaled_floor(bound, d1, d2);
    IpRow pos = rb.fresh();
    add_term(pos, z1, d2);
    add_term(pos, z2, -d1);
    pos.rhs = rhs;
    pos.family = family;
    pos.name = name_prefix + "[" + std::to_string(z1) + "," + std::to_string(z2) + "]+";
    IpRow neg = rb.fresh();
    add_term(neg, z1, -d2);
    add_term(neg, z2, d1);
    neg.rhs = rhs;
    neg.family = family;
    neg.name = name_prefix + "[" + std::to_string(z1) + "," + std::to_string(z2) + "]-";
    ip.rows.push_back(std::move(pos));
    ip.rows.push_back(std::move(neg));
}

}  // namespace

IntegerProgram build_ip(const CellTable& table, const GroupStats& stats, const GroupErrorRates& errors,
                        const ConstraintSpec& spec, const SolveOptions& options) {
    int Z = table.n_groups;
    spec.validate(Z);
    if (stats.n_groups() != Z || errors.n_groups() != Z)
        throw std::invalid_argument("build_ip: stats/errors group count mismatch");

    IntegerProgram ip;
    ip.n_cells = table.n_cells();
    ip.has_abstain_flip_vars = spec.nontriviality_literal();
    ip.n_vars = 2 * ip.n_cells + (ip.has_abstain_flip_vars ? ip.n_cells : 0);

    ip.objective.assign(static_cast<size_t>(ip.n_vars), 0);
    ip.var_upper.assign(static_cast<size_t>(ip.n_vars), 0);
    for (int c = 0; c < ip.n_cells; ++c) {
        long long m = table.cell_size(c);
        ip.var_upper[static_cast<size_t>(ip.keep_var(c))] = m;
        ip.var_upper[static_cast<size_t>(ip.flip_var(c))] = m;
        if (ip.has_abstain_flip_vars) ip.var_upper[static_cast<size_t>(ip.abstain_flip_var(c))] = m;
        if (table.keep_is_error(c))
            ip.objective[static_cast<size_t>(ip.keep_var(c))] = 1;
        else
            ip.objective[static_cast<size_t>(ip.flip_var(c))] = 1;
    }

    RowBuilder rb{&ip};

    // cell capacity: keep + flip (+ abstain_flip) <= m
    for (int c = 0; c < ip.n_cells; ++c) {
        IpRow r = rb.fresh();
        r.coef[static_cast<size_t>(ip.keep_var(c))] = 1;
        r.coef[static_cast<size_t>(ip.flip_var(c))] = 1;
        if (ip.has_abstain_flip_vars) r.coef[static_cast<size_t>(ip.abstain_flip_var(c))] = 1;
        r.rhs = table.cell_size(c);
        r.family = "cell";
        r.name = "cell[" + std::to_string(c) + "]";
        ip.rows.push_back(std::move(r));
    }

    // disparity rows, both signs per unordered pair
    for (int z1 = 0; z1 < Z; ++z1) {
        for (int z2 = z1 + 1; z2 < Z; ++z2) {
            if (spec.fairness == Fairness::DP) {
                add_abs_pair_rows(
                    ip, rb, "disparity_dp", "disparity", spec.eps, stats.sizes[static_cast<size_t>(z1)],
                    stats.sizes[static_cast<size_t>(z2)],
                    [&](IpRow& r, int z, long long coef) { rb.add_accepted(r, z, coef); }, z1, z2);
            }
            if (spec.fairness == Fairness::EOp || spec.fairness == Fairness::EOd) {
                long long d1 = stats.label_counts[static_cast<size_t>(z1)][1];
                long long d2 = stats.label_counts[static_cast<size_t>(z2)][1];
                require_stratum(d1, z1, 1);
                require_stratum(d2, z2, 1);
                add_abs_pair_rows(
                    ip, rb, "disparity_tpr", "disparity", spec.eps, d1, d2,
                    [&](IpRow& r, int z, long long coef) { rb.add_tp(r, z, coef); }, z1, z2);
            }
            if (spec.fairness == Fairness::EOd) {
                long long d1 = stats.label_counts[static_cast<size_t>(z1)][0];
                long long d2 = stats.label_counts[static_cast<size_t>(z2)][0];
                require_stratum(d1, z1, 0);
                require_stratum(d2, z2, 0);
                add_abs_pair_rows(
                    ip, rb, "disparity_tnr", "disparity", spec.eps, d1, d2,
                    [&](IpRow& r, int z, long long coef) { rb.add_tn(r, z, coef); }, z1, z2);
            }
        }
    }

    // abstention: nonabst_z >= ceil((1 - delta_z) N_z)  ->  -nonabst_z <= -ceil(...)
    for (int z = 0; z < Z; ++z) {
        long long nz = stats.sizes[static_cast<size_t>(z)];
        Rat need = (Rat(1) - spec.delta[static_cast<size_t>(z)]) * Rat(nz);
        IpRow r = rb.fresh();
        rb.add_nonabst(r, z, -1);
        r.rhs = -need.ceil();
        r.family = "abstention";
        r.name = "abstention[" + std::to_string(z) + "]";
        ip.rows.push_back(std::move(r));
    }

    // no harm: q' err_z - p' nonabst_z <= 0 with e'_z = p'/q'
    for (int z = 0; z < Z; ++z) {
        Rat ep = errors.e_prime(z, spec.eta[static_cast<size_t>(z)]);
        IpRow r = rb.fresh();
        rb.add_err(r, table, z, static_cast<long long>(ep.den));
        rb.add_nonabst(r, z, -static_cast<long long>(ep.num));
        r.rhs = 0;
        r.family = "no_harm";
        r.name = "no_harm[" + std::to_string(z) + "]";
        ip.rows.push_back(std::move(r));
    }

    // equal abstention: per label y, |na_{z1,y}/d1 - na_{z2,y}/d2| <= sigma_y
    if (spec.sigma) {
        for (int y = 0; y < 2; ++y) {
            for (int z1 = 0; z1 < Z; ++z1) {
                for (int z2 = z1 + 1; z2 < Z; ++z2) {
                    long long d1 = stats.label_counts[static_cast<size_t>(z1)][y];
                    long long d2 = stats.label_counts[static_cast<size_t>(z2)][y];
                    require_stratum(d1, z1, y);
                    require_stratum(d2, z2, y);
                    add_abs_pair_rows(
                        ip, rb, "equal_abstention_y" + std::to_string(y), "equal_abstention",
                        (*spec.sigma)[static_cast<size_t>(y)], d1, d2,
                        [&](IpRow& r, int z, long long coef) { rb.add_nonabst_y(r, z, y, coef); }, z1, z2);
                }
            }
        }
    }

    // non-triviality: errors >= ceil(e_{o,z} N_z)
    if (spec.nontriviality) {
        for (int z = 0; z < Z; ++z) {
            long long nz = stats.sizes[static_cast<size_t>(z)];
            i128 floor_errors = ((*spec.nontriviality)[static_cast<size_t>(z)] * Rat(nz)).ceil();
            IpRow r = rb.fresh();
            if (spec.nontriviality_nonabstained_only) {
                rb.add_err(r, table, z, -1);
                r.rhs = -floor_errors;
            } else {
                // all-sample errors: wrong-pred cells contribute m_c - flip - abstain_flip,
                // right-pred cells contribute flip + abstain_flip
                i128 const_part = 0;
                for (int y = 0; y < 2; ++y)
                    for (int b = 0; b < 2; ++b) {
                        int c = cell_index(z, y, b);
                        bool wrong = table.keep_is_error(c) != 0;
                        long long sgn = wrong ? 1 : -1;
                        r.coef[static_cast<size_t>(ip.flip_var(c))] += sgn;
                        r.coef[static_cast<size_t>(ip.abstain_flip_var(c))] += sgn;
                        if (wrong) const_part += table.cell_size(c);
                    }
                r.rhs = const_part - floor_errors;
            }
            r.family = "non_triviality";
            r.name = "non_triviality[" + std::to_string(z) + "]";
            ip.rows.push_back(std::move(r));
        }
    }

    // probe: label-0 cells may not abstain -> keep + flip = m exactly
    if (options.forbid_label0_abstention) {
        for (int c = 0; c < ip.n_cells; ++c) {
            if (table.key_of(c).label != 0) continue;
            IpRow r = rb.fresh();
            r.coef[static_cast<size_t>(ip.keep_var(c))] = -1;
            r.coef[static_cast<size_t>(ip.flip_var(c))] = -1;
            r.rhs = -table.cell_size(c);
            r.family = "probe";
            r.name = "no_y0_abstention[" + std::to_string(c) + "]";
            ip.rows.push_back(std::move(r));
            if (ip.has_abstain_flip_vars) {
                IpRow rg = rb.fresh();
                rg.coef[static_cast<size_t>(ip.abstain_flip_var(c))] = 1;
                rg.rhs = 0;
                rg.family = "probe";
                rg.name = "no_y0_abstain_flip[" + std::to_string(c) + "]";
                ip.rows.push_back(std::move(rg));
            }
        }
    }

    return ip;
}

CellCounts counts_from_assignment(const IntegerProgram& ip, const CellTable& table,
                                  const std::vector<long long>& x) {
    CellCounts counts;
    counts.cells.assign(static_cast<size_t>(ip.n_cells), {});
    for (int c = 0; c < ip.n_cells; ++c) {
        auto& pc = counts.cells[static_cast<size_t>(c)];
        pc.n_keep = x[static_cast<size_t>(ip.keep_var(c))];
        pc.n_flip = x[static_cast<size_t>(ip.flip_var(c))];
        pc.n_abstain = table.cell_size(c) - pc.n_keep - pc.n_flip;
        pc.n_abstain_flip = ip.has_abstain_flip_vars ? x[static_cast<size_t>(ip.abstain_flip_var(c))] : 0;
    }
    return counts;
}

}  // namespace fan
