#include "fan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fan/simplex.hpp"

namespace fan {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::FeasibleBestEffort: return "FeasibleBestEffort";
        case SolveStatus::Infeasible: return "Infeasible";
    }
    return "?";
}

std::vector<ConstraintValue> violations(const std::vector<ConstraintValue>& report) {
    std::vector<ConstraintValue> v;
    for (const auto& c : report)
        if (!c.satisfied()) v.push_back(c);
    return v;
}

std::vector<ConstraintValue> verify_solution(const IpSolution& solution, const CellTable& table,
                                             const GroupStats& stats, const GroupErrorRates& errors,
                                             const ConstraintSpec& spec) {
    return constraint_values(solution.counts, table, stats, errors, spec);
}

// ---------------------------------------------------------------------------
// branch and bound
// ---------------------------------------------------------------------------

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPivotTol = 1e-9;

struct Node {
    std::vector<long long> lb, ub;
    double bound;  // LP bound inherited from the parent
};

// exact integer feasibility of an assignment against rows and box bounds
bool assignment_feasible(const IntegerProgram& ip, const std::vector<long long>& x,
                         const std::vector<long long>& lb, const std::vector<long long>& ub) {
    for (int j = 0; j < ip.n_vars; ++j)
        if (x[static_cast<size_t>(j)] < lb[static_cast<size_t>(j)] ||
            x[static_cast<size_t>(j)] > ub[static_cast<size_t>(j)])
            return false;
    for (const IpRow& row : ip.rows) {
        i128 lhs = 0;
        for (int j = 0; j < ip.n_vars; ++j)
            lhs += static_cast<i128>(row.coef[static_cast<size_t>(j)]) * x[static_cast<size_t>(j)];
        if (lhs > row.rhs) return false;
    }
    return true;
}

long long assignment_objective(const std::vector<long long>& obj, const std::vector<long long>& x) {
    long long v = 0;
    for (size_t j = 0; j < obj.size(); ++j) v += obj[j] * x[j];
    return v;
}

template <class T>
struct LpData {
    std::vector<std::vector<T>> a;
    std::vector<T> b, c;
};

template <class T>
LpData<T> make_lp(const IntegerProgram& ip, const std::vector<long long>& objective,
                  const std::vector<long long>& lb, const std::vector<long long>& ub) {
    LpData<T> lp;
    size_t nv = static_cast<size_t>(ip.n_vars);
    lp.c.assign(nv, T(0));
    for (size_t j = 0; j < nv; ++j) lp.c[j] = T(static_cast<long long>(objective[j]));
    for (const IpRow& row : ip.rows) {
        std::vector<T> r(nv, T(0));
        for (size_t j = 0; j < nv; ++j) r[j] = T(row.coef[j]);
        lp.a.push_back(std::move(r));
        lp.b.push_back(T(static_cast<long long>(row.rhs)));
    }
    for (size_t j = 0; j < nv; ++j) {
        if (ub[j] < ip.var_upper[j]) {
            std::vector<T> r(nv, T(0));
            r[j] = T(1);
            lp.a.push_back(std::move(r));
            lp.b.push_back(T(ub[j]));
        }
        if (lb[j] > 0) {
            std::vector<T> r(nv, T(0));
            r[j] = T(-1);
            lp.a.push_back(std::move(r));
            lp.b.push_back(T(-lb[j]));
        }
    }
    return lp;
}

LpResult<double> solve_node_double(const IntegerProgram& ip, const std::vector<long long>& objective,
                                   const Node& node) {
    auto lp = make_lp<double>(ip, objective, node.lb, node.ub);
    return solve_lp<double>(lp.a, lp.b, lp.c, kPivotTol);
}

LpResult<Rat> solve_node_exact(const IntegerProgram& ip, const std::vector<long long>& objective,
                               const Node& node) {
    auto lp = make_lp<Rat>(ip, objective, node.lb, node.ub);
    return solve_lp<Rat>(lp.a, lp.b, lp.c, Rat(0));
}

// families of rows violated at a point; used for the infeasibility certificate
std::string binding_families(const IntegerProgram& ip, const std::vector<Rat>& x) {
    std::vector<std::string> fams;
    for (const IpRow& row : ip.rows) {
        Rat lhs(0);
        for (int j = 0; j < ip.n_vars; ++j)
            if (row.coef[static_cast<size_t>(j)] != 0)
                lhs += Rat(row.coef[static_cast<size_t>(j)]) * x[static_cast<size_t>(j)];
        if (lhs > Rat(static_cast<long long>(row.rhs))) {
            if (std::find(fams.begin(), fams.end(), row.family) == fams.end()) fams.push_back(row.family);
        }
    }
    std::string out;
    for (size_t i = 0; i < fams.size(); ++i) out += (i ? ", " : "") + fams[i];
    return out.empty() ? "none" : out;
}

struct BnbOutcome {
    bool has_incumbent{false};
    std::vector<long long> incumbent;
    long long objective{0};
    long long nodes{0};
    bool cap_hit{false};
    double open_bound{0.0};
    bool root_infeasible_exact{false};
    std::string root_certificate;
};

BnbOutcome branch_and_bound(const IntegerProgram& ip, const std::vector<long long>& objective,
                            long long node_cap) {
    BnbOutcome out;
    size_t nv = static_cast<size_t>(ip.n_vars);

    Node root;
    root.lb.assign(nv, 0);
    root.ub = ip.var_upper;
    root.bound = -std::numeric_limits<double>::infinity();

    std::vector<Node> stack;
    stack.push_back(std::move(root));
    double best_obj = std::numeric_limits<double>::infinity();
    bool is_root = true;

    while (!stack.empty()) {
        if (++out.nodes > node_cap) {
            out.cap_hit = true;
            double open = stack.front().bound;
            for (const Node& n : stack) open = std::min(open, n.bound);
            out.open_bound = open;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        bool at_root = is_root;
        is_root = false;

        if (out.has_incumbent && node.bound > best_obj - 1.0 + 1e-4) continue;

        LpResult<double> lp = solve_node_double(ip, objective, node);
        if (lp.status == LpStatus::Unbounded)
            throw std::runtime_error("solver: LP relaxation unbounded (bad row set)");

        bool feasible = lp.status == LpStatus::Optimal;
        std::vector<double> x;
        double obj = 0.0;
        if (feasible) {
            x = std::move(lp.x);
            obj = lp.objective;
        } else {
            // every infeasibility verdict is re-proved in exact arithmetic
            // before the node is pruned
            LpResult<Rat> ex = solve_node_exact(ip, objective, node);
            if (ex.status == LpStatus::Optimal) {
                feasible = true;
                x.assign(nv, 0.0);
                for (size_t j = 0; j < nv; ++j) x[j] = ex.x[j].to_double();
                obj = ex.objective.to_double();
            } else if (at_root) {
                out.root_infeasible_exact = true;
                out.root_certificate = binding_families(ip, ex.x);
            }
        }
        if (!feasible) continue;
        if (out.has_incumbent && obj > best_obj - 1.0 + 1e-4) continue;

        // most fractional variable, lowest index on ties
        int branch_var = -1;
        double branch_dist = 1.0;
        for (size_t j = 0; j < nv; ++j) {
            double fr = x[j] - std::floor(x[j]);
            if (fr > kIntTol && fr < 1.0 - kIntTol) {
                double dist = std::abs(fr - 0.5);
                if (dist < branch_dist - 1e-12) {
                    branch_dist = dist;
                    branch_var = static_cast<int>(j);
                }
            }
        }

        if (branch_var < 0) {
            std::vector<long long> xi(nv, 0);
            for (size_t j = 0; j < nv; ++j) xi[j] = std::llround(x[j]);
            if (assignment_feasible(ip, xi, node.lb, node.ub)) {
                long long v = assignment_objective(objective, xi);
                if (!out.has_incumbent || v < out.objective) {
                    out.has_incumbent = true;
                    out.objective = v;
                    out.incumbent = xi;
                    best_obj = static_cast<double>(v);
                }
            } else {
                // borderline float vertex; arbitrate exactly
                LpResult<Rat> ex = solve_node_exact(ip, objective, node);
                if (ex.status != LpStatus::Optimal) continue;
                int ebv = -1;
                Rat half(1, 2);
                Rat edist(1);
                for (size_t j = 0; j < nv; ++j) {
                    Rat fr = ex.x[j] - Rat(static_cast<long long>(ex.x[j].floor()));
                    if (fr.num != 0) {
                        Rat dist = (fr - half).abs();
                        if (dist < edist) {
                            edist = dist;
                            ebv = static_cast<int>(j);
                        }
                    }
                }
                if (ebv < 0) {
                    for (size_t j = 0; j < nv; ++j) xi[j] = static_cast<long long>(ex.x[j].floor());
                    if (assignment_feasible(ip, xi, node.lb, node.ub)) {
                        long long v = assignment_objective(objective, xi);
                        if (!out.has_incumbent || v < out.objective) {
                            out.has_incumbent = true;
                            out.objective = v;
                            out.incumbent = xi;
                            best_obj = static_cast<double>(v);
                        }
                    }
                } else {
                    Rat v = ex.x[static_cast<size_t>(ebv)];
                    Node down = node, up = node;
                    down.ub[static_cast<size_t>(ebv)] = static_cast<long long>(v.floor());
                    up.lb[static_cast<size_t>(ebv)] = static_cast<long long>(v.floor()) + 1;
                    down.bound = up.bound = ex.objective.to_double();
                    stack.push_back(std::move(up));
                    stack.push_back(std::move(down));
                }
            }
            continue;
        }

        double v = x[static_cast<size_t>(branch_var)];
        Node down = node, up = node;
        down.ub[static_cast<size_t>(branch_var)] = static_cast<long long>(std::floor(v));
        up.lb[static_cast<size_t>(branch_var)] = static_cast<long long>(std::floor(v)) + 1;
        down.bound = up.bound = obj;
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));
    }
    return out;
}

}  // namespace

IpSolution solve(const CellTable& table, const GroupStats& stats, const GroupErrorRates& errors,
                 const ConstraintSpec& spec, const SolveOptions& options) {
    IntegerProgram ip = build_ip(table, stats, errors, spec, options);

    BnbOutcome primary = branch_and_bound(ip, ip.objective, options.node_cap);

    IpSolution sol;
    sol.nodes_explored = primary.nodes;

    if (!primary.has_incumbent) {
        if (primary.cap_hit)
            throw std::runtime_error("solver: node cap exceeded before any feasible solution was found");
        sol.status = SolveStatus::Infeasible;
        sol.note = primary.root_infeasible_exact
                       ? "LP relaxation infeasible at root; binding families: " + primary.root_certificate
                       : "no integer-feasible point (LP relaxation feasible)";
        return sol;
    }

    std::vector<long long> x = primary.incumbent;
    long long opt = primary.objective;

    if (!primary.cap_hit && options.minimize_abstentions_secondary) {
        // re-solve at the fixed optimum, maximizing non-abstentions
        IntegerProgram ip2 = ip;
        IpRow pin;
        pin.coef.assign(static_cast<size_t>(ip.n_vars), 0);
        for (int j = 0; j < ip.n_vars; ++j) pin.coef[static_cast<size_t>(j)] = ip.objective[static_cast<size_t>(j)];
        pin.rhs = opt;
        pin.family = "objective_pin";
        pin.name = "objective_pin";
        ip2.rows.push_back(std::move(pin));
        std::vector<long long> obj2(static_cast<size_t>(ip.n_vars), 0);
        for (int c = 0; c < ip.n_cells; ++c) {
            obj2[static_cast<size_t>(ip.keep_var(c))] = -1;
            obj2[static_cast<size_t>(ip.flip_var(c))] = -1;
        }
        BnbOutcome secondary = branch_and_bound(ip2, obj2, options.node_cap);
        sol.nodes_explored += secondary.nodes;
        if (secondary.has_incumbent && !secondary.cap_hit) x = secondary.incumbent;
    }

    sol.counts = counts_from_assignment(ip, table, x);
    sol.objective = counts_objective(sol.counts, table);
    sol.constraint_report = constraint_values(sol.counts, table, stats, errors, spec);
    if (primary.cap_hit) {
        sol.status = SolveStatus::FeasibleBestEffort;
        double open = std::min(primary.open_bound, static_cast<double>(opt));
        sol.bound_gap = static_cast<double>(opt) - std::ceil(open - 1e-9);
        sol.note = "node cap reached; objective is an upper bound";
    } else {
        sol.status = SolveStatus::Optimal;
    }
    return sol;
}

// ---------------------------------------------------------------------------
// brute force oracle
// ---------------------------------------------------------------------------

namespace {

struct Tally {
    long long accepted{0}, tp{0}, tn{0}, nonabst{0}, err{0}, err_all{0};
    long long nonabst_y[2]{0, 0};
    long long abstained{0};
};

struct OracleContext {
    int n_groups{0};
    std::vector<long long> group_size;
    std::vector<std::array<long long, 2>> label_size;
    std::vector<long long> abstain_cap;  // floor(delta_z N_z)
    const ConstraintSpec* spec{nullptr};
    std::vector<Rat> eprime;
};

bool leaf_feasible(const OracleContext& cx, const std::vector<Tally>& t) {
    const ConstraintSpec& spec = *cx.spec;
    int Z = cx.n_groups;
    for (int z = 0; z < Z; ++z) {
        const Tally& g = t[static_cast<size_t>(z)];
        // abstention: nonabst/N >= 1 - delta  <=>  abstained <= floor(delta N)
        if (g.abstained > cx.abstain_cap[static_cast<size_t>(z)]) return false;
        // no harm: err * q' <= p' * nonabst
        const Rat& ep = cx.eprime[static_cast<size_t>(z)];
        if (static_cast<i128>(g.err) * ep.den > ep.num * static_cast<i128>(g.nonabst)) return false;
        if (spec.nontriviality) {
            const Rat& fl = (*spec.nontriviality)[static_cast<size_t>(z)];
            long long count = spec.nontriviality_nonabstained_only ? g.err : g.err_all;
            if (static_cast<i128>(count) * fl.den < fl.num * static_cast<i128>(cx.group_size[static_cast<size_t>(z)]))
                return false;
        }
    }
    auto abs128 = [](i128 v) { return v < 0 ? -v : v; };
    for (int z1 = 0; z1 < Z; ++z1) {
        for (int z2 = z1 + 1; z2 < Z; ++z2) {
            if (spec.fairness == Fairness::DP) {
                i128 n1 = cx.group_size[static_cast<size_t>(z1)], n2 = cx.group_size[static_cast<size_t>(z2)];
                i128 gap = abs128(static_cast<i128>(t[static_cast<size_t>(z1)].accepted) * n2 -
                                  static_cast<i128>(t[static_cast<size_t>(z2)].accepted) * n1);
                if (gap * spec.eps.den > spec.eps.num * n1 * n2) return false;
            }
            if (spec.fairness == Fairness::EOp || spec.fairness == Fairness::EOd) {
                i128 d1 = cx.label_size[static_cast<size_t>(z1)][1], d2 = cx.label_size[static_cast<size_t>(z2)][1];
                i128 gap = abs128(static_cast<i128>(t[static_cast<size_t>(z1)].tp) * d2 -
                                  static_cast<i128>(t[static_cast<size_t>(z2)].tp) * d1);
                if (gap * spec.eps.den > spec.eps.num * d1 * d2) return false;
            }
            if (spec.fairness == Fairness::EOd) {
                i128 d1 = cx.label_size[static_cast<size_t>(z1)][0], d2 = cx.label_size[static_cast<size_t>(z2)][0];
                i128 gap = abs128(static_cast<i128>(t[static_cast<size_t>(z1)].tn) * d2 -
                                  static_cast<i128>(t[static_cast<size_t>(z2)].tn) * d1);
                if (gap * spec.eps.den > spec.eps.num * d1 * d2) return false;
            }
            if (spec.sigma) {
                for (int y = 0; y < 2; ++y) {
                    i128 d1 = cx.label_size[static_cast<size_t>(z1)][static_cast<size_t>(y)];
                    i128 d2 = cx.label_size[static_cast<size_t>(z2)][static_cast<size_t>(y)];
                    i128 gap = abs128(static_cast<i128>(t[static_cast<size_t>(z1)].nonabst_y[y]) * d2 -
                                      static_cast<i128>(t[static_cast<size_t>(z2)].nonabst_y[y]) * d1);
                    const Rat& s = (*spec.sigma)[static_cast<size_t>(y)];
                    if (gap * s.den > s.num * d1 * d2) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

IpSolution brute_force_solve(const std::vector<int>& group, const std::vector<int>& label,
                             const std::vector<int>& pred, const GroupErrorRates& errors,
                             const ConstraintSpec& spec, int cap) {
    size_t n = group.size();
    if (label.size() != n || pred.size() != n) throw std::invalid_argument("brute_force_solve: length mismatch");
    if (static_cast<int>(n) > cap)
        throw std::invalid_argument("brute_force_solve: N=" + std::to_string(n) + " exceeds cap " +
                                    std::to_string(cap));

    int Z = 0;
    for (int z : group) Z = std::max(Z, z + 1);
    spec.validate(Z);

    OracleContext cx;
    cx.n_groups = Z;
    cx.spec = &spec;
    cx.group_size.assign(static_cast<size_t>(Z), 0);
    cx.label_size.assign(static_cast<size_t>(Z), {0, 0});
    for (size_t i = 0; i < n; ++i) {
        ++cx.group_size[static_cast<size_t>(group[i])];
        ++cx.label_size[static_cast<size_t>(group[i])][static_cast<size_t>(label[i])];
    }
    bool need_y1 = spec.fairness != Fairness::DP;
    bool need_y0 = spec.fairness == Fairness::EOd;
    for (int z = 0; z < Z; ++z) {
        if ((need_y1 || spec.sigma) && cx.label_size[static_cast<size_t>(z)][1] == 0)
            throw std::domain_error("empty stratum: group " + std::to_string(z) + " has no samples with label 1");
        if ((need_y0 || spec.sigma) && cx.label_size[static_cast<size_t>(z)][0] == 0)
            throw std::domain_error("empty stratum: group " + std::to_string(z) + " has no samples with label 0");
        cx.abstain_cap.push_back(
            static_cast<long long>((spec.delta[static_cast<size_t>(z)] * Rat(cx.group_size[static_cast<size_t>(z)])).floor()));
        cx.eprime.push_back(errors.e_prime(z, spec.eta[static_cast<size_t>(z)]));
    }

    bool branch_abstain_flip = spec.nontriviality_literal();
    int n_states = branch_abstain_flip ? 4 : 3;

    std::vector<Tally> tally(static_cast<size_t>(Z));
    std::vector<uint8_t> omega(n, 1), flip(n, 0), best_omega, best_flip;
    long long best_obj = -1;
    long long cur_obj = 0;

    // states: 0 keep, 1 flip, 2 abstain (f=0), 3 abstain with f=1
    std::function<void(size_t)> rec = [&](size_t i) {
        if (best_obj >= 0 && cur_obj >= best_obj) return;  // objective only grows
        if (i == n) {
            if (leaf_feasible(cx, tally)) {
                best_obj = cur_obj;
                best_omega = omega;
                best_flip = flip;
            }
            return;
        }
        int z = group[i], y = label[i], b = pred[i];
        Tally& g = tally[static_cast<size_t>(z)];
        for (int st = 0; st < n_states; ++st) {
            Tally saved = g;
            long long saved_obj = cur_obj;
            int f = (st == 1 || st == 3) ? 1 : 0;
            int w = st <= 1 ? 1 : 0;
            int yhat = b ^ f;
            omega[i] = static_cast<uint8_t>(w);
            flip[i] = static_cast<uint8_t>(f);
            if (w == 1) {
                g.nonabst += 1;
                g.nonabst_y[y] += 1;
                if (yhat == 1) g.accepted += 1;
                if (yhat == 1 && y == 1) g.tp += 1;
                if (yhat == 0 && y == 0) g.tn += 1;
                if (yhat != y) {
                    g.err += 1;
                    cur_obj += 1;
                }
            } else {
                g.abstained += 1;
            }
            if (yhat != y) g.err_all += 1;
            if (g.abstained <= cx.abstain_cap[static_cast<size_t>(z)]) rec(i + 1);  // abstention only grows
            g = saved;
            cur_obj = saved_obj;
        }
        omega[i] = 1;
        flip[i] = 0;
    };
    rec(0);

    IpSolution sol;
    if (best_obj < 0) {
        sol.status = SolveStatus::Infeasible;
        sol.note = "exhaustive search found no feasible assignment";
        return sol;
    }
    sol.status = SolveStatus::Optimal;
    sol.objective = best_obj;
    sol.counts.cells.assign(static_cast<size_t>(Z) * 4, {});
    for (size_t i = 0; i < n; ++i) {
        auto& pc = sol.counts.cells[static_cast<size_t>(cell_index(group[i], label[i], pred[i]))];
        if (best_omega[i] == 0) {
            ++pc.n_abstain;
            if (best_flip[i]) ++pc.n_abstain_flip;
        } else if (best_flip[i]) {
            ++pc.n_flip;
        } else {
            ++pc.n_keep;
        }
    }
    return sol;
}

// ---------------------------------------------------------------------------
// McCormick linearization
// ---------------------------------------------------------------------------

LinearizedSystem mccormick_linearize(const std::vector<int>& pred_labels) {
    LinearizedSystem sys;
    sys.pred = pred_labels;
    sys.sample_rows.reserve(pred_labels.size());
    for (int yb : pred_labels) {
        if (yb != 0 && yb != 1) throw std::domain_error("mccormick_linearize: predictions must be binary");
        double s = 1.0 - 2.0 * yb;  // yhat = yb + s*f
        std::array<McCormickRow, 4> rows{};
        rows[0] = {0, 0, 1, 0, Sense::GE};                              // u >= 0
        rows[1] = {-1, 0, 1, 0, Sense::LE};                             // u <= omega
        rows[2] = {0, -s, 1, static_cast<double>(yb), Sense::LE};       // u <= yhat
        rows[3] = {-1, -s, 1, static_cast<double>(yb) - 1, Sense::GE};  // u >= yhat + omega - 1
        sys.sample_rows.push_back(rows);
    }
    return sys;
}

bool LinearizedSystem::rows_satisfied(size_t n, int omega, int f, int u) const {
    for (const McCormickRow& r : sample_rows[n]) {
        double lhs = r.c_omega * omega + r.c_f * f + r.c_u * u;
        if (r.sense == Sense::LE && lhs > r.rhs + 1e-12) return false;
        if (r.sense == Sense::GE && lhs < r.rhs - 1e-12) return false;
    }
    return true;
}

}  // namespace fan
