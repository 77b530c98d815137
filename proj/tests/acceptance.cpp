// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Thresholds and tolerances are pinned in the assertions.

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "fan/adjust.hpp"
#include "fan/feasibility.hpp"
#include "fan/metrics.hpp"
#include "fan/solver.hpp"
#include "fan/surrogate.hpp"
#include "helpers.hpp"

using namespace fan;
using fan::testing::Instance;
using fan::testing::make_instance;
using fan::testing::random_spec;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. solver vs brute force on 100 seeded instances, < 2 min
// ---------------------------------------------------------------------------
void criterion_1() {
    Rng rng(1001);
    auto t0 = std::chrono::steady_clock::now();
    int agree = 0;
    const int total = 100;
    for (int i = 0; i < total; ++i) {
        int n = 4 + static_cast<int>(rng.uniform_int(9));
        Instance ins = make_instance(rng, n);
        fan::testing::SpecOptions opt;
        opt.allow_nontriviality = n <= 10;  // keeps the 4-state enumeration quick
        ConstraintSpec spec = random_spec(rng, ins, fan::testing::fairness_of(i), opt);
        IpSolution fast = solve(ins.table, ins.stats, ins.errors, spec);
        IpSolution slow = brute_force_solve(ins.group, ins.label, ins.pred, ins.errors, spec);
        bool ok = fast.status == slow.status &&
                  (fast.status != SolveStatus::Optimal || fast.objective == slow.objective);
        if (ok) ++agree;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream d;
    d << agree << "/" << total << " matched in " << secs << "s";
    report(1, agree == total && secs < 120.0, "solver matches the exhaustive oracle on status and objective",
           d.str());
}

// ---------------------------------------------------------------------------
// 2. closed-form minimum delta values
// ---------------------------------------------------------------------------
void criterion_2() {
    FeasibilityInputs in;
    in.tau = {0.6, 0.3};
    in.e = {0.1, 0.1};
    in.eta = {0.0, 0.0};
    in.delta = {1.0, 1.0};
    in.eps = 0.05;
    double v1 = dp_min_delta(in, 0, 1);
    bool ok1 = std::abs(v1 - 1.0 / 18.0) <= 1e-9;
    in.eps = 0.1;
    double v2 = dp_min_delta(in, 0, 1);
    bool ok2 = v2 <= 0.0 + 1e-15;
    in.eps = 0.05;
    in.tau = {0.4, 0.4};
    double v3 = dp_min_delta(in, 0, 1);
    bool ok3 = v3 < 0.0;
    std::ostringstream d;
    d << "min delta " << v1 << " (expect 0.0555...), eps=0.1 -> " << v2 << ", balanced -> " << v3;
    report(2, ok1 && ok2 && ok3, "minimum-delta closed form reproduces the worked values", d.str());
}

// ---------------------------------------------------------------------------
// 3. solver transition along a delta sweep within 1/200 of the formula
// ---------------------------------------------------------------------------
void criterion_3() {
    Rng rng(3003);
    const long long nz = 200;
    int tested = 0, ok = 0;
    std::ostringstream detail;
    while (tested < 20) {
        long long pos_hi = 110 + static_cast<long long>(rng.uniform_int(51));   // tau_hi in [0.55, 0.80]
        long long pos_lo = 40 + static_cast<long long>(rng.uniform_int(51));    // tau_lo in [0.20, 0.45]
        long long err_hi = 10 + static_cast<long long>(rng.uniform_int(31));
        long long err_lo = 10 + static_cast<long long>(rng.uniform_int(31));
        long long eps_k = rng.uniform_int(21);  // eps in {0, ..., 0.10}

        FeasibilityInputs in;
        in.tau = {static_cast<double>(pos_hi) / nz, static_cast<double>(pos_lo) / nz};
        in.e = {static_cast<double>(err_hi) / nz, static_cast<double>(err_lo) / nz};
        in.eta = {0.0, 0.0};
        in.delta = {1.0, 1.0};
        in.eps = static_cast<double>(eps_k) / nz;
        double boundary = dp_min_delta(in, 0, 1);
        if (boundary < 0.05 || boundary > 0.9) continue;  // keep the transition interior
        ++tested;

        Instance ei = fan::testing::make_exact_instance(rng, nz, pos_hi, pos_lo, err_hi, err_lo);
        long long center = static_cast<long long>(std::floor(boundary * nz));
        double transition = 2.0;
        bool all_infeasible = true;
        for (long long k = std::max<long long>(0, center - 4); k <= std::min<long long>(nz, center + 4); ++k) {
            ConstraintSpec spec;
            spec.fairness = Fairness::DP;
            spec.eps = Rat(eps_k, nz);
            spec.delta = {Rat(k, nz), Rat(1)};  // sweep the higher-qualification group
            spec.eta = {Rat(0), Rat(0)};
            IpSolution sol = solve(ei.table, ei.stats, ei.errors, spec);
            if (sol.status != SolveStatus::Infeasible) {
                transition = std::min(transition, static_cast<double>(k) / nz);
                all_infeasible = false;
            }
        }
        bool good = !all_infeasible && std::abs(transition - boundary) <= 1.0 / nz + 1e-12;
        if (good) ++ok;
        if (!good && detail.str().empty())
            detail << "first miss: boundary " << boundary << " vs transition " << transition;
    }
    std::ostringstream d;
    d << ok << "/20 parameterizations within 1/200" << (detail.str().empty() ? "" : "; " + detail.str());
    report(3, ok == 20, "feasible/infeasible transition tracks the closed-form boundary", d.str());
}

// ---------------------------------------------------------------------------
// 4. EOp/EOd always feasible; objective 0 without non-triviality
// ---------------------------------------------------------------------------
void criterion_4() {
    Rng rng(4004);
    int ok = 0;
    const int total = 100;
    for (int i = 0; i < total; ++i) {
        Instance ins = make_instance(rng, 4 + static_cast<int>(rng.uniform_int(9)));
        fan::testing::SpecOptions opt;
        opt.allow_nontriviality = false;
        opt.force_zero_delta = i % 4 == 0;
        opt.force_zero_eps = i % 5 == 0;
        ConstraintSpec spec = random_spec(rng, ins, i % 2 ? Fairness::EOp : Fairness::EOd, opt);
        IpSolution sol = solve(ins.table, ins.stats, ins.errors, spec);
        if (sol.status == SolveStatus::Optimal && sol.objective == 0) ++ok;
    }
    std::ostringstream d;
    d << ok << "/" << total << " feasible with objective 0";
    report(4, ok == total, "EOp/EOd specs are always feasible with trivial optimum 0", d.str());
}

// ---------------------------------------------------------------------------
// 5. non-triviality intervals
// ---------------------------------------------------------------------------
void criterion_5() {
    DeltaInterval a = eop_nontrivial_bounds(0.3, 0.0, 0.6);
    DeltaInterval b = eop_nontrivial_bounds(0.3, 0.0, 0.2);
    bool ok = std::abs(a.lo - 0.0) <= 1e-12 && std::abs(a.hi - 0.4) <= 1e-12 &&
              std::abs(b.lo - 0.1) <= 1e-12 && std::abs(b.hi - 0.8) <= 1e-12;
    std::ostringstream d;
    d << "[" << a.lo << "," << a.hi << "] and [" << b.lo << "," << b.hi << "]";
    report(5, ok, "non-triviality delta intervals reproduce exactly", d.str());
}

// ---------------------------------------------------------------------------
// 6. McCormick exactness by enumeration
// ---------------------------------------------------------------------------
void criterion_6() {
    LinearizedSystem sys = mccormick_linearize({0, 1});
    bool ok = true;
    for (size_t n = 0; n < 2 && ok; ++n)
        for (int omega = 0; omega <= 1 && ok; ++omega)
            for (int f = 0; f <= 1 && ok; ++f) {
                int yhat = LinearizedSystem::yhat_of(sys.pred[n], f);
                int count = 0, admissible = -1;
                for (int u = 0; u <= 1; ++u)
                    if (sys.rows_satisfied(n, omega, f, u)) {
                        ++count;
                        admissible = u;
                    }
                ok = count == 1 && admissible == yhat * omega;
            }
    report(6, ok, "the product-row set pins u = yhat * omega on all binary assignments", "");
}

// ---------------------------------------------------------------------------
// 7. prediction adjustment
// ---------------------------------------------------------------------------
void criterion_7() {
    Rng rng(7007);
    bool counts_ok = true, verify_ok = true, idem_ok = true;
    int solved = 0;
    int attempts = 0;
    while (solved < 50 && attempts < 500) {
        ++attempts;
        Instance ins = make_instance(rng, 4 + static_cast<int>(rng.uniform_int(9)));
        ConstraintSpec spec = random_spec(rng, ins, fan::testing::fairness_of(attempts));
        IpSolution sol = solve(ins.table, ins.stats, ins.errors, spec);
        if (sol.status != SolveStatus::Optimal) continue;
        ++solved;
        DecisionVector raw = decisions_from_counts(sol.counts, ins.table);
        DecisionVector canon = prediction_adjustment(raw, ins.table);
        CellCounts after = counts_from_decisions(canon, ins.table);
        for (int c = 0; c < ins.table.n_cells(); ++c) {
            const auto& x = sol.counts.cells[static_cast<size_t>(c)];
            const auto& y = after.cells[static_cast<size_t>(c)];
            if (x.n_abstain != y.n_abstain || x.n_keep != y.n_keep || x.n_flip != y.n_flip ||
                x.n_abstain_flip != y.n_abstain_flip)
                counts_ok = false;
        }
        IpSolution shadow = sol;
        shadow.counts = after;
        if (!violations(verify_solution(shadow, ins.table, ins.stats, ins.errors, spec)).empty())
            verify_ok = false;
        DecisionVector twice = prediction_adjustment(canon, ins.table);
        if (twice.omega != canon.omega || twice.flip != canon.flip) idem_ok = false;
    }

    // duplicate-consistency protocol: duplicate a fifth, re-solve, adjust, measure
    double min_rate = 1.0;
    for (int round = 0; round < 2; ++round) {
        Dataset d = gen_synthetic(7100 + round, 2, {500, 500}, {0.7, 0.4}, 0.9);
        MlpConfig cfg;
        cfg.hidden_dims = {12, 6};
        cfg.epochs = 40;
        cfg.batch_size = 32;
        cfg.learning_rate = 0.05;
        cfg.momentum = 0.9;
        cfg.seed = 7200 + static_cast<uint64_t>(round);
        BaselineModel model = train_baseline(d, cfg);

        Dataset dup = d;
        Rng pick(7300 + static_cast<uint64_t>(round));
        for (size_t k = 0; k < d.size() / 5; ++k)
            dup.samples.push_back(d.samples[pick.uniform_int(d.size())]);
        std::vector<double> scores = score(model, dup);
        std::vector<int> pred = predicted_labels(scores, model.t0);
        CellTable table = build_cells(dup, pred, scores);
        GroupStats stats = group_stats(dup);
        GroupErrorRates errors = group_error_rates(dup, pred);

        ConstraintSpec spec;
        spec.fairness = round == 0 ? Fairness::DP : Fairness::EOd;
        spec.eps = Rat(1, 50);
        spec.delta.assign(2, Rat(1, 10));
        spec.eta.assign(2, Rat(1, 10));
        IpSolution sol = solve(table, stats, errors, spec);
        if (sol.status != SolveStatus::Optimal) {
            min_rate = -1.0;
            break;
        }
        DecisionVector canon = prediction_adjustment(decisions_from_counts(sol.counts, table), table);
        min_rate = std::min(min_rate, consistency_rate(canon, dup));
    }

    std::ostringstream d;
    d << solved << " solved instances; counts " << (counts_ok ? "ok" : "BROKEN") << ", verify "
      << (verify_ok ? "ok" : "BROKEN") << ", idempotent " << (idem_ok ? "yes" : "NO")
      << ", duplicate consistency " << min_rate;
    report(7, solved == 50 && counts_ok && verify_ok && idem_ok && min_rate >= 0.99,
           "prediction adjustment preserves counts/constraints and keeps duplicates consistent", d.str());
}

// ---------------------------------------------------------------------------
// 8. equal-abstention constraints never improve the optimum
// ---------------------------------------------------------------------------
void criterion_8() {
    Rng rng(8008);
    int compared = 0, ok = 0, attempts = 0;
    while (compared < 50 && attempts < 600) {
        ++attempts;
        Instance ins = make_instance(rng, 4 + static_cast<int>(rng.uniform_int(9)));
        fan::testing::SpecOptions opt;
        opt.allow_sigma = false;
        opt.allow_nontriviality = false;
        ConstraintSpec spec = random_spec(rng, ins, fan::testing::fairness_of(attempts), opt);
        ConstraintSpec with_sigma = spec;
        with_sigma.sigma = {Rat(1 + static_cast<long long>(rng.uniform_int(3)), 10),
                            Rat(1 + static_cast<long long>(rng.uniform_int(3)), 10)};
        IpSolution without = solve(ins.table, ins.stats, ins.errors, spec);
        IpSolution with = solve(ins.table, ins.stats, ins.errors, with_sigma);
        if (without.status != SolveStatus::Optimal || with.status != SolveStatus::Optimal) continue;
        ++compared;
        if (with.objective >= without.objective) ++ok;
    }
    std::ostringstream d;
    d << ok << "/" << compared << " instances with objective(with sigma) >= objective(without)";
    report(8, compared == 50 && ok == 50, "abstention-gap constraints never decrease the optimum", d.str());
}

// ---------------------------------------------------------------------------
// 9. forcing zero label-0 abstention changes nothing under DP/EOp
// ---------------------------------------------------------------------------
void criterion_9() {
    Rng rng(9009);
    int compared = 0, ok = 0, attempts = 0;
    while (compared < 50 && attempts < 600) {
        ++attempts;
        Instance ins = make_instance(rng, 4 + static_cast<int>(rng.uniform_int(9)));
        fan::testing::SpecOptions opt;
        opt.allow_nontriviality = false;
        ConstraintSpec spec =
            random_spec(rng, ins, attempts % 2 ? Fairness::DP : Fairness::EOp, opt);
        IpSolution plain = solve(ins.table, ins.stats, ins.errors, spec);
        if (plain.status != SolveStatus::Optimal) continue;
        ++compared;
        SolveOptions probe;
        probe.forbid_label0_abstention = true;
        IpSolution pinned = solve(ins.table, ins.stats, ins.errors, spec, probe);
        if (pinned.status == SolveStatus::Optimal && pinned.objective == plain.objective) ++ok;
    }
    std::ostringstream d;
    d << ok << "/" << compared << " instances unchanged by the zero-abstention pin";
    report(9, compared == 50 && ok == 50,
           "label-0 samples never need abstention under DP/EOp (status and optimum unchanged)", d.str());
}

// ---------------------------------------------------------------------------
// 10. end-to-end desk-scale run
// ---------------------------------------------------------------------------
void criterion_10() {
    Dataset d = gen_synthetic(10010, 2, {1000, 1000}, {0.7, 0.4}, 0.7);
    MlpConfig bcfg;
    bcfg.hidden_dims = {16, 8};
    bcfg.epochs = 60;
    bcfg.batch_size = 32;
    bcfg.learning_rate = 0.05;
    bcfg.momentum = 0.9;
    bcfg.seed = 10020;
    BaselineModel model = train_baseline(d, bcfg);
    std::vector<double> scores = score(model, d);
    std::vector<int> pred = predicted_labels(scores, model.t0);
    CellTable table = build_cells(d, pred, scores);
    GroupStats stats = group_stats(d);
    GroupErrorRates errors = group_error_rates(d, pred);

    ConstraintSpec spec;
    spec.fairness = Fairness::EOd;
    spec.eps = Rat(1, 20);
    spec.delta.assign(2, Rat(1, 5));
    spec.eta.assign(2, Rat(0));

    SolveOptions opt;
    opt.minimize_abstentions_secondary = true;
    IpSolution sol = solve(table, stats, errors, spec, opt);
    bool stage1_ok = sol.status == SolveStatus::Optimal &&
                     violations(verify_solution(sol, table, stats, errors, spec)).empty();

    DecisionVector canon = prediction_adjustment(decisions_from_counts(sol.counts, table), table);
    SurrogateConfig scfg;
    scfg.mlp.hidden_dims = {32, 16};
    scfg.mlp.epochs = 120;
    scfg.mlp.batch_size = 32;
    scfg.mlp.learning_rate = 0.05;
    scfg.mlp.momentum = 0.9;
    scfg.mlp.seed = 10030;
    StageTwoResult st = train_surrogates(d, model, canon, scfg);
    bool surr_ok = st.ab.train_accuracy >= 0.85 && st.fb.train_accuracy >= 0.85;

    std::vector<FanOutput> outs = fan_predict_all(st.model, d);
    EvalReport fan_rep = evaluate(d, outs, errors, spec);
    DecisionVector keep_all;
    keep_all.omega.assign(d.size(), 1);
    keep_all.flip.assign(d.size(), 0);
    EvalReport base_rep = evaluate(d, outputs_from_decisions(keep_all, pred), errors, spec);
    BaselineComparison cmp = compare_to_baseline(fan_rep, base_rep);
    auto md = fan_rep.max_disparity();
    double fan_disp = md ? md->to_double() : 0.0;
    bool soft_disp = fan_disp <= spec.eps.to_double() + 0.05;
    bool soft_acc = cmp.min_group_accuracy_increase >= -0.02;

    std::ostringstream detail;
    detail << "stage I " << (stage1_ok ? "exact" : "VIOLATED") << "; ab=" << st.ab.train_accuracy
           << " fb=" << st.fb.train_accuracy << "; composed disparity " << fan_disp << " (soft bound "
           << spec.eps.to_double() + 0.05 << (soft_disp ? " ok" : " MISSED - flagged") << "); min group acc delta "
           << cmp.min_group_accuracy_increase << (soft_acc ? " (soft ok)" : " (soft MISSED - flagged)")
           << "; full-scale tabular-benchmark numbers intentionally not reproduced";
    report(10, stage1_ok && surr_ok, "end-to-end desk-scale run", detail.str());
}

// ---------------------------------------------------------------------------
// 11. unconditioned acceptance-rate convention
// ---------------------------------------------------------------------------
void criterion_11() {
    Dataset d;
    d.n_groups = 1;
    d.feature_dim = 1;
    std::vector<int> pred;
    for (int i = 0; i < 10; ++i) {
        int p = i < 3 ? 1 : 0;
        d.samples.push_back({{p ? 0.8 : 0.2}, 0, p});
        pred.push_back(p);
    }
    GroupErrorRates errors = group_error_rates(d, pred);
    DecisionVector dv;
    dv.omega.assign(10, 1);
    dv.flip.assign(10, 0);
    dv.omega[5] = 0;  // abstain one negative-predicted sample (0.1 of the group)
    std::vector<FanOutput> outs = outputs_from_decisions(dv, pred);
    long long accepted = 0;
    for (const auto& o : outs)
        if (!o.abstained && o.label == 1) ++accepted;
    Rat rate(accepted, 10);
    bool ok = rate == Rat(3, 10);
    std::ostringstream detail;
    detail << "acceptance " << rate.str() << " (expect 3/10)";
    report(11, ok, "abstaining negative predictions leaves the acceptance rate at 0.30", detail.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0)
        std::cout << "all criteria passed" << std::endl;
    else
        std::cout << g_failures << " criteria failed" << std::endl;
    return g_failures;
}
