// Command-line pipeline driver. Stages exchange versioned JSON artifacts in
// the output directory, so any stage can be re-run from its upstream
// artifacts alone:
//
//   gen-synth        config -> dataset.json (synthetic generator or CSV loader)
//   train-baseline   dataset.json -> baseline.json
//   solve            dataset + baseline -> solution.json       (exit 2 if infeasible)
//   adjust           dataset + baseline + solution -> decisions.json
//   train-surrogate  dataset + baseline + decisions -> fan_model/
//   eval             dataset + baseline + decisions [+ fan_model] -> eval.json
//   pipeline         all of the above in order
//   sweep            dataset + baseline + grid -> sweep.csv

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "fan/adjust.hpp"
#include "fan/feasibility.hpp"
#include "fan/io.hpp"
#include "fan/metrics.hpp"

namespace fan {
namespace {

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::runtime_error("config: unknown key '" + it.key() + "' in " + where);
    }
}

struct RunConfig {
    std::string output_dir{"out"};
    double t0{0.5};

    std::string data_source{"synthetic"};
    uint64_t synth_seed{1};
    int synth_groups{2};
    std::vector<long long> synth_sizes{1000, 1000};
    std::vector<double> synth_tau{0.7, 0.4};
    double synth_noise{0.8};
    std::string csv_path;
    CsvSchema csv_schema;
    std::array<double, 3> split_fractions{0.8, 0.1, 0.1};
    uint64_t split_seed{7};

    MlpConfig baseline;
    SurrogateConfig surrogate;

    Json constraints;  // materialized once n_groups is known
    SolveOptions solver;
    bool prefer_fewer_abstentions{true};
    PaOrder pa_order{PaOrder::AbstainFlipKeep};

    std::vector<double> sweep_delta, sweep_eps, sweep_eta, sweep_sigma;
    std::string sweep_stage{"ip"};
    int sweep_workers{4};
};

RunConfig parse_config(const Json& j) {
    check_keys(j, {"version", "output_dir", "t0", "data", "baseline", "surrogate", "constraints", "solver",
                   "adjust", "sweep"},
               "top level");
    RunConfig c;
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("t0")) c.t0 = j["t0"].get<double>();
    if (c.t0 <= 0.0 || c.t0 >= 1.0) throw std::runtime_error("config: t0 must lie in (0,1)");

    if (j.contains("data")) {
        const Json& d = j["data"];
        check_keys(d, {"source", "synthetic", "csv", "split"}, "data");
        if (d.contains("source")) c.data_source = d["source"].get<std::string>();
        if (c.data_source != "synthetic" && c.data_source != "csv")
            throw std::runtime_error("config: data.source must be 'synthetic' or 'csv'");
        if (d.contains("synthetic")) {
            const Json& s = d["synthetic"];
            check_keys(s, {"seed", "n_groups", "sizes", "tau", "score_noise"}, "data.synthetic");
            if (s.contains("seed")) c.synth_seed = s["seed"].get<uint64_t>();
            if (s.contains("n_groups")) c.synth_groups = s["n_groups"].get<int>();
            if (s.contains("sizes")) c.synth_sizes = s["sizes"].get<std::vector<long long>>();
            if (s.contains("tau")) c.synth_tau = s["tau"].get<std::vector<double>>();
            if (s.contains("score_noise")) c.synth_noise = s["score_noise"].get<double>();
        }
        if (d.contains("csv")) {
            const Json& s = d["csv"];
            check_keys(s, {"path", "feature_cols", "group_col", "label_col", "minmax_scale"}, "data.csv");
            if (s.contains("path")) c.csv_path = s["path"].get<std::string>();
            if (s.contains("feature_cols"))
                c.csv_schema.feature_cols = s["feature_cols"].get<std::vector<std::string>>();
            if (s.contains("group_col")) c.csv_schema.group_col = s["group_col"].get<std::string>();
            if (s.contains("label_col")) c.csv_schema.label_col = s["label_col"].get<std::string>();
            if (s.contains("minmax_scale")) c.csv_schema.minmax_scale = s["minmax_scale"].get<bool>();
        }
        if (d.contains("split")) {
            const Json& s = d["split"];
            check_keys(s, {"fractions", "seed"}, "data.split");
            if (s.contains("fractions")) {
                auto f = s["fractions"].get<std::vector<double>>();
                if (f.size() != 3) throw std::runtime_error("config: split.fractions needs 3 entries");
                c.split_fractions = {f[0], f[1], f[2]};
            }
            if (s.contains("seed")) c.split_seed = s["seed"].get<uint64_t>();
        }
    }

    if (j.contains("baseline")) c.baseline = mlp_config_from_json(j["baseline"]);
    if (j.contains("surrogate")) {
        const Json& s = j["surrogate"];
        check_keys(s, {"mlp", "ab_class_weighting", "fb_class_weighting", "fb_include_abstained"}, "surrogate");
        if (s.contains("mlp")) c.surrogate.mlp = mlp_config_from_json(s["mlp"]);
        if (s.contains("ab_class_weighting")) c.surrogate.ab_class_weighting = s["ab_class_weighting"].get<bool>();
        if (s.contains("fb_class_weighting")) c.surrogate.fb_class_weighting = s["fb_class_weighting"].get<bool>();
        if (s.contains("fb_include_abstained"))
            c.surrogate.fb_include_abstained = s["fb_include_abstained"].get<bool>();
    }

    if (j.contains("constraints")) {
        check_keys(j["constraints"],
                   {"fairness", "eps", "delta", "eta", "sigma", "non_triviality"}, "constraints");
        c.constraints = j["constraints"];
    }

    if (j.contains("solver")) {
        const Json& s = j["solver"];
        check_keys(s, {"node_cap", "prefer_fewer_abstentions"}, "solver");
        if (s.contains("node_cap")) c.solver.node_cap = s["node_cap"].get<long long>();
        if (s.contains("prefer_fewer_abstentions"))
            c.prefer_fewer_abstentions = s["prefer_fewer_abstentions"].get<bool>();
    }

    if (j.contains("adjust")) {
        const Json& s = j["adjust"];
        check_keys(s, {"order"}, "adjust");
        if (s.contains("order")) {
            std::string o = s["order"].get<std::string>();
            if (o == "abstain_flip_keep")
                c.pa_order = PaOrder::AbstainFlipKeep;
            else if (o == "abstain_keep_flip")
                c.pa_order = PaOrder::AbstainKeepFlip;
            else
                throw std::runtime_error("config: adjust.order must be abstain_flip_keep or abstain_keep_flip");
        }
    }

    if (j.contains("sweep")) {
        const Json& s = j["sweep"];
        check_keys(s, {"delta", "eps", "eta", "sigma", "stage", "workers"}, "sweep");
        if (s.contains("delta")) c.sweep_delta = s["delta"].get<std::vector<double>>();
        if (s.contains("eps")) c.sweep_eps = s["eps"].get<std::vector<double>>();
        if (s.contains("eta")) c.sweep_eta = s["eta"].get<std::vector<double>>();
        if (s.contains("sigma")) c.sweep_sigma = s["sigma"].get<std::vector<double>>();
        if (s.contains("stage")) c.sweep_stage = s["stage"].get<std::string>();
        if (s.contains("workers")) c.sweep_workers = s["workers"].get<int>();
        if (c.sweep_stage != "ip" && c.sweep_stage != "full")
            throw std::runtime_error("config: sweep.stage must be 'ip' or 'full'");
        if (c.sweep_workers < 1) throw std::runtime_error("config: sweep.workers must be >= 1");
    }
    return c;
}

// scalar entries broadcast to all groups
std::vector<Rat> per_group(const Json& j, int n_groups, const char* what) {
    std::vector<Rat> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(rat_from_json(v));
        if (static_cast<int>(out.size()) != n_groups)
            throw std::runtime_error(std::string("config: constraints.") + what + " has " +
                                     std::to_string(out.size()) + " entries for " + std::to_string(n_groups) +
                                     " groups");
    } else {
        out.assign(static_cast<size_t>(n_groups), rat_from_json(j));
    }
    return out;
}

ConstraintSpec make_spec(const Json& cj, int n_groups, const GroupErrorRates& errors) {
    ConstraintSpec spec;
    if (cj.is_null()) throw std::runtime_error("config: constraints section is required for this command");
    spec.fairness = fairness_from_string(cj.value("fairness", std::string("DP")));
    spec.eps = cj.contains("eps") ? rat_from_json(cj["eps"]) : Rat(0);
    spec.delta = cj.contains("delta") ? per_group(cj["delta"], n_groups, "delta")
                                      : std::vector<Rat>(static_cast<size_t>(n_groups), Rat(0));
    spec.eta = cj.contains("eta") ? per_group(cj["eta"], n_groups, "eta")
                                  : std::vector<Rat>(static_cast<size_t>(n_groups), Rat(0));
    if (cj.contains("sigma") && !cj["sigma"].is_null()) {
        const Json& s = cj["sigma"];
        if (s.is_array() && s.size() == 2)
            spec.sigma = {rat_from_json(s[0]), rat_from_json(s[1])};
        else
            spec.sigma = {rat_from_json(s), rat_from_json(s)};
    }
    if (cj.contains("non_triviality") && !cj["non_triviality"].is_null()) {
        const Json& nt = cj["non_triviality"];
        check_keys(nt, {"floors", "nonabstained_only"}, "constraints.non_triviality");
        std::vector<Rat> floors;
        if (!nt.contains("floors") || (nt["floors"].is_string() && nt["floors"] == "baseline")) {
            for (int z = 0; z < n_groups; ++z) floors.push_back(errors.e(z));
        } else {
            floors = per_group(nt["floors"], n_groups, "non_triviality.floors");
        }
        spec.nontriviality = std::move(floors);
        if (nt.contains("nonabstained_only"))
            spec.nontriviality_nonabstained_only = nt["nonabstained_only"].get<bool>();
    }
    spec.validate(n_groups);
    return spec;
}

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

struct Paths {
    std::string dir;
    std::string dataset() const { return dir + "/dataset.json"; }
    std::string baseline() const { return dir + "/baseline.json"; }
    std::string solution() const { return dir + "/solution.json"; }
    std::string decisions() const { return dir + "/decisions.json"; }
    std::string fan_model() const { return dir + "/fan_model"; }
    std::string eval() const { return dir + "/eval.json"; }
    std::string sweep() const { return dir + "/sweep.csv"; }
};

Json load_artifact(const std::string& path, const std::string& producer) {
    if (!std::filesystem::exists(path))
        throw std::runtime_error("missing artifact " + path + "; run `fan " + producer + "` first");
    return read_json_file(path);
}

struct Workspace {
    RunConfig cfg;
    Paths paths;
};

void cmd_gen_synth(const Workspace& ws) {
    Dataset d;
    if (ws.cfg.data_source == "synthetic") {
        d = gen_synthetic(ws.cfg.synth_seed, ws.cfg.synth_groups, ws.cfg.synth_sizes, ws.cfg.synth_tau,
                          ws.cfg.synth_noise);
    } else {
        if (ws.cfg.csv_path.empty()) throw std::runtime_error("config: data.csv.path is required for csv source");
        d = load_csv(ws.cfg.csv_path, ws.cfg.csv_schema);
    }
    SplitResult sp = split(d, ws.cfg.split_fractions, ws.cfg.split_seed);
    for (const auto& w : sp.warnings) std::cerr << "warning: " << w << "\n";
    write_json_file(dataset_to_json(d, &sp.indices), ws.paths.dataset());
    std::cout << "dataset: N=" << d.size() << " groups=" << d.n_groups << " dim=" << d.feature_dim
              << " train/val/test=" << sp.indices.train.size() << "/" << sp.indices.val.size() << "/"
              << sp.indices.test.size() << " -> " << ws.paths.dataset() << "\n";
}

struct LoadedData {
    Dataset full, train, val, test;
    SplitIndices splits;
};

LoadedData load_data(const Workspace& ws) {
    LoadedData ld;
    Json j = load_artifact(ws.paths.dataset(), "gen-synth");
    ld.full = dataset_from_json(j, &ld.splits);
    ld.train = subset(ld.full, ld.splits.train);
    ld.val = subset(ld.full, ld.splits.val);
    ld.test = subset(ld.full, ld.splits.test);
    return ld;
}

void cmd_train_baseline(const Workspace& ws) {
    LoadedData ld = load_data(ws);
    BaselineModel model = train_baseline(ld.train, ws.cfg.baseline, ws.cfg.t0);
    std::vector<double> s = score(model, ld.train);
    GroupErrorRates errors = group_error_rates(ld.train, predicted_labels(s, model.t0));
    write_json_file(baseline_to_json(model, errors), ws.paths.baseline());
    std::cout << "baseline: train_accuracy=" << model.train_accuracy;
    for (int z = 0; z < errors.n_groups(); ++z) std::cout << " e[" << z << "]=" << errors.e(z).to_double();
    std::cout << " -> " << ws.paths.baseline() << "\n";
}

struct StageOne {
    LoadedData data;
    BaselineModel model;
    GroupErrorRates errors;
    std::vector<double> scores;
    std::vector<int> pred;
    CellTable table;
    GroupStats stats;
    ConstraintSpec spec;
};

StageOne load_stage_one(const Workspace& ws) {
    StageOne s;
    s.data = load_data(ws);
    baseline_from_json(load_artifact(ws.paths.baseline(), "train-baseline"), s.model, s.errors);
    s.scores = score(s.model, s.data.train);
    s.pred = predicted_labels(s.scores, s.model.t0);
    s.table = build_cells(s.data.train, s.pred, s.scores);
    s.stats = group_stats(s.data.train);
    s.spec = make_spec(ws.cfg.constraints, s.data.train.n_groups, s.errors);
    return s;
}

// prints the closed-form diagnosis for an infeasible DP spec
void print_infeasibility_diagnosis(const StageOne& s) {
    if (s.spec.fairness != Fairness::DP) return;
    FeasibilityInputs in = inputs_from(s.stats, s.errors, s.spec);
    DpReport rep = dp_feasible(in);
    for (const auto& pc : rep.pairs) {
        if (pc.satisfied) continue;
        std::cerr << "infeasible: pair (tau_hi=group " << pc.hi << ", tau_lo=group " << pc.lo
                  << ") requires delta[" << pc.hi << "] >= " << pc.min_delta << " (configured "
                  << in.delta[static_cast<size_t>(pc.hi)] << ")\n";
    }
}

int cmd_solve(const Workspace& ws) {
    StageOne s = load_stage_one(ws);
    SolveOptions opt = ws.cfg.solver;
    opt.minimize_abstentions_secondary = ws.cfg.prefer_fewer_abstentions;
    IpSolution sol = solve(s.table, s.stats, s.errors, s.spec, opt);
    write_json_file(solution_to_json(sol, s.table), ws.paths.solution());
    std::cout << "solve: status=" << to_string(sol.status) << " objective=" << sol.objective
              << " nodes=" << sol.nodes_explored << " -> " << ws.paths.solution() << "\n";
    if (sol.status == SolveStatus::Infeasible) {
        std::cerr << "solve: infeasible (" << sol.note << ")\n";
        print_infeasibility_diagnosis(s);
        return 2;
    }
    return 0;
}

int cmd_adjust(const Workspace& ws) {
    StageOne s = load_stage_one(ws);
    Json sj = load_artifact(ws.paths.solution(), "solve");
    IpSolution sol = solution_from_json(sj);
    if (sol.status == SolveStatus::Infeasible) throw std::runtime_error("adjust: solution artifact is infeasible");
    DecisionVector raw = decisions_from_counts(sol.counts, s.table);
    DecisionVector canon = prediction_adjustment(raw, s.table, ws.cfg.pa_order);
    Json j = decisions_to_json(canon);
    j["consistency_rate"] = consistency_rate(canon, s.data.train);
    write_json_file(j, ws.paths.decisions());
    std::cout << "adjust: consistency_rate=" << j["consistency_rate"].get<double>() << " -> "
              << ws.paths.decisions() << "\n";
    return 0;
}

int cmd_train_surrogate(const Workspace& ws) {
    StageOne s = load_stage_one(ws);
    DecisionVector decisions = decisions_from_json(load_artifact(ws.paths.decisions(), "adjust"));
    StageTwoResult r = train_surrogates(s.data.train, s.model, decisions, ws.cfg.surrogate);
    save_fan_model(r.model, s.errors, ws.paths.fan_model());
    Json stats;
    stats["version"] = 1;
    stats["ab"] = Json{{"train_accuracy", r.ab.train_accuracy},
                       {"constant_model", r.ab.constant_model},
                       {"loss_curve", r.ab.loss_curve}};
    stats["fb"] = Json{{"train_accuracy", r.fb.train_accuracy},
                       {"constant_model", r.fb.constant_model},
                       {"loss_curve", r.fb.loss_curve}};
    write_json_file(stats, ws.paths.fan_model() + "/training.json");
    std::cout << "surrogates: ab_accuracy=" << r.ab.train_accuracy << (r.ab.constant_model ? " (constant)" : "")
              << " fb_accuracy=" << r.fb.train_accuracy << (r.fb.constant_model ? " (constant)" : "") << " -> "
              << ws.paths.fan_model() << "\n";
    if (r.ab.constant_model || r.fb.constant_model)
        std::cerr << "warning: single-class labels produced a constant surrogate\n";
    return 0;
}

int cmd_eval(const Workspace& ws) {
    StageOne s = load_stage_one(ws);
    DecisionVector decisions = decisions_from_json(load_artifact(ws.paths.decisions(), "adjust"));

    // baseline = keep-all decisions
    DecisionVector keep_all;
    keep_all.omega.assign(s.data.train.size(), 1);
    keep_all.flip.assign(s.data.train.size(), 0);
    EvalReport base_train =
        evaluate(s.data.train, outputs_from_decisions(keep_all, s.pred), s.errors, s.spec);
    EvalReport ip_train = evaluate(s.data.train, outputs_from_decisions(decisions, s.pred), s.errors, s.spec);

    Json out;
    out["version"] = 1;
    out["baseline_train"] = eval_report_to_json(base_train);
    out["ip_train"] = eval_report_to_json(ip_train);
    BaselineComparison ip_cmp = compare_to_baseline(ip_train, base_train);
    out["ip_vs_baseline"] = Json{{"disparity_reduction", ip_cmp.disparity_reduction},
                                 {"group_accuracy_increase", ip_cmp.group_accuracy_increase},
                                 {"min_group_accuracy_increase", ip_cmp.min_group_accuracy_increase}};

    if (std::filesystem::exists(ws.paths.fan_model() + "/manifest.json")) {
        FanModel fm = load_fan_model(ws.paths.fan_model());
        EvalReport fan_train = evaluate(s.data.train, fan_predict_all(fm, s.data.train), s.errors, s.spec);
        out["fan_train"] = eval_report_to_json(fan_train);
        BaselineComparison fan_cmp = compare_to_baseline(fan_train, base_train);
        out["fan_vs_baseline_train"] = Json{{"disparity_reduction", fan_cmp.disparity_reduction},
                                            {"group_accuracy_increase", fan_cmp.group_accuracy_increase},
                                            {"min_group_accuracy_increase", fan_cmp.min_group_accuracy_increase}};
        if (!s.data.test.samples.empty()) {
            std::vector<double> test_scores = score(s.model, s.data.test);
            std::vector<int> test_pred = predicted_labels(test_scores, s.model.t0);
            GroupErrorRates test_errors = group_error_rates(s.data.test, test_pred);
            DecisionVector keep_all_test;
            keep_all_test.omega.assign(s.data.test.size(), 1);
            keep_all_test.flip.assign(s.data.test.size(), 0);
            EvalReport base_test =
                evaluate(s.data.test, outputs_from_decisions(keep_all_test, test_pred), test_errors, s.spec);
            EvalReport fan_test = evaluate(s.data.test, fan_predict_all(fm, s.data.test), test_errors, s.spec);
            out["baseline_test"] = eval_report_to_json(base_test);
            out["fan_test"] = eval_report_to_json(fan_test);
            BaselineComparison tc = compare_to_baseline(fan_test, base_test);
            out["fan_vs_baseline_test"] = Json{{"disparity_reduction", tc.disparity_reduction},
                                               {"group_accuracy_increase", tc.group_accuracy_increase},
                                               {"min_group_accuracy_increase", tc.min_group_accuracy_increase}};
        }
    }
    write_json_file(out, ws.paths.eval());
    std::cout << "eval -> " << ws.paths.eval() << "\n";
    return 0;
}

int cmd_pipeline(const Workspace& ws) {
    cmd_gen_synth(ws);
    cmd_train_baseline(ws);
    int rc = cmd_solve(ws);
    if (rc != 0) return rc;
    if ((rc = cmd_adjust(ws)) != 0) return rc;
    if ((rc = cmd_train_surrogate(ws)) != 0) return rc;
    return cmd_eval(ws);
}

int cmd_sweep(const Workspace& ws) {
    if (ws.cfg.sweep_delta.empty() || ws.cfg.sweep_eps.empty()) {
        // header-only CSV for an empty grid
        std::ofstream f(ws.paths.sweep());
        f << "delta,eps,eta,sigma,status,objective,feasible,ip_disparity,ip_disparity_reduction,"
             "ip_min_group_accuracy_increase,error\n";
        std::cout << "sweep: empty grid -> " << ws.paths.sweep() << "\n";
        return 0;
    }
    StageOne s = load_stage_one(ws);

    struct Point {
        double delta, eps, eta;
        std::optional<double> sigma;
    };
    std::vector<Point> grid;
    std::vector<double> etas = ws.cfg.sweep_eta.empty() ? std::vector<double>{0.0} : ws.cfg.sweep_eta;
    std::vector<std::optional<double>> sigmas;
    if (ws.cfg.sweep_sigma.empty())
        sigmas.push_back(std::nullopt);
    else
        for (double v : ws.cfg.sweep_sigma) sigmas.push_back(v);
    for (double dl : ws.cfg.sweep_delta)
        for (double ep : ws.cfg.sweep_eps)
            for (double et : etas)
                for (const auto& sg : sigmas) grid.push_back({dl, ep, et, sg});

    DecisionVector keep_all;
    keep_all.omega.assign(s.data.train.size(), 1);
    keep_all.flip.assign(s.data.train.size(), 0);

    std::vector<std::string> rows(grid.size());
    std::atomic<size_t> next{0};
    bool full = ws.cfg.sweep_stage == "full";

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            const Point& p = grid[i];
            std::ostringstream row;
            row.precision(12);
            row << p.delta << "," << p.eps << "," << p.eta << ",";
            if (p.sigma) row << *p.sigma;
            row << ",";
            try {
                Json cj = ws.cfg.constraints.is_null() ? Json::object() : ws.cfg.constraints;
                cj["eps"] = p.eps;
                cj["delta"] = p.delta;
                cj["eta"] = p.eta;
                if (p.sigma)
                    cj["sigma"] = Json::array({*p.sigma, *p.sigma});
                else
                    cj.erase("sigma");
                ConstraintSpec spec = make_spec(cj, s.data.train.n_groups, s.errors);
                SolveOptions opt = ws.cfg.solver;
                opt.minimize_abstentions_secondary = ws.cfg.prefer_fewer_abstentions;
                IpSolution sol = solve(s.table, s.stats, s.errors, spec, opt);
                row << to_string(sol.status) << "," << sol.objective << ","
                    << (sol.status != SolveStatus::Infeasible ? 1 : 0) << ",";
                if (sol.status != SolveStatus::Infeasible) {
                    DecisionVector canon =
                        prediction_adjustment(decisions_from_counts(sol.counts, s.table), s.table, ws.cfg.pa_order);
                    EvalReport base = evaluate(s.data.train, outputs_from_decisions(keep_all, s.pred), s.errors, spec);
                    EvalReport ip = evaluate(s.data.train, outputs_from_decisions(canon, s.pred), s.errors, spec);
                    BaselineComparison cmp = compare_to_baseline(ip, base);
                    auto md = ip.max_disparity();
                    row << (md ? md->to_double() : 0.0) << "," << cmp.disparity_reduction << ","
                        << cmp.min_group_accuracy_increase;
                    if (full) {
                        StageTwoResult st = train_surrogates(s.data.train, s.model, canon, ws.cfg.surrogate);
                        EvalReport fan =
                            evaluate(s.data.train, fan_predict_all(st.model, s.data.train), s.errors, spec);
                        BaselineComparison fc = compare_to_baseline(fan, base);
                        auto fmd = fan.max_disparity();
                        row << "," << (fmd ? fmd->to_double() : 0.0) << "," << fc.disparity_reduction << ","
                            << fc.min_group_accuracy_increase << "," << st.ab.train_accuracy << ","
                            << st.fb.train_accuracy;
                    }
                    row << ",";
                } else {
                    row << ",,";
                    if (full) row << ",,,,,";
                    row << ",";
                }
            } catch (const std::exception& ex) {
                row << ",,,,,,";
                if (full) row << ",,,,,";
                std::string msg = ex.what();
                for (auto& ch : msg)
                    if (ch == ',' || ch == '\n') ch = ';';
                row << msg;
            }
            rows[i] = row.str();
        }
    };

    int n_workers = std::min<int>(ws.cfg.sweep_workers, static_cast<int>(grid.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream f(ws.paths.sweep());
    if (!f) throw std::runtime_error("sweep: cannot write " + ws.paths.sweep());
    f << "delta,eps,eta,sigma,status,objective,feasible,ip_disparity,ip_disparity_reduction,"
         "ip_min_group_accuracy_increase";
    if (full) f << ",fan_disparity,fan_disparity_reduction,fan_min_group_accuracy_increase,ab_accuracy,fb_accuracy";
    f << ",error\n";
    for (const auto& r : rows) f << r << "\n";
    std::cout << "sweep: " << grid.size() << " points -> " << ws.paths.sweep() << "\n";
    return 0;
}

}  // namespace
}  // namespace fan

int main(int argc, char** argv) {
    CLI::App app{"fair abstain/flip post-processing pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string fairness_override, eps_override, delta_override, eta_override;

    app.add_option("-c,--config", config_path, "JSON run configuration")->required();
    app.add_option("-o,--output", output_override, "output directory (overrides config)");
    app.add_option("--fairness", fairness_override, "override constraints.fairness (DP|EOp|EOd)");
    app.add_option("--eps", eps_override, "override constraints.eps");
    app.add_option("--delta", delta_override, "override constraints.delta (scalar)");
    app.add_option("--eta", eta_override, "override constraints.eta (scalar)");

    auto* c_gen = app.add_subcommand("gen-synth", "materialize the dataset artifact");
    auto* c_train = app.add_subcommand("train-baseline", "train the baseline classifier");
    auto* c_solve = app.add_subcommand("solve", "solve the stage-I integer program");
    auto* c_adjust = app.add_subcommand("adjust", "canonicalize decisions by confidence order");
    auto* c_surr = app.add_subcommand("train-surrogate", "train the abstention and flip blocks");
    auto* c_eval = app.add_subcommand("eval", "evaluate decisions and the composed model");
    auto* c_pipe = app.add_subcommand("pipeline", "run every stage in order");
    auto* c_sweep = app.add_subcommand("sweep", "solve across a hyperparameter grid");

    CLI11_PARSE(app, argc, argv);

    try {
        fan::Json cfg_json = fan::read_json_file(config_path);
        if (!fairness_override.empty()) cfg_json["constraints"]["fairness"] = fairness_override;
        if (!eps_override.empty()) cfg_json["constraints"]["eps"] = std::stod(eps_override);
        if (!delta_override.empty()) cfg_json["constraints"]["delta"] = std::stod(delta_override);
        if (!eta_override.empty()) cfg_json["constraints"]["eta"] = std::stod(eta_override);

        fan::RunConfig cfg = fan::parse_config(cfg_json);
        if (!output_override.empty()) cfg.output_dir = output_override;
        if (const char* root = std::getenv("FAN_OUTPUT_ROOT")) {
            std::filesystem::path p(cfg.output_dir);
            if (p.is_relative()) cfg.output_dir = (std::filesystem::path(root) / p).string();
        }
        std::filesystem::create_directories(cfg.output_dir);
        fan::Workspace ws{cfg, fan::Paths{cfg.output_dir}};

        if (c_gen->parsed()) {
            fan::cmd_gen_synth(ws);
            return 0;
        }
        if (c_train->parsed()) {
            fan::cmd_train_baseline(ws);
            return 0;
        }
        if (c_solve->parsed()) return fan::cmd_solve(ws);
        if (c_adjust->parsed()) return fan::cmd_adjust(ws);
        if (c_surr->parsed()) return fan::cmd_train_surrogate(ws);
        if (c_eval->parsed()) return fan::cmd_eval(ws);
        if (c_pipe->parsed()) return fan::cmd_pipeline(ws);
        if (c_sweep->parsed()) return fan::cmd_sweep(ws);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
