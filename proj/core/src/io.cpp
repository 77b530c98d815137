#include "fan/io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fan {

namespace {

void require_version(const Json& j, int expected, const std::string& what) {
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != expected)
        throw std::runtime_error(what + ": unsupported or missing artifact version (expected " +
                                 std::to_string(expected) + ")");
}

long long checked_ll(const i128 v, const char* what) {
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
        throw std::runtime_error(std::string(what) + ": value too large to serialize");
    return static_cast<long long>(v);
}

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void write_json_file(const Json& j, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

Json rat_to_json(const Rat& r) {
    return Json{{"num", checked_ll(r.num, "rat")}, {"den", checked_ll(r.den, "rat")}};
}

Rat rat_from_json(const Json& j) {
    if (j.is_number()) return Rat::from_double(j.get<double>());
    if (j.is_object() && j.contains("num") && j.contains("den"))
        return Rat(j["num"].get<long long>(), j["den"].get<long long>());
    throw std::runtime_error("rat: expected number or {num,den}");
}

Json dataset_to_json(const Dataset& d, const SplitIndices* splits) {
    Json j;
    j["version"] = 1;
    j["n_groups"] = d.n_groups;
    j["feature_dim"] = d.feature_dim;
    Json samples = Json::array();
    for (const auto& s : d.samples) samples.push_back(Json{{"x", s.features}, {"z", s.group}, {"y", s.label}});
    j["samples"] = std::move(samples);
    if (splits) {
        j["splits"] = Json{{"train", splits->train}, {"val", splits->val}, {"test", splits->test}};
    }
    return j;
}

Dataset dataset_from_json(const Json& j, SplitIndices* splits) {
    require_version(j, 1, "dataset");
    Dataset d;
    d.n_groups = j.at("n_groups").get<int>();
    d.feature_dim = j.at("feature_dim").get<int>();
    for (const auto& sj : j.at("samples")) {
        Sample s;
        s.features = sj.at("x").get<std::vector<double>>();
        s.group = sj.at("z").get<int>();
        s.label = sj.at("y").get<int>();
        d.samples.push_back(std::move(s));
    }
    d.validate();
    if (splits) {
        if (!j.contains("splits")) throw std::runtime_error("dataset: artifact carries no splits");
        splits->train = j["splits"].at("train").get<std::vector<size_t>>();
        splits->val = j["splits"].at("val").get<std::vector<size_t>>();
        splits->test = j["splits"].at("test").get<std::vector<size_t>>();
    }
    return d;
}

Json mlp_config_to_json(const MlpConfig& c) {
    return Json{{"hidden_dims", c.hidden_dims}, {"dropout_prob", c.dropout_prob}, {"activation", c.activation},
                {"epochs", c.epochs},           {"batch_size", c.batch_size},     {"learning_rate", c.learning_rate},
                {"momentum", c.momentum},       {"seed", c.seed}};
}

MlpConfig mlp_config_from_json(const Json& j) {
    MlpConfig c;
    if (j.contains("hidden_dims")) c.hidden_dims = j["hidden_dims"].get<std::vector<int>>();
    if (j.contains("dropout_prob")) c.dropout_prob = j["dropout_prob"].get<double>();
    if (j.contains("activation")) c.activation = j["activation"].get<std::string>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("momentum")) c.momentum = j["momentum"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    c.validate();
    return c;
}

Json mlp_to_json(const Mlp& m) {
    Json j;
    j["version"] = 1;
    j["input_dim"] = m.input_dim();
    j["config"] = mlp_config_to_json(m.config());
    Json layers = Json::array();
    for (const auto& l : m.layers())
        layers.push_back(Json{{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
    j["layers"] = std::move(layers);
    return j;
}

Mlp mlp_from_json(const Json& j) {
    require_version(j, 1, "mlp");
    Mlp m;
    m.set_input_dim(j.at("input_dim").get<int>());
    m.set_config(mlp_config_from_json(j.at("config")));
    for (const auto& lj : j.at("layers")) {
        Mlp::Layer l;
        l.in = lj.at("in").get<int>();
        l.out = lj.at("out").get<int>();
        l.w = lj.at("w").get<std::vector<double>>();
        l.b = lj.at("b").get<std::vector<double>>();
        if (l.w.size() != static_cast<size_t>(l.in) * static_cast<size_t>(l.out) ||
            l.b.size() != static_cast<size_t>(l.out))
            throw std::runtime_error("mlp: layer shape mismatch in artifact");
        m.layers().push_back(std::move(l));
    }
    return m;
}

Json baseline_to_json(const BaselineModel& m, const GroupErrorRates& errors) {
    Json j;
    j["version"] = 1;
    j["t0"] = m.t0;
    j["train_accuracy"] = m.train_accuracy;
    j["net"] = mlp_to_json(m.net);
    j["group_errors"] = Json{{"errors", errors.errors}, {"sizes", errors.sizes}};
    return j;
}

void baseline_from_json(const Json& j, BaselineModel& m, GroupErrorRates& errors) {
    require_version(j, 1, "baseline");
    m.t0 = j.at("t0").get<double>();
    m.train_accuracy = j.at("train_accuracy").get<double>();
    m.net = mlp_from_json(j.at("net"));
    errors.errors = j.at("group_errors").at("errors").get<std::vector<long long>>();
    errors.sizes = j.at("group_errors").at("sizes").get<std::vector<long long>>();
}

Json spec_to_json(const ConstraintSpec& s) {
    Json j;
    j["fairness"] = to_string(s.fairness);
    j["eps"] = rat_to_json(s.eps);
    Json deltas = Json::array(), etas = Json::array();
    for (const auto& d : s.delta) deltas.push_back(rat_to_json(d));
    for (const auto& e : s.eta) etas.push_back(rat_to_json(e));
    j["delta"] = std::move(deltas);
    j["eta"] = std::move(etas);
    if (s.sigma) j["sigma"] = Json::array({rat_to_json((*s.sigma)[0]), rat_to_json((*s.sigma)[1])});
    if (s.nontriviality) {
        Json floors = Json::array();
        for (const auto& f : *s.nontriviality) floors.push_back(rat_to_json(f));
        j["non_triviality"] = std::move(floors);
        j["non_triviality_nonabstained_only"] = s.nontriviality_nonabstained_only;
    }
    return j;
}

ConstraintSpec spec_from_json(const Json& j) {
    ConstraintSpec s;
    s.fairness = fairness_from_string(j.at("fairness").get<std::string>());
    s.eps = rat_from_json(j.at("eps"));
    for (const auto& d : j.at("delta")) s.delta.push_back(rat_from_json(d));
    for (const auto& e : j.at("eta")) s.eta.push_back(rat_from_json(e));
    if (j.contains("sigma") && !j["sigma"].is_null()) {
        if (j["sigma"].size() != 2) throw std::runtime_error("spec: sigma must have two entries (per label)");
        s.sigma = {rat_from_json(j["sigma"][0]), rat_from_json(j["sigma"][1])};
    }
    if (j.contains("non_triviality") && !j["non_triviality"].is_null()) {
        std::vector<Rat> floors;
        for (const auto& f : j["non_triviality"]) floors.push_back(rat_from_json(f));
        s.nontriviality = std::move(floors);
        if (j.contains("non_triviality_nonabstained_only"))
            s.nontriviality_nonabstained_only = j["non_triviality_nonabstained_only"].get<bool>();
    }
    return s;
}

namespace {

Json constraint_report_to_json(const std::vector<ConstraintValue>& report) {
    Json arr = Json::array();
    for (const auto& c : report) {
        arr.push_back(Json{{"name", c.name},
                           {"family", c.family},
                           {"value", c.value.to_double()},
                           {"value_exact", c.value.str()},
                           {"bound", c.bound.to_double()},
                           {"bound_exact", c.bound.str()},
                           {"sense", c.sense == Sense::LE ? "<=" : ">="},
                           {"slack", c.slack().to_double()},
                           {"satisfied", c.satisfied()}});
    }
    return arr;
}

}  // namespace

Json solution_to_json(const IpSolution& s, const CellTable& table) {
    Json j;
    j["version"] = 1;
    j["status"] = to_string(s.status);
    j["objective"] = s.objective;
    j["nodes_explored"] = s.nodes_explored;
    j["bound_gap"] = s.bound_gap;
    j["note"] = s.note;
    Json cells = Json::array();
    for (int c = 0; c < static_cast<int>(s.counts.cells.size()); ++c) {
        CellKey k = table.key_of(c);
        const auto& pc = s.counts.cells[static_cast<size_t>(c)];
        cells.push_back(Json{{"group", k.group},
                             {"label", k.label},
                             {"pred", k.pred},
                             {"n_abstain", pc.n_abstain},
                             {"n_keep", pc.n_keep},
                             {"n_flip", pc.n_flip},
                             {"n_abstain_flip", pc.n_abstain_flip}});
    }
    j["counts"] = std::move(cells);
    j["constraints"] = constraint_report_to_json(s.constraint_report);
    return j;
}

IpSolution solution_from_json(const Json& j) {
    require_version(j, 1, "solution");
    IpSolution s;
    std::string st = j.at("status").get<std::string>();
    if (st == "Optimal")
        s.status = SolveStatus::Optimal;
    else if (st == "FeasibleBestEffort")
        s.status = SolveStatus::FeasibleBestEffort;
    else
        s.status = SolveStatus::Infeasible;
    s.objective = j.at("objective").get<long long>();
    s.nodes_explored = j.value("nodes_explored", 0LL);
    s.bound_gap = j.value("bound_gap", 0.0);
    s.note = j.value("note", std::string{});
    int max_cell = -1;
    for (const auto& cj : j.at("counts")) {
        int c = cell_index(cj.at("group").get<int>(), cj.at("label").get<int>(), cj.at("pred").get<int>());
        max_cell = std::max(max_cell, c);
    }
    s.counts.cells.assign(static_cast<size_t>(max_cell + 1), {});
    for (const auto& cj : j.at("counts")) {
        int c = cell_index(cj.at("group").get<int>(), cj.at("label").get<int>(), cj.at("pred").get<int>());
        auto& pc = s.counts.cells[static_cast<size_t>(c)];
        pc.n_abstain = cj.at("n_abstain").get<long long>();
        pc.n_keep = cj.at("n_keep").get<long long>();
        pc.n_flip = cj.at("n_flip").get<long long>();
        pc.n_abstain_flip = cj.at("n_abstain_flip").get<long long>();
    }
    return s;
}

Json decisions_to_json(const DecisionVector& d) {
    Json j;
    j["version"] = 1;
    j["omega"] = d.omega;
    j["flip"] = d.flip;
    return j;
}

DecisionVector decisions_from_json(const Json& j) {
    require_version(j, 1, "decisions");
    DecisionVector d;
    d.omega = j.at("omega").get<std::vector<uint8_t>>();
    d.flip = j.at("flip").get<std::vector<uint8_t>>();
    if (d.omega.size() != d.flip.size()) throw std::runtime_error("decisions: omega/flip length mismatch");
    return d;
}

Json eval_report_to_json(const EvalReport& r) {
    Json j;
    j["version"] = 1;
    j["fairness"] = to_string(r.fairness);
    Json groups = Json::array();
    for (size_t z = 0; z < r.groups.size(); ++z) {
        const auto& g = r.groups[z];
        Json gj{{"size", g.size},
                {"nonabstained", g.nonabstained},
                {"abstention_rate", g.abstention_rate().to_double()}};
        if (g.accuracy_defined())
            gj["accuracy"] = g.accuracy().to_double();
        else
            gj["accuracy"] = nullptr;
        for (int y = 0; y < 2; ++y) {
            auto ar = g.abstention_rate_label(y);
            gj["abstention_rate_y" + std::to_string(y)] = ar ? Json(ar->to_double()) : Json(nullptr);
        }
        if (r.no_harm_margin[z])
            gj["no_harm_margin"] = r.no_harm_margin[z]->to_double();
        else
            gj["no_harm_margin"] = nullptr;
        groups.push_back(std::move(gj));
    }
    j["groups"] = std::move(groups);
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        Json pj{{"z1", p.z1}, {"z2", p.z2}, {"dp", p.dp.to_double()}};
        pj["tpr_gap"] = p.tpr_gap ? Json(p.tpr_gap->to_double()) : Json(nullptr);
        pj["tnr_gap"] = p.tnr_gap ? Json(p.tnr_gap->to_double()) : Json(nullptr);
        pj["eod_avg"] = p.eod_avg ? Json(p.eod_avg->to_double()) : Json(nullptr);
        pairs.push_back(std::move(pj));
    }
    j["pairs"] = std::move(pairs);
    auto md = r.max_disparity();
    j["max_disparity"] = md ? Json(md->to_double()) : Json(nullptr);
    auto oa = r.overall_accuracy();
    j["overall_accuracy"] = oa ? Json(oa->to_double()) : Json(nullptr);
    return j;
}

uint64_t fnv1a_hash(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void save_fan_model(const FanModel& m, const GroupErrorRates& baseline_errors, const std::string& dir) {
    std::filesystem::create_directories(dir);
    Json base = baseline_to_json(m.baseline, baseline_errors);
    Json ab = mlp_to_json(m.ab);
    Json fb = mlp_to_json(m.fb);
    write_json_file(base, dir + "/baseline.json");
    write_json_file(ab, dir + "/ab.json");
    write_json_file(fb, dir + "/fb.json");
    Json manifest;
    manifest["version"] = 1;
    manifest["t0"] = m.baseline.t0;
    manifest["baseline_config_hash"] = fnv1a_hash(base["net"]["config"].dump());
    manifest["ab_config_hash"] = fnv1a_hash(ab["config"].dump());
    manifest["fb_config_hash"] = fnv1a_hash(fb["config"].dump());
    write_json_file(manifest, dir + "/manifest.json");
}

FanModel load_fan_model(const std::string& dir, GroupErrorRates* baseline_errors) {
    Json manifest = read_json_file(dir + "/manifest.json");
    require_version(manifest, 1, "fan model manifest");
    FanModel m;
    GroupErrorRates errors;
    baseline_from_json(read_json_file(dir + "/baseline.json"), m.baseline, errors);
    m.ab = mlp_from_json(read_json_file(dir + "/ab.json"));
    m.fb = mlp_from_json(read_json_file(dir + "/fb.json"));
    m.baseline.t0 = manifest.at("t0").get<double>();
    if (baseline_errors) *baseline_errors = errors;
    return m;
}

}  // namespace fan
