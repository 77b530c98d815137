#include "fan/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fan/rng.hpp"

namespace fan {

void Dataset::validate() const {
    std::vector<long long> seen(static_cast<size_t>(n_groups), 0);
    for (size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (static_cast<int>(s.features.size()) != feature_dim)
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " has feature dim " +
                                        std::to_string(s.features.size()) + ", expected " +
                                        std::to_string(feature_dim));
        if (s.group < 0 || s.group >= n_groups)
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " has group id out of range");
        if (s.label != 0 && s.label != 1)
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " has non-binary label");
        ++seen[static_cast<size_t>(s.group)];
    }
    for (int z = 0; z < n_groups; ++z)
        if (seen[static_cast<size_t>(z)] == 0)
            throw std::invalid_argument("dataset: declared group " + std::to_string(z) + " is empty");
}

long long GroupStats::total() const {
    long long t = 0;
    for (long long s : sizes) t += s;
    return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error("load_csv: empty file " + path);
    std::vector<std::string> header = split_csv_line(header_line);
    for (auto& h : header) h = trim(h);

    auto col_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("load_csv: schema error, column '" + name + "' not in header of " + path);
        return static_cast<size_t>(it - header.begin());
    };

    std::vector<size_t> fcols;
    for (const auto& c : schema.feature_cols) fcols.push_back(col_of(c));
    size_t gcol = col_of(schema.group_col);
    size_t lcol = col_of(schema.label_col);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (auto& c : cells) c = trim(c);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    // Feature columns are numeric when every cell parses as a number; otherwise
    // categorical, one-hot encoded with categories in lexicographic order.
    size_t nf = fcols.size();
    std::vector<bool> numeric(nf, true);
    for (size_t j = 0; j < nf; ++j) {
        for (const auto& r : rows) {
            double tmp;
            if (!parse_double(r[fcols[j]], tmp)) {
                numeric[j] = false;
                break;
            }
        }
    }
    std::vector<std::vector<std::string>> categories(nf);
    for (size_t j = 0; j < nf; ++j) {
        if (numeric[j]) continue;
        std::set<std::string> cats;
        for (const auto& r : rows) cats.insert(r[fcols[j]]);
        categories[j].assign(cats.begin(), cats.end());
    }

    // Group ids assigned in lexicographic order of the distinct raw values.
    std::set<std::string> gvals;
    for (const auto& r : rows) gvals.insert(r[gcol]);
    std::map<std::string, int> gid;
    int next = 0;
    for (const auto& g : gvals) gid[g] = next++;

    int dim = 0;
    for (size_t j = 0; j < nf; ++j) dim += numeric[j] ? 1 : static_cast<int>(categories[j].size());

    Dataset d;
    d.n_groups = next;
    d.feature_dim = dim;
    d.samples.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        Sample s;
        s.features.reserve(static_cast<size_t>(dim));
        for (size_t j = 0; j < nf; ++j) {
            if (numeric[j]) {
                double v;
                if (!parse_double(r[fcols[j]], v))
                    throw std::runtime_error("load_csv: row " + std::to_string(i + 2) +
                                             ": cannot parse numeric cell '" + r[fcols[j]] + "'");
                s.features.push_back(v);
            } else {
                for (const auto& cat : categories[j]) s.features.push_back(r[fcols[j]] == cat ? 1.0 : 0.0);
            }
        }
        s.group = gid[r[gcol]];
        const std::string& lv = r[lcol];
        if (lv == "0")
            s.label = 0;
        else if (lv == "1")
            s.label = 1;
        else
            throw std::runtime_error("load_csv: row " + std::to_string(i + 2) + ": label '" + lv +
                                     "' is not 0 or 1");
        d.samples.push_back(std::move(s));
    }

    if (schema.minmax_scale && !d.samples.empty()) {
        for (int j = 0; j < d.feature_dim; ++j) {
            double lo = d.samples[0].features[static_cast<size_t>(j)];
            double hi = lo;
            for (const auto& s : d.samples) {
                lo = std::min(lo, s.features[static_cast<size_t>(j)]);
                hi = std::max(hi, s.features[static_cast<size_t>(j)]);
            }
            double span = hi - lo;
            if (span <= 0) continue;
            for (auto& s : d.samples) s.features[static_cast<size_t>(j)] = (s.features[static_cast<size_t>(j)] - lo) / span;
        }
    }

    d.validate();
    return d;
}

void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out.precision(17);
    for (int j = 0; j < d.feature_dim; ++j) out << "f" << j << ",";
    out << "group,label\n";
    for (const auto& s : d.samples) {
        for (double v : s.features) out << v << ",";
        out << s.group << "," << s.label << "\n";
    }
}

Dataset gen_synthetic(uint64_t seed, int n_groups, const std::vector<long long>& sizes,
                      const std::vector<double>& taus, double score_noise) {
    if (n_groups < 1) throw std::domain_error("gen_synthetic: need at least one group");
    if (static_cast<int>(sizes.size()) != n_groups || static_cast<int>(taus.size()) != n_groups)
        throw std::domain_error("gen_synthetic: sizes/taus length must equal n_groups");
    for (long long n : sizes)
        if (n < 1) throw std::domain_error("gen_synthetic: group sizes must be >= 1");
    for (double t : taus)
        if (t < 0.0 || t > 1.0) throw std::domain_error("gen_synthetic: tau must lie in [0,1]");

    Rng rng(seed);
    Dataset d;
    d.n_groups = n_groups;
    d.feature_dim = 2;

    for (int z = 0; z < n_groups; ++z) {
        long long nz = sizes[static_cast<size_t>(z)];
        long long pos = std::llround(taus[static_cast<size_t>(z)] * static_cast<double>(nz));
        std::vector<int> labels(static_cast<size_t>(nz), 0);
        for (long long i = 0; i < pos; ++i) labels[static_cast<size_t>(i)] = 1;
        rng.shuffle(labels);
        for (long long i = 0; i < nz; ++i) {
            Sample s;
            int y = labels[static_cast<size_t>(i)];
            s.features = {static_cast<double>(2 * y - 1) + score_noise * rng.normal(),
                          static_cast<double>(z) + 0.25 * rng.normal()};
            s.group = z;
            s.label = y;
            d.samples.push_back(std::move(s));
        }
    }

    // interleave groups so file order is not group-blocked
    std::vector<size_t> order(d.samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<Sample> shuffled;
    shuffled.reserve(d.samples.size());
    for (size_t i : order) shuffled.push_back(std::move(d.samples[i]));
    d.samples = std::move(shuffled);

    d.validate();
    return d;
}

SplitResult split(const Dataset& d, const std::array<double, 3>& fractions, uint64_t seed) {
    double sum = fractions[0] + fractions[1] + fractions[2];
    if (fractions[0] <= 0 || fractions[1] <= 0 || fractions[2] <= 0 || std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error("split: fractions must be positive and sum to 1");

    // strata keyed by (group, label), each shuffled once then cut by largest
    // remainder so the partition is exact
    std::map<std::pair<int, int>, std::vector<size_t>> strata;
    for (size_t i = 0; i < d.samples.size(); ++i)
        strata[{d.samples[i].group, d.samples[i].label}].push_back(i);

    Rng rng(seed);
    SplitIndices idx;
    std::vector<std::string> warnings;
    for (auto& [key, members] : strata) {
        rng.shuffle(members);
        size_t n = members.size();
        std::array<size_t, 3> take{};
        std::array<double, 3> rem{};
        size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            double exact = fractions[static_cast<size_t>(k)] * static_cast<double>(n);
            take[static_cast<size_t>(k)] = static_cast<size_t>(std::floor(exact));
            rem[static_cast<size_t>(k)] = exact - std::floor(exact);
            assigned += take[static_cast<size_t>(k)];
        }
        while (assigned < n) {
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (rem[static_cast<size_t>(k)] > rem[static_cast<size_t>(best)]) best = k;
            ++take[static_cast<size_t>(best)];
            rem[static_cast<size_t>(best)] = -1;
            ++assigned;
        }
        size_t p = 0;
        for (size_t k = 0; k < take[0]; ++k) idx.train.push_back(members[p++]);
        for (size_t k = 0; k < take[1]; ++k) idx.val.push_back(members[p++]);
        for (size_t k = 0; k < take[2]; ++k) idx.test.push_back(members[p++]);
        const char* names[3] = {"train", "val", "test"};
        for (int k = 0; k < 3; ++k)
            if (take[static_cast<size_t>(k)] == 0)
                warnings.push_back(std::string("stratum (group ") + std::to_string(key.first) + ", label " +
                                   std::to_string(key.second) + ") is empty in the " + names[k] + " split");
    }
    std::sort(idx.train.begin(), idx.train.end());
    std::sort(idx.val.begin(), idx.val.end());
    std::sort(idx.test.begin(), idx.test.end());

    SplitResult r;
    r.train = subset(d, idx.train);
    r.val = subset(d, idx.val);
    r.test = subset(d, idx.test);
    r.indices = std::move(idx);
    r.warnings = std::move(warnings);
    return r;
}

Dataset subset(const Dataset& d, const std::vector<size_t>& idx) {
    Dataset out;
    out.n_groups = d.n_groups;
    out.feature_dim = d.feature_dim;
    out.samples.reserve(idx.size());
    for (size_t i : idx) out.samples.push_back(d.samples.at(i));
    return out;
}

GroupStats group_stats(const Dataset& d) {
    if (d.samples.empty()) throw std::domain_error("group_stats: empty dataset");
    GroupStats g;
    g.sizes.assign(static_cast<size_t>(d.n_groups), 0);
    g.label_counts.assign(static_cast<size_t>(d.n_groups), {0, 0});
    for (const auto& s : d.samples) {
        ++g.sizes[static_cast<size_t>(s.group)];
        ++g.label_counts[static_cast<size_t>(s.group)][static_cast<size_t>(s.label)];
    }
    return g;
}

}  // namespace fan
