#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fan/dataset.hpp"
#include "fan/rng.hpp"

using namespace fan;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream f(path);
    f << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv basic file") {
    auto p = write_temp("ds_basic.csv",
                        "a,b,grp,lab\n"
                        "1.5,2.0,a,1\n"
                        "0.5,1.0,b,0\n"
                        "2.5,0.0,a,1\n");
    Dataset d = load_csv(p, {{"a", "b"}, "grp", "lab"});
    CHECK(d.size() == 3);
    CHECK(d.n_groups == 2);
    CHECK(d.feature_dim == 2);
    CHECK(d.samples[0].group == 0);  // "a" < "b" lexicographically
    CHECK(d.samples[1].group == 1);
    CHECK(d.samples[0].label == 1);
}

TEST_CASE("load_csv bad label names the row") {
    auto p = write_temp("ds_badlabel.csv", "a,grp,lab\n1,x,1\n2,x,2\n");
    CHECK_THROWS_WITH_AS(load_csv(p, {{"a"}, "grp", "lab"}), doctest::Contains("row 3"), std::runtime_error);
}

TEST_CASE("load_csv missing column is a schema error") {
    auto p = write_temp("ds_nocol.csv", "a,grp,lab\n1,x,1\n");
    CHECK_THROWS_WITH_AS(load_csv(p, {{"nope"}, "grp", "lab"}), doctest::Contains("schema"), std::runtime_error);
}

TEST_CASE("load_csv empty file") {
    auto p = write_temp("ds_empty.csv", "");
    CHECK_THROWS(load_csv(p, {{"a"}, "grp", "lab"}));
    auto p2 = write_temp("ds_headeronly.csv", "a,grp,lab\n");
    CHECK_THROWS_WITH(load_csv(p2, {{"a"}, "grp", "lab"}), doctest::Contains("no data rows"));
}

TEST_CASE("one-hot encoding uses lexicographic category order") {
    auto p = write_temp("ds_onehot.csv",
                        "color,grp,lab\n"
                        "red,g,1\n"
                        "blue,g,0\n"
                        "green,h,1\n");
    Dataset d = load_csv(p, {{"color"}, "grp", "lab"});
    CHECK(d.feature_dim == 3);  // blue, green, red
    CHECK(d.samples[0].features == std::vector<double>{0, 0, 1});
    CHECK(d.samples[1].features == std::vector<double>{1, 0, 0});
    CHECK(d.samples[2].features == std::vector<double>{0, 1, 0});
}

TEST_CASE("csv round-trip preserves samples and order") {
    Dataset d = gen_synthetic(5, 2, {40, 30}, {0.5, 0.3}, 0.7);
    auto p = (std::filesystem::temp_directory_path() / "ds_roundtrip.csv").string();
    write_csv(d, p);
    CsvSchema schema;
    for (int j = 0; j < d.feature_dim; ++j) schema.feature_cols.push_back("f" + std::to_string(j));
    schema.group_col = "group";
    schema.label_col = "label";
    Dataset back = load_csv(p, schema);
    REQUIRE(back.size() == d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        CHECK(back.samples[i].features == d.samples[i].features);
        CHECK(back.samples[i].group == d.samples[i].group);
        CHECK(back.samples[i].label == d.samples[i].label);
    }
}

TEST_CASE("load_csv at tabular-benchmark scale") {
    // row count drawn from the standard adult-income training split
    const long long n = 37969;
    auto path = (std::filesystem::temp_directory_path() / "ds_adult_scale.csv").string();
    {
        std::ofstream f(path);
        f << "x0,x1,grp,lab\n";
        Rng rng(1);
        for (long long i = 0; i < n; ++i)
            f << rng.uniform() << "," << rng.uniform() << "," << (i % 3 == 0 ? "m" : "f") << "," << (i % 5 == 0)
              << "\n";
    }
    Dataset d = load_csv(path, {{"x0", "x1"}, "grp", "lab"});
    CHECK(d.size() == 37969);
    std::filesystem::remove(path);
}

TEST_CASE("gen_synthetic hits qualification counts exactly") {
    Dataset d = gen_synthetic(1, 2, {100, 100}, {0.5, 0.5}, 0.5);
    GroupStats g = group_stats(d);
    CHECK(g.tau(0) == Rat(1, 2));
    CHECK(g.tau(1) == Rat(1, 2));

    Dataset d2 = gen_synthetic(2, 2, {10, 10}, {0.7, 0.4}, 0.5);
    GroupStats g2 = group_stats(d2);
    CHECK(g2.label_counts[0][1] == 7);
    CHECK(g2.label_counts[1][1] == 4);
}

TEST_CASE("gen_synthetic determinism") {
    Dataset a = gen_synthetic(42, 2, {50, 60}, {0.6, 0.3}, 0.8);
    Dataset b = gen_synthetic(42, 2, {50, 60}, {0.6, 0.3}, 0.8);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].features == b.samples[i].features);
        CHECK(a.samples[i].group == b.samples[i].group);
        CHECK(a.samples[i].label == b.samples[i].label);
    }
}

TEST_CASE("gen_synthetic rejects bad tau") {
    CHECK_THROWS_AS(gen_synthetic(1, 1, {10}, {1.5}, 0.5), std::domain_error);
    CHECK_THROWS_AS(gen_synthetic(1, 1, {10}, {-0.1}, 0.5), std::domain_error);
}

TEST_CASE("split sizes and partition") {
    Dataset d = gen_synthetic(7, 2, {60, 40}, {0.5, 0.5}, 0.5);
    SplitResult r = split(d, {0.8, 0.1, 0.1}, 3);
    CHECK(r.train.size() == 80);
    CHECK(r.val.size() == 10);
    CHECK(r.test.size() == 10);

    // exact partition: every index exactly once
    std::vector<int> seen(d.size(), 0);
    for (size_t i : r.indices.train) ++seen[i];
    for (size_t i : r.indices.val) ++seen[i];
    for (size_t i : r.indices.test) ++seen[i];
    for (int c : seen) CHECK(c == 1);
}

TEST_CASE("split is stratified within one sample per stratum") {
    Dataset d = gen_synthetic(11, 2, {200, 100}, {0.7, 0.4}, 0.5);
    SplitResult r = split(d, {0.6, 0.2, 0.2}, 9);
    GroupStats full = group_stats(d);
    GroupStats train = group_stats(r.train);
    for (int z = 0; z < 2; ++z)
        for (int y = 0; y < 2; ++y) {
            double expect = 0.6 * static_cast<double>(full.label_counts[z][y]);
            CHECK(std::abs(static_cast<double>(train.label_counts[z][y]) - expect) <= 1.0);
        }
}

TEST_CASE("split law-style proportions") {
    // 12928/2694/3368 out of 18990
    Dataset d = gen_synthetic(13, 2, {9495, 9495}, {0.6, 0.4}, 0.5);
    double total = 18990.0;
    SplitResult r = split(d, {12928 / total, 2694 / total, 3368 / total}, 21);
    CHECK(std::abs(static_cast<double>(r.train.size()) - 12928) <= 4);
    CHECK(std::abs(static_cast<double>(r.val.size()) - 2694) <= 4);
    CHECK(std::abs(static_cast<double>(r.test.size()) - 3368) <= 4);
}

TEST_CASE("group_stats exact ratios and permutation invariance") {
    Dataset d;
    d.n_groups = 1;
    d.feature_dim = 1;
    for (int y : {1, 1, 0, 0}) d.samples.push_back({{0.0}, 0, y});
    CHECK(group_stats(d).tau(0) == Rat(1, 2));

    d.samples.clear();
    for (int i = 0; i < 4; ++i) d.samples.push_back({{0.0}, 0, 1});
    CHECK(group_stats(d).tau(0) == Rat(1));

    Dataset big = gen_synthetic(3, 2, {30, 20}, {0.7, 0.4}, 0.5);
    GroupStats before = group_stats(big);
    std::reverse(big.samples.begin(), big.samples.end());
    GroupStats after = group_stats(big);
    CHECK(before.sizes == after.sizes);
    CHECK(before.label_counts == after.label_counts);
}

TEST_CASE("group_stats counted independently of the generator") {
    // independent pass over the samples, not trusting the generator's bookkeeping
    Dataset d = gen_synthetic(17, 2, {50, 30}, {0.7, 0.4}, 0.6);
    long long n1[2] = {0, 0}, nz[2] = {0, 0};
    for (const auto& s : d.samples) {
        ++nz[s.group];
        n1[s.group] += s.label;
    }
    CHECK(nz[0] == 50);
    CHECK(nz[1] == 30);
    CHECK(n1[0] == 35);  // round(0.7*50)
    CHECK(n1[1] == 12);  // round(0.4*30)
    GroupStats g = group_stats(d);
    CHECK(g.tau(0) == Rat(35, 50));
    CHECK(g.tau(1) == Rat(12, 30));
}

TEST_CASE("group_stats empty dataset is a domain error") {
    Dataset d;
    d.n_groups = 1;
    d.feature_dim = 1;
    CHECK_THROWS_AS(group_stats(d), std::domain_error);
}

TEST_CASE("split warns on empty strata instead of failing") {
    Dataset d;
    d.n_groups = 1;
    d.feature_dim = 1;
    for (int i = 0; i < 3; ++i) d.samples.push_back({{0.1 * i}, 0, i % 2});
    SplitResult r = split(d, {0.8, 0.1, 0.1}, 1);  // strata of size 1-2 leave val/test empty
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.train.size() + r.val.size() + r.test.size() == 3);
}
