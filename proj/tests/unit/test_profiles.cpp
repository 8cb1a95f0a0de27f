#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pleiades/error.hpp"
#include "pleiades/profiles.hpp"
#include "synthetic.hpp"

using namespace pleiades;

namespace {

Dataset with_factor(const std::vector<double>& values) {
    std::vector<ParticipantRecord> recs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        recs[i].id = std::to_string(i);
        for (auto f : kFactors) recs[i].attributes[static_cast<std::size_t>(f)] = values[i] + static_cast<double>(f) * (i % 2);
        recs[i].attributes[static_cast<std::size_t>(Attribute::Nscore)] = values[i];
    }
    return Dataset(DataMode::Raw, recs);
}

}  // namespace

TEST_CASE("moderate codes") {
    CHECK(moderate_code(50.0).code == '0');
    CHECK(moderate_code(47.3).code == '-');
    CHECK(moderate_code(54.2).code == '+');
    CHECK(moderate_code(49.0).code == '0');
    CHECK(moderate_code(51.0).code == '0');
    CHECK(moderate_code(48.999).code == '-');
    CHECK(moderate_code(51.001).code == '+');
    CHECK(!moderate_code(44.0).out_of_band);
    CHECK(moderate_code(43.9).out_of_band);
    CHECK(!moderate_code(56.0).out_of_band);
    CHECK(moderate_code(56.1).out_of_band);

    GroupProfile g;
    const double means[5] = {54.60, 48.42, 54.25, 45.53, 45.91};
    for (std::size_t k = 0; k < 5; ++k) g.factors[k].users.mean = means[k];
    CHECK(code_string(moderate_code(g)) == "+-+--");
}

TEST_CASE("significance arrows") {
    GroupProfile g;
    const double um[5] = {55, 50, 55, 45, 45};
    const double p[5] = {0.001, 0.5, 0.0099, 0.0001, 0.01};
    for (std::size_t k = 0; k < 5; ++k) {
        g.factors[k].users.mean = um[k];
        g.factors[k].nonusers.mean = 50;
        g.factors[k].p = p[k];
    }
    auto a = significance_arrows(g);
    CHECK(a[0] == Arrow::Up);
    CHECK(a[1] == Arrow::None);
    CHECK(a[2] == Arrow::Up);
    CHECK(a[3] == Arrow::Down);
    CHECK(a[4] == Arrow::None);
    CHECK(significance_arrows(g, 0.1)[4] == Arrow::Down);
}

TEST_CASE("t-tests match reference values") {
    std::vector<double> vals{30, 35, 28, 40, 33, 37, 20, 25, 22, 31, 18, 24, 27, 21};
    Labels lab{1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
    auto data = with_factor(vals);
    // T-scores are affine in the raw score, so the statistics are those of the raw groups.
    auto w = group_mean_tscores(data, lab, TTest::Welch);
    CHECK(w.factors[0].t == doctest::Approx(4.416996806526254).epsilon(1e-12));
    CHECK(w.factors[0].p == doctest::Approx(0.0011518845200810392).epsilon(1e-10));
    auto p = group_mean_tscores(data, lab, TTest::Pooled);
    CHECK(p.factors[0].t == doctest::Approx(4.460210431016546).epsilon(1e-12));
    CHECK(p.factors[0].p == doctest::Approx(0.0007788547779912687).epsilon(1e-10));
    CHECK(w.users == 6);
    CHECK(w.nonusers == 8);

    Labels all(vals.size(), 1);
    CHECK_THROWS_AS(group_mean_tscores(data, all), DomainError);
}

TEST_CASE("group T-score means pool back to 50") {
    auto data = testing::synthetic_raw(700, 4);
    for (auto drug : {Drug::Cannabis, Drug::Heroin, Drug::Nicotine}) {
        auto lab = binarize_usage(data, drug, Basis::Decade);
        auto g = group_mean_tscores(data, lab);
        for (const auto& f : g.factors) {
            const double pooled = (f.users.mean * double(g.users) + f.nonusers.mean * double(g.nonusers)) /
                                  double(g.users + g.nonusers);
            CHECK(pooled == doctest::Approx(50.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("equal group means give no arrows") {
    std::vector<double> vals{1, 2, 3, 4, 1, 2, 3, 4};
    Labels lab{1, 1, 1, 1, 0, 0, 0, 0};
    std::vector<ParticipantRecord> recs(8);
    for (std::size_t i = 0; i < 8; ++i) {
        recs[i].id = std::to_string(i);
        for (auto f : kFactors) recs[i].attributes[static_cast<std::size_t>(f)] = vals[i];
    }
    auto g = group_mean_tscores(Dataset(DataMode::Raw, recs), lab);
    for (auto a : significance_arrows(g)) CHECK(a == Arrow::None);
}

TEST_CASE("moderate groups keep first appearance order") {
    std::vector<GroupProfile> ps(3);
    const double m[3][5] = {{55, 45, 55, 45, 45}, {50, 50, 50, 50, 50}, {54, 46, 53, 40, 47}};
    const char* names[3] = {"heroin", "choc", "crack"};
    for (std::size_t i = 0; i < 3; ++i) {
        ps[i].target = names[i];
        for (std::size_t k = 0; k < 5; ++k) ps[i].factors[k].users.mean = m[i][k];
    }
    auto g = moderate_groups(ps);
    REQUIRE(g.size() == 2);
    CHECK(g[0].code == "+-+--");
    CHECK(g[0].targets == std::vector<std::string>{"heroin", "crack"});
    CHECK(g[1].targets == std::vector<std::string>{"choc"});
}

TEST_CASE("descriptive statistics") {
    std::vector<double> c(10, 3.0);
    auto s = summarize(c);
    CHECK(s.sd == 0.0);
    CHECK(std::isnan(s.kurtosis));

    auto data = testing::synthetic_raw(300, 2);
    FactorNorms norms{};
    for (auto& n : norms) n = {16.83, 7.36};
    auto d = descriptive_stats(data, &norms);
    REQUIRE(d.normative);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(d.factors[k].ci_low < d.factors[k].mean);
        CHECK((*d.normative)[k].mean == doctest::Approx(50 + 10 * (d.factors[k].mean - 16.83) / 7.36));
        CHECK(d.pcc(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) == 1.0);
    }
    auto loaded = load_factor_norms(std::string(PLEIADES_TEST_DATA_DIR) + "/schema/neo_norms.csv");
    CHECK(loaded[0].center == 16.83);
    CHECK(loaded[0].scale == 7.36);
}

TEST_CASE("drug profiles are parallel safe") {
    auto data = testing::synthetic_raw(400, 6);
    auto a = profile_drugs(data, Basis::Decade, TTest::Welch, 1);
    auto b = profile_drugs(data, Basis::Decade, TTest::Welch, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_json(a[i], 0.01).dump() == to_json(b[i], 0.01).dump());
}

TEST_CASE("drugs with too few users are skipped, not fatal") {
    auto data = testing::synthetic_raw(400, 6);
    std::vector<std::string> skipped;
    auto ps = profile_drugs(data, Basis::Week, TTest::Welch, 1, &skipped);
    CHECK(ps.size() + skipped.size() == kDrugCount);
    for (const auto& name : skipped) {
        const auto labels = binarize_usage(data, parse_drug(name), Basis::Week);
        const auto users = count_users(labels);
        CHECK((users < 2 || labels.size() - users < 2));
    }
    for (const auto& p : ps) CHECK(std::find(skipped.begin(), skipped.end(), p.target) == skipped.end());
}
