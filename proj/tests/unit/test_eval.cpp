#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "pleiades/error.hpp"
#include "pleiades/eval.hpp"

using namespace pleiades;

namespace {

EvalResult result(std::size_t id, std::uint64_t sens, std::uint64_t spec) {
    EvalResult r;
    r.config_id = id;
    r.counts = {sens, 100 - sens, spec, 100 - spec};
    return r;
}

struct Toy {
    Eigen::MatrixXd x;
    Labels y;
};

// Rounded values create ties that exercise the binning and neighbour order.
Toy toy(std::size_t n, std::size_t d, std::uint64_t seed, double round_to = 0.25) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Toy t;
    t.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    t.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = z(rng);
            if (round_to > 0) v = std::round(v / round_to) * round_to;
            t.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            s += v;
        }
        t.y[i] = s + z(rng) > 0.3 ? 1 : 0;
    }
    return t;
}

FeatureMatrix as_matrix(const Toy& t) {
    FeatureMatrix m;
    m.values = t.x;
    for (Eigen::Index j = 0; j < t.x.cols(); ++j) m.names.push_back("f" + std::to_string(j));
    m.provenance.resize(static_cast<std::size_t>(t.x.cols()));
    return m;
}

}  // namespace

TEST_CASE("percent formatting rounds half to even on the exact value") {
    CHECK(format_percent({1, 8}) == "12.50");
    CHECK(format_percent({1, 3}) == "33.33");
    CHECK(format_percent({2, 3}) == "66.67");
    CHECK(format_percent({13, 20000}) == "0.06");
    CHECK(format_percent({15, 20000}) == "0.08");
    CHECK(format_percent({1, 1}) == "100.00");
    CHECK(format_percent({0, 5}) == "0.00");
    CHECK(format_percent({1089, 1885}) == "57.77");
    CHECK(format_percent({1, 3}, 0) == "33");
}

TEST_CASE("rational comparison") {
    CHECK(compare({1, 2}, {2, 4}) == 0);
    CHECK(compare({1, 3}, {1, 2}) < 0);
    auto s = Rational{1, 2} + Rational{1, 3};
    CHECK(compare(s, {5, 6}) == 0);
}

TEST_CASE("selection examples") {
    auto s = select_best({result(0, 80, 60), result(1, 70, 71)});
    REQUIRE(s.best);
    CHECK(s.best->config_id == 1);
    CHECK(!s.tie);

    auto t = select_best({result(4, 72, 70), result(2, 70, 72)});
    REQUIRE(t.best);
    CHECK(t.best->config_id == 2);
    CHECK(t.tie);

    auto none = select_best({result(0, 95, 40)});
    CHECK(!none.best);
    CHECK(none.admissible == 0);

    // Exactly one half is admissible.
    CHECK(admissible(result(0, 50, 90)));
    CHECK(!admissible(result(0, 49, 90)));
}

TEST_CASE("selection ignores input order") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(30, 100);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EvalResult> rs;
        for (std::size_t i = 0; i < 12; ++i) rs.push_back(result(i, static_cast<std::uint64_t>(u(rng)), static_cast<std::uint64_t>(u(rng))));
        auto a = select_best(rs);
        std::shuffle(rs.begin(), rs.end(), rng);
        auto b = select_best(rs);
        REQUIRE(a.best.has_value() == b.best.has_value());
        if (a.best) CHECK(a.best->config_id == b.best->config_id);
        CHECK(a.tie == b.tie);
    }
}

TEST_CASE("1-NN on duplicated points is perfect") {
    Eigen::MatrixXd x(8, 2);
    x << 0, 0, 0, 0, 1, 5, 1, 5, 3, 1, 3, 1, 7, 7, 7, 7;
    Labels y{1, 1, 0, 0, 1, 1, 0, 0};
    auto r = loocv(ClassifierConfig{{0, 1}, 1.0, KnnParams{1}}, x, y);
    CHECK(r.counts == ConfusionCounts{4, 0, 4, 0});
    CHECK(format_percent(r.sensitivity()) == "100.00");
    CHECK(format_percent(r.specificity()) == "100.00");
}

TEST_CASE("constant user classifier") {
    // A huge weight on a 1-NN vote of users makes every prediction "user"
    // only when a user is in the neighbourhood, so use NB with one level.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 1);
    Labels y{1, 1, 1, 0, 0, 0};
    auto r = loocv(ClassifierConfig{{0}, 5.0, NbParams{}}, x, y);
    CHECK(r.counts == ConfusionCounts{3, 0, 0, 3});
    CHECK(format_percent(r.sensitivity()) == "100.00");
    CHECK(format_percent(r.specificity()) == "0.00");
}

TEST_CASE("four-row naive Bayes trace") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 1, 1;
    Labels y{1, 1, 0, 0};
    ClassifierConfig c{{0}, 1.0, NbParams{}};
    for (bool fast : {true, false}) {
        auto p = loocv_predict(c, x, y, std::vector<std::size_t>{0, 1, 2, 3}, LoocvOptions{fast, 1});
        CHECK(p.risk[0] == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
        CHECK(p.risk[1] == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
        CHECK(p.risk[2] == doctest::Approx(0.6).epsilon(1e-14));
        CHECK(p.risk[3] == doctest::Approx(0.6).epsilon(1e-14));
        auto r = loocv(c, x, y, LoocvOptions{fast, 1});
        CHECK(r.counts == ConfusionCounts{0, 2, 0, 2});
    }
}

TEST_CASE("fast leave-one-out equals naive refits") {
    std::vector<MethodParams> exact{
        KnnParams{1}, KnnParams{4}, KnnParams{3, Distance::Fisher, 8, Kernel::Triangular, Kernel::Gaussian},
        KnnParams{5, Distance::Adaptive, 10, Kernel::Epanechnikov, Kernel::Uniform},
        DtParams{SplitCriterion::InfoGain, false, 1}, DtParams{SplitCriterion::GiniGain, false, 4},
        DtParams{SplitCriterion::DkmGain, true, 3}, NbParams{}, NbParams{4}, NbParams{1},
        PdfeParams{1, Kernel::Gaussian}, PdfeParams{3, Kernel::Epanechnikov}, PdfeParams{6, Kernel::Uniform},
        RfParams{5, DtParams{SplitCriterion::GiniGain, false, 2}, 0, true, 9},
        RfParams{3, DtParams{SplitCriterion::InfoGain, true, 1}, 2, false, 4}};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto t = toy(40 + seed * 3, 3, seed, seed % 2 ? 0.25 : 0.0);
        for (const auto& p : exact)
            for (double w : {0.5, 1.0, 2.5}) {
                ClassifierConfig c{{0, 2}, w, p};
                std::vector<std::size_t> rows;
                for (std::size_t i = 0; i < t.y.size(); ++i)
                    if (i % 5 != 1) rows.push_back(i);
                auto fast = loocv_predict(c, t.x, t.y, rows, LoocvOptions{true, 1});
                auto slow = loocv_predict(c, t.x, t.y, rows, LoocvOptions{false, 1});
                INFO("method ", to_string(c.method()), " ", describe_params(p), " seed ", seed, " weight ", w);
                CHECK(fast.risk == slow.risk);
                CHECK(fast.label == slow.label);
            }
    }
}

TEST_CASE("warm-started logistic folds agree with cold refits") {
    auto t = toy(60, 3, 17, 0.0);
    for (bool balanced : {false, true}) {
        ClassifierConfig c{{0, 1, 2}, 1.5, LrParams{balanced}};
        std::vector<std::size_t> rows(t.y.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        auto fast = loocv_predict(c, t.x, t.y, rows, LoocvOptions{true, 1});
        auto slow = loocv_predict(c, t.x, t.y, rows, LoocvOptions{false, 1});
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(std::abs(fast.risk[i] - slow.risk[i]) < 1e-9);
        CHECK(fast.label == slow.label);
    }
}

TEST_CASE("parallel leave-one-out equals serial bit for bit") {
    auto t = toy(80, 3, 23);
    std::vector<MethodParams> ps{KnnParams{5}, DtParams{}, LdaParams{}, GmParams{}, PdfeParams{4, Kernel::Gaussian},
                                 LrParams{}, NbParams{}, RfParams{4, DtParams{SplitCriterion::GiniGain, false, 1}, 0, true, 2}};
    for (const auto& p : ps)
        for (bool fast : {true, false}) {
            ClassifierConfig c{{0, 1, 2}, 1.2, p};
            std::vector<std::size_t> rows(t.y.size());
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            auto a = loocv_predict(c, t.x, t.y, rows, LoocvOptions{fast, 1});
            auto b = loocv_predict(c, t.x, t.y, rows, LoocvOptions{fast, 4});
            CHECK(a.risk == b.risk);
            CHECK(a.label == b.label);
        }
}

TEST_CASE("leave-one-out preconditions and partition") {
    auto t = toy(30, 2, 5);
    auto r = loocv(ClassifierConfig{{0, 1}, 1.0, DtParams{}}, t.x, t.y);
    CHECK(r.counts.tp + r.counts.fn + r.counts.tn + r.counts.fp == 30);
    Labels one_user(30, 0);
    one_user[3] = 1;
    CHECK_THROWS_AS(loocv(ClassifierConfig{{0, 1}, 1.0, DtParams{}}, t.x, one_user), DomainError);
}

TEST_CASE("search space parsing") {
    std::istringstream in(R"(
features = ["f0", "f1", "f2"]
weights = [0.5, 1.0]

[[method]]
name = "dt"
criterion = ["info", "gini"]
min_leaf = 3

[[method]]
name = "knn"
subsets = "all"
k = [1, 3]
vote_kernel = ["uniform", "gaussian"]
)");
    auto s = parse_search_space(in);
    REQUIRE(s.methods.size() == 2);
    CHECK(s.methods[0].policy == SubsetPolicy::All);
    CHECK(s.methods[0].params.size() == 2);
    CHECK(describe_params(s.methods[0].params[1]) == "criterion=gini;fisher=false;min_leaf=3");
    CHECK(s.methods[1].params.size() == 4);
    CHECK(describe_params(s.methods[1].params[1]) ==
          "k=1;distance=euclidean;k_transform=1;vote_kernel=gaussian;transform_kernel=uniform");

    auto t = toy(30, 3, 1);
    ConfigEnumerator e(s, as_matrix(t));
    CHECK(e.size() == 7 * 2 * 2 + 7 * 4 * 2);
    // Weight varies fastest, then parameters, then subsets.
    auto c0 = e.at(0), c1 = e.at(1), c2 = e.at(2), c4 = e.at(4);
    CHECK(c0.user_weight == 0.5);
    CHECK(c1.user_weight == 1.0);
    CHECK(c0.params.index() == c1.params.index());
    CHECK(describe_params(c2.params) == describe_params(s.methods[0].params[1]));
    CHECK(c0.features == std::vector<std::size_t>{0});
    CHECK(c4.features == std::vector<std::size_t>{1});
    CHECK(e.at(28).method() == Method::Knn);
    CHECK_THROWS_AS(e.at(e.size()), DomainError);

    std::istringstream bad_key("weights = [1.0]\nbogus = 1\n[[method]]\nname = \"dt\"\n");
    CHECK_THROWS_AS(parse_search_space(bad_key), ParseError);
    std::istringstream bad_param("[[method]]\nname = \"dt\"\nk = 3\n");
    CHECK_THROWS_AS(parse_search_space(bad_param), ParseError);
    std::istringstream no_method("weights = [1.0]\n");
    CHECK_THROWS_AS(parse_search_space(no_method), ParseError);
    std::istringstream syntax("weights = [1.0\n");
    CHECK_THROWS_AS(parse_search_space(syntax), ParseError);
}

TEST_CASE("subset policies") {
    std::istringstream in(R"(
ranking = ["f2", "f0", "f1"]
subsets = [["f1"], ["f0", "f2"]]

[[method]]
name = "nb"

[[method]]
name = "knn"
subsets = "ranked"

[[method]]
name = "gm"
subsets = "all"
)");
    auto s = parse_search_space(in);
    auto t = toy(30, 3, 2);
    ConfigEnumerator e(s, as_matrix(t));
    CHECK(e.subsets(0) == std::vector<std::vector<std::size_t>>{{1}, {0, 2}});
    CHECK(e.subsets(1) == std::vector<std::vector<std::size_t>>{{2}, {0, 2}, {0, 1, 2}});
    CHECK(e.subsets(2).size() == 7);

    std::istringstream capped("max_subset_size = 2\n[[method]]\nname = \"dt\"\n");
    ConfigEnumerator ec(parse_search_space(capped), as_matrix(t));
    CHECK(ec.size() == 6);

    // Without a ranking, ranked prefixes follow principal variables.
    std::istringstream pv("[[method]]\nname = \"knn\"\n");
    auto sp = parse_search_space(pv);
    CHECK(sp.methods[0].policy == SubsetPolicy::Ranked);
    ConfigEnumerator ep(sp, as_matrix(t));
    CHECK(ep.size() == 3);
}

TEST_CASE("forest seeds") {
    std::istringstream in("[[method]]\nname = \"rf\"\ntrees = 3\n[[method]]\nname = \"rf\"\nseed = 5\n");
    auto s = parse_search_space(in);
    apply_forest_seed(s, 99);
    CHECK(std::get<RfParams>(s.methods[0].params[0]).seed == 99);
    CHECK(std::get<RfParams>(s.methods[1].params[0]).seed == 5);
}

TEST_CASE("search is a deterministic canonical prefix") {
    std::istringstream in(R"(
weights = [0.5, 1.0, 2.0]
[[method]]
name = "dt"
min_leaf = [2, 6]
[[method]]
name = "nb"
[[method]]
name = "knn"
k = [3, 7]
)");
    auto s = parse_search_space(in);
    auto t = toy(70, 3, 31);
    auto fm = as_matrix(t);
    auto serial = search(s, fm, t.y, SearchOptions{0, 1, {}});
    auto par = search(s, fm, t.y, SearchOptions{0, 3, {}});
    REQUIRE(serial.results.size() == par.results.size());
    CHECK(serial.space_size == 7 * 2 * 3 + 7 * 3 + 3 * 2 * 3);
    for (std::size_t i = 0; i < serial.results.size(); ++i) {
        CHECK(serial.results[i].config_id == par.results[i].config_id);
        CHECK(serial.results[i].counts == par.results[i].counts);
    }
    std::ostringstream a, b;
    write_leaderboard(a, leaderboard(serial), fm);
    write_leaderboard(b, leaderboard(par), fm);
    CHECK(a.str() == b.str());

    auto prefix = search(s, fm, t.y, SearchOptions{10, 2, {}});
    CHECK(prefix.evaluated == 10);
    REQUIRE(prefix.results.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(prefix.results[i].counts == serial.results[i].counts);

    // Board order: min desc, sum desc, id asc.
    auto board = leaderboard(serial);
    for (std::size_t i = 1; i < board.size(); ++i) CHECK(!better(board[i], board[i - 1]));
    if (serial.selection.best) CHECK(board.front().config_id == serial.selection.best->config_id);
}

TEST_CASE("single configuration space") {
    std::istringstream in("features = [\"f0\"]\n[[method]]\nname = \"gm\"\n");
    auto s = parse_search_space(in);
    auto t = toy(40, 2, 8);
    auto o = search(s, as_matrix(t), t.y);
    REQUIRE(o.results.size() == 1);
    CHECK(o.results[0].counts == loocv(ClassifierConfig{{0}, 1.0, GmParams{}}, t.x, t.y).counts);
}

TEST_CASE("failing configurations are recorded, not fatal") {
    std::istringstream in("features = [\"f0\"]\n[[method]]\nname = \"knn\"\nk = [3, 500]\n");
    auto s = parse_search_space(in);
    auto t = toy(40, 2, 8);
    auto o = search(s, as_matrix(t), t.y);
    CHECK(o.results.size() == 1);
    CHECK(o.failed == std::vector<std::size_t>{1});
    CHECK(!o.failures[0].empty());
}
