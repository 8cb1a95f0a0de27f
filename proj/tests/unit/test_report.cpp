#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "pleiades/error.hpp"
#include "pleiades/report.hpp"

using namespace pleiades;

namespace {

struct Toy {
    FeatureMatrix fm;
    Labels y;
};

// Label is decided by x alone; y and z are noise.
Toy toy(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Toy t;
    t.fm.values.resize(static_cast<Eigen::Index>(n), 3);
    t.fm.names = {"x", "y", "z"};
    t.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index c = 0; c < 3; ++c) t.fm.values(r, c) = u(rng);
        t.y[i] = t.fm.values(r, 0) > 0.2;
    }
    return t;
}

ClassifierConfig dt_config(std::vector<std::size_t> features, int min_leaf) {
    ClassifierConfig c;
    c.features = std::move(features);
    c.params = DtParams{SplitCriterion::InfoGain, false, min_leaf};
    return c;
}

}  // namespace

TEST_CASE("single leaf model gives a uniform risk map") {
    auto t = toy(60, 1);
    auto model = fit(dt_config({0, 1}, 1000), t.fm.values, t.y);
    RiskGridSpec spec;
    spec.x.feature = "x";
    spec.y.feature = "y";
    spec.x.points = spec.y.points = 15;
    auto grids = risk_map(*model, t.fm, spec);
    REQUIRE(grids.size() == 1);
    const auto& r = grids[0].risks;
    CHECK(r.rows() == 15);
    CHECK(r.cols() == 15);
    CHECK(r.maxCoeff() == r.minCoeff());
}

TEST_CASE("tree risk map is piecewise constant along the split axis") {
    auto t = toy(200, 2);
    auto model = fit(dt_config({0, 1}, 5), t.fm.values, t.y);
    RiskGridSpec spec;
    spec.x.feature = "x";
    spec.y.feature = "y";
    spec.x.points = 41;
    spec.y.points = 9;
    auto g = risk_map(*model, t.fm, spec).at(0);
    std::size_t switches = 0;
    for (Eigen::Index i = 0; i < g.risks.rows(); ++i) {
        CHECK(g.risks.row(i).maxCoeff() == g.risks.row(i).minCoeff());
        if (i > 0 && g.risks(i, 0) != g.risks(i - 1, 0)) ++switches;
    }
    CHECK(switches == 1);
    CHECK(g.risks(0, 0) < 0.5);
    CHECK(g.risks(40, 0) > 0.5);

    auto par = risk_map(*model, t.fm, spec, 3).at(0);
    CHECK(par.risks == g.risks);

    std::ostringstream out;
    write_risk_grid(out, g);
    CHECK(out.str().rfind("y\\x,", 0) == 0);
}

TEST_CASE("risk map slices and fixed values") {
    auto t = toy(120, 3);
    auto model = fit(dt_config({0, 1, 2}, 5), t.fm.values, t.y);
    RiskGridSpec spec;
    spec.x.feature = "x";
    spec.y.feature = "y";
    spec.x.points = spec.y.points = 5;
    CHECK_THROWS_AS(risk_map(*model, t.fm, spec), DomainError);
    spec.slice_feature = "z";
    spec.slice_values = {-0.5, 0.0, 0.5};
    auto grids = risk_map(*model, t.fm, spec);
    CHECK(grids.size() == 3);
    CHECK(grids[2].slice_value == 0.5);
    spec.slice_feature.reset();
    spec.fixed = {{"z", 0.25}};
    CHECK(risk_map(*model, t.fm, spec).size() == 1);
}

TEST_CASE("risk map rejects bad requests") {
    auto t = toy(80, 4);
    auto model = fit(dt_config({0}, 5), t.fm.values, t.y);
    RiskGridSpec spec;
    spec.x.feature = "x";
    spec.y.feature = "x";
    CHECK_THROWS_AS(risk_map(*model, t.fm, spec), DomainError);
    spec.y.feature = "y";
    CHECK_THROWS_AS(risk_map(*model, t.fm, spec), DomainError);
    spec.y.feature = "w";
    CHECK_THROWS(risk_map(*model, t.fm, spec));
    auto both = fit(dt_config({0, 1}, 5), t.fm.values, t.y);
    spec.y.feature = "y";
    spec.x.points = 1;
    CHECK_THROWS_AS(risk_map(*both, t.fm, spec), DomainError);
    spec.x.points = 5;
    spec.x.lo = 1.0;
    spec.x.hi = 1.0;
    CHECK_THROWS_AS(risk_map(*both, t.fm, spec), DomainError);
}

TEST_CASE("reduced spaces") {
    SearchSpace base;
    base.methods.push_back(MethodGrid{});
    auto small = reduced_space(base, {"a", "b", "c"});
    CHECK(small.subset_list.size() == 7);
    CHECK(small.methods[0].policy == SubsetPolicy::List);
    auto large = reduced_space(base, {"a", "b", "c", "d", "e", "f"});
    REQUIRE(large.subset_list.size() == 7);
    CHECK(large.subset_list[0].size() == 6);
    for (std::size_t i = 1; i < 7; ++i) CHECK(large.subset_list[i].size() == 5);
    CHECK_THROWS_AS(reduced_space(base, {}), DomainError);
}

TEST_CASE("reference tables load") {
    const std::filesystem::path dir = std::filesystem::path(PLEIADES_TEST_DATA_DIR) / "reference";
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        auto t = load_reference(e.path().string());
        CHECK(!t.header.empty());
        CHECK(!t.rows.empty());
        ++files;
    }
    CHECK(files >= 10);
    auto best = load_reference((dir / "best_classifiers.csv").string());
    CHECK(best.at(0, "target") == "alcohol");
    CHECK(best.number(0, "sensitivity") == 75.34);
    CHECK_THROWS_AS(best.column("nope"), DomainError);
    CHECK_THROWS_AS(best.number(0, "method"), ParseError);
    CHECK_THROWS(load_reference((dir / "missing.csv").string()));
}

TEST_CASE("table identifiers") {
    for (auto id : all_tables()) CHECK(parse_table_id(to_string(id)) == id);
    CHECK(parse_table_id("t5a") == TableId::T5);
    CHECK(parse_table_id("T6b") == TableId::T6);
    CHECK_THROWS_AS(parse_table_id("t4"), DomainError);
}
