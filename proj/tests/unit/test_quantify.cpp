#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"
#include "pleiades/quantify.hpp"
#include "pleiades/stats.hpp"
#include "synthetic.hpp"

using namespace pleiades;

namespace {

double phi_inv(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

}  // namespace

TEST_CASE("T-score transform") {
    ScoreTransform n{16.83, 7.36};
    CHECK(tscore(16.83, n) == doctest::Approx(50.0));
    CHECK(tscore(16.83 + 7.36, n) == doctest::Approx(60.0));
    CHECK(tscore(23.92, n) == doctest::Approx(59.633).epsilon(1e-4));

    std::vector<double> raw{3, 8, 1, 9, 4, 4, 7};
    auto t = tscores(raw, sample_transform(raw));
    CHECK(mean(t) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(stddev(t) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("ordinal quantization matches the inverse normal oracle") {
    auto q = ordinal_quantize(std::vector<std::size_t>{5, 5});
    CHECK(std::abs(q.thresholds[0]) < 1e-15);
    CHECK(std::isinf(q.thresholds[1]));
    CHECK(q.values[0] == doctest::Approx(-0.6745).epsilon(1e-4));
    CHECK(q.values[1] == doctest::Approx(0.6745).epsilon(1e-4));

    auto q4 = ordinal_quantize(std::vector<std::size_t>{1, 1, 1, 1});
    const double expect[] = {0.125, 0.375, 0.625, 0.875};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(q4.values[static_cast<std::size_t>(i)] - phi_inv(expect[i])) < 1e-9);
    CHECK(std::abs(q4.values[0] + q4.values[3]) < 1e-12);

    auto qe = ordinal_quantize(std::vector<std::size_t>{10, 0, 10});
    CHECK(qe.empty[1]);
    CHECK(!qe.empty[0]);
    CHECK(std::abs(qe.values[1]) < 1e-12);  // boundary Phi^-1(1/2)

    CHECK_THROWS_AS(ordinal_quantize(std::vector<std::size_t>{0, 0}), DomainError);
    CHECK_THROWS_AS(ordinal_quantize(std::vector<std::size_t>{0, 7}), DomainError);
}

TEST_CASE("ordinal quantization property sweep") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(2, 12), cnt(0, 400);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::size_t> c(static_cast<std::size_t>(len(rng)));
        for (auto& v : c) v = static_cast<std::size_t>(cnt(rng));
        c[0] += 1;
        c.back() += 1;
        const double n = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0}));
        auto q = ordinal_quantize(c);
        double below = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double p = static_cast<double>(c[i]) / n;
            const double ref = c[i] == 0 ? phi_inv(below / n) : phi_inv((below + c[i] / 2.0) / n);
            if (below == 0 && c[i] == 0) continue;
            CHECK(std::abs(q.values[i] - ref) < 1e-9);
            CHECK(std::abs(q.probabilities[i] - p) < 1e-15);
            below += static_cast<double>(c[i]);
        }
        // Scale-free: scaling every count keeps the values bit-identical.
        std::vector<std::size_t> c3 = c;
        for (auto& v : c3) v *= 3;
        auto q3 = ordinal_quantize(c3);
        CHECK(q3.values == q.values);
        CHECK(q3.thresholds == q.thresholds);
        // Values are increasing with the category order.
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(q.values[i] >= q.values[i - 1]);
    }
}

TEST_CASE("quantize_ordinal_column uses codes present") {
    std::vector<double> codes{3, 1, 3, 2, 1, 3};
    auto m = quantize_ordinal_column(codes);
    CHECK(m.categories == std::vector<double>{1, 2, 3});
    CHECK(m.counts == std::vector<std::size_t>{2, 1, 3});
    CHECK(m.value_of(2) == doctest::Approx(phi_inv(2.5 / 6)).epsilon(1e-12));
    CHECK_THROWS_AS(m.value_of(4), DomainError);
}

TEST_CASE("dummy coding is one-hot") {
    std::vector<double> nom{3, 1, 2, 3, 7, 1, 4, 5, 6};
    auto d = dummy_code(nom);
    CHECK(d.categories.size() == 7);
    CHECK(d.columns.cols() == 7);
    for (Eigen::Index i = 0; i < d.columns.rows(); ++i) CHECK(d.columns.row(i).sum() == 1.0);
    auto one = dummy_code(std::vector<double>{2, 2, 2});
    CHECK(one.columns.cols() == 1);
    CHECK(one.columns.sum() == 3.0);
}

TEST_CASE("pca basics") {
    Eigen::MatrixXd line(5, 2);
    line << 1, 1, 2, 2, 3, 3, 4, 4, 5, 5;
    auto p = pca(line);
    CHECK(std::abs(p.components(0, 0) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(p.components(1, 0) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(p.eigenvalues(1)) < 1e-12);
    CHECK(p.eigenvalues.sum() == doctest::Approx(sample_covariance(line).trace()));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    Eigen::MatrixXd iso(20000, 2);
    for (Eigen::Index i = 0; i < iso.rows(); ++i) iso.row(i) << z(rng), z(rng);
    auto pi = pca(iso);
    CHECK(pi.eigenvalues(0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pi.eigenvalues(1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pi.kaiser_threshold == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("jacobi eigen agrees with the Eigen solver") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 9;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = z(rng);
        a = (a + a.transpose()).eval();
        auto mine = symmetric_eigen(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
        for (int i = 0; i < n; ++i) CHECK(std::abs(mine.values(i) - ref.eigenvalues()(n - 1 - i)) < 1e-10);
        CHECK((a * mine.vectors - mine.vectors * mine.values.asDiagonal()).norm() < 1e-9);
        CHECK((mine.vectors.transpose() * mine.vectors - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
        for (int j = 0; j < n; ++j) {
            Eigen::Index k;
            mine.vectors.col(j).cwiseAbs().maxCoeff(&k);
            CHECK(mine.vectors(k, j) > 0);
        }
    }
}

TEST_CASE("catpca quantization") {
    // Two categories whose rows are identical within category.
    Eigen::MatrixXd x(6, 2);
    x << 1, 2, 1, 2, 1, 2, -1, 0, -1, 0, -1, 0;
    std::vector<double> nom{1, 1, 1, 2, 2, 2};
    auto m = catpca_quantize(x, nom);
    REQUIRE(m.values.size() == 2);
    CHECK(m.values[0] != m.values[1]);
    CHECK(std::abs(m.values[0] + m.values[1]) < 1e-12);  // weighted mean zero with equal counts
    std::vector<double> swapped{2, 2, 2, 1, 1, 1};
    auto s = catpca_quantize(x, swapped);
    CHECK(std::abs(std::abs(s.values[0]) - std::abs(m.values[1])) < 1e-12);
    const double gap = m.value_of(1) - m.value_of(2);
    const double gap_swapped = s.value_of(2) - s.value_of(1);
    CHECK(std::abs(std::abs(gap) - std::abs(gap_swapped)) < 1e-12);

    // Identical membership statistics give equal values.
    Eigen::MatrixXd y(4, 2);
    y << 1, 0, 0, 1, 1, 0, 0, 1;
    std::vector<double> dup{1, 1, 2, 2};
    auto e = catpca_quantize(y, dup);
    CHECK(e.coincident);
    CHECK(e.values[0] == e.values[1]);
    CHECK(!m.coincident);
}

TEST_CASE("quantify_dataset on raw data") {
    auto raw = testing::synthetic_raw(400, 8);
    auto m = quantify_dataset(raw, NominalMode::CatPca);
    CHECK(m.cols() == kAttributeCount);
    CHECK(m.names[0] == "age");
    for (std::size_t j = 0; j < m.cols(); ++j) CHECK(m.values.col(static_cast<Eigen::Index>(j)).allFinite());
    CHECK(m.provenance[m.index_of("country")].method == "catpca");
    CHECK(m.provenance[m.index_of("nscore")].method == "ordinal");

    auto d = quantify_dataset(raw, NominalMode::Dummy);
    std::size_t country_cols = 0;
    for (const auto& n : d.names) country_cols += n.rfind("country_", 0) == 0;
    auto codes = raw.column(Attribute::Country);
    std::set<double> distinct(codes.begin(), codes.end());
    CHECK(country_cols == distinct.size());
    CHECK(d.index_of("gender") < d.cols());
    CHECK_THROWS(d.index_of("country"));
}

TEST_CASE("quantified mode keeps published values") {
    auto raw = testing::synthetic_raw(200, 9);
    auto q = testing::to_quantified(raw);
    auto m = quantify_dataset(q, NominalMode::CatPca);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(m.values(static_cast<Eigen::Index>(i), 5) == q[i].attribute(Attribute::Nscore));
}
