#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pleiades/dataset.hpp"

namespace pleiades {

struct PccResult {
    double r = 0;
    double p = 1;  // two-sided, Student t with n-2 degrees of freedom
};

// Pearson r of two 0/1 vectors; throws if either is constant.
PccResult pcc_binary(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y);

// Two-sided p-value of r under all relabelings with fixed margins (exact,
// via the hypergeometric law of the joint user count).
double permutation_pvalue(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y);

// Significant iff p <= alpha / m, m = p.size().
std::vector<bool> bonferroni(std::span<const double> p, double alpha);
// Benjamini-Hochberg step-up at level q.
std::vector<bool> bh_fdr(std::span<const double> p, double q);

// Entropy in bits of a distribution given by counts.
double entropy_bits(std::span<const double> counts);
// (H(target) - H(target | given)) / H(target); throws on a constant target.
double rig(std::span<const std::uint8_t> target, std::span<const std::uint8_t> given);
// Same from a 2x2 table n[target][given].
double rig_from_table(const double n[2][2]);

struct RigPair {
    std::size_t a = 0, b = 0;  // a < b
    double rig_ab = 0;         // RIG(a | b)
    double rig_ba = 0;
    bool symmetric = false;    // |rig_ab - rig_ba| / min < ratio
    bool strong = false;       // both above the strong threshold
};
// Pairs that are approximately symmetric or strong.
std::vector<RigPair> symmetric_rig_pairs(const Eigen::MatrixXd& rig, double ratio = 0.2, double strong = 0.15);

struct Band {
    std::string name;
    double lower = 0;  // |r| >= lower
};

struct BandTable {
    double display_threshold = 0.4;
    std::vector<Band> bands;  // ascending lower bounds, first lower = 0

    std::string band_of(double r) const;
};
BandTable default_bands(Basis basis);
// "medium=0.4,strong=0.45,very_strong=0.5" on top of a weak band from 0.
BandTable parse_bands(std::string_view spec, double display_threshold);

struct Edge {
    std::size_t a = 0, b = 0;
    double r = 0;
    std::string band;
};
// Off-diagonal pairs with |r| >= the display threshold, by |r| descending then (a, b).
std::vector<Edge> pleiade_graph(const Eigen::MatrixXd& pcc, const BandTable& bands);

struct PleiadLink {
    std::string pleiad;
    Drug core;
    Drug member;
    double r = 0;
    bool connected = false;  // |r| >= display threshold
};
std::vector<PleiadLink> check_pleiades(const Eigen::MatrixXd& pcc, const BandTable& bands);

struct CorrelationOptions {
    double alpha = 0.001;  // Bonferroni family level
    double q = 0.01;       // BH false discovery rate
    bool permutation = false;
    int jobs = 1;
};

struct CorrelationReport {
    Basis basis = Basis::Decade;
    std::vector<std::string> names;
    Eigen::MatrixXd pcc;
    Eigen::MatrixXd pvalues;
    Eigen::MatrixXd rig;  // rig(i, j) = RIG(i | j)
    std::vector<std::vector<bool>> bonferroni;
    std::vector<std::vector<bool>> bh;
    std::size_t pairs = 0;
    std::size_t bonferroni_count = 0;
    std::size_t bh_count = 0;
    CorrelationOptions options;
};

CorrelationReport correlate(const Dataset& data, Basis basis, const CorrelationOptions& options = {});
// Same for arbitrary labeled binary columns.
CorrelationReport correlate(const std::vector<Labels>& columns, const std::vector<std::string>& names,
                            const CorrelationOptions& options = {});

nlohmann::ordered_json to_json(const CorrelationReport& report, const BandTable& bands);
void write_edges(std::ostream& out, const std::vector<Edge>& edges, const std::vector<std::string>& names);

}  // namespace pleiades
