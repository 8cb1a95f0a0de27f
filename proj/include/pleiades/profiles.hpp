#pragma once

#include <Eigen/Dense>
#include <array>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pleiades/dataset.hpp"
#include "pleiades/quantify.hpp"

namespace pleiades {

struct ColumnSummary {
    std::size_t n = 0;
    double mean = 0;
    double sd = 0;       // n - 1
    double ci_low = 0;   // 95%, Student t
    double ci_high = 0;
    double kurtosis = 0;  // excess, bias adjusted
    double skewness = 0;  // adjusted Fisher-Pearson
};
ColumnSummary summarize(std::span<const double> x, double level = 0.95);

using FactorNorms = std::array<ScoreTransform, 5>;
FactorNorms load_factor_norms(const std::string& path);

struct Descriptives {
    DataMode mode = DataMode::Raw;
    std::array<ColumnSummary, 5> factors;
    std::optional<std::array<ColumnSummary, 5>> normative;  // T-scores against population norms
    Eigen::MatrixXd pcc;  // 5 x 5; NaN where a column is constant
};
Descriptives descriptive_stats(const Dataset& data, const FactorNorms* norms = nullptr);

enum class TTest { Welch, Pooled };
TTest parse_ttest(std::string_view s);
std::string_view to_string(TTest t);

struct FactorComparison {
    ColumnSummary users;
    ColumnSummary nonusers;
    double t = 0;
    double df = 0;
    double p = 1;
};

struct GroupProfile {
    std::string target;
    Basis basis = Basis::Decade;
    TTest test = TTest::Welch;
    std::size_t users = 0;
    std::size_t nonusers = 0;
    std::array<FactorComparison, 5> factors;  // N, E, O, A, C
};

// Sample T-scores of the five factors over the whole data, then compared
// between the labeled groups.
GroupProfile group_mean_tscores(const Dataset& data, const Labels& labels, TTest test = TTest::Welch);

struct ModerateCode {
    char code = '0';          // '-', '0' or '+'
    bool out_of_band = false;  // mean outside [44, 56]
};
ModerateCode moderate_code(double mean_tscore);
std::array<ModerateCode, 5> moderate_code(const GroupProfile& profile);
std::string code_string(const std::array<ModerateCode, 5>& codes);

enum class Arrow { None, Up, Down };
std::string_view to_string(Arrow a);
std::array<Arrow, 5> significance_arrows(const GroupProfile& profile, double alpha = 0.01);

struct ModerateGroup {
    std::string code;
    std::vector<std::string> targets;
};
// Targets sharing a code, groups in order of first appearance.
std::vector<ModerateGroup> moderate_groups(const std::vector<GroupProfile>& profiles);

// Every drug on the basis, schema order. Drugs with fewer than two users or
// non-users are left out and named in `skipped`.
std::vector<GroupProfile> profile_drugs(const Dataset& data, Basis basis, TTest test = TTest::Welch, int jobs = 1,
                                        std::vector<std::string>* skipped = nullptr);

nlohmann::ordered_json to_json(const GroupProfile& p, double alpha);
nlohmann::ordered_json to_json(const Descriptives& d);
void write_arrows(std::ostream& out, const std::vector<GroupProfile>& profiles, double alpha);

}  // namespace pleiades
