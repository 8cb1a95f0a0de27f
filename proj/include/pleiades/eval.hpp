#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pleiades/classifiers.hpp"
#include "pleiades/quantify.hpp"

namespace pleiades {

struct ConfusionCounts {
    std::uint64_t tp = 0, fn = 0, tn = 0, fp = 0;

    std::uint64_t users() const { return tp + fn; }
    std::uint64_t nonusers() const { return tn + fp; }
    bool operator==(const ConfusionCounts&) const = default;
};

// Exact non-negative rational num/den; den > 0.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
int compare(const Rational& a, const Rational& b);
Rational operator+(const Rational& a, const Rational& b);
// 100 * r with `decimals` digits, rounded half to even on the exact value.
std::string format_percent(const Rational& r, int decimals = 2);

struct EvalResult {
    std::size_t config_id = 0;
    ClassifierConfig config;
    ConfusionCounts counts;

    Rational sensitivity() const;  // fraction; multiply by 100 for percent
    Rational specificity() const;
    Rational min_rate() const;
    Rational sum_rate() const;
    double sensitivity_percent() const { return 100.0 * sensitivity().value(); }
    double specificity_percent() const { return 100.0 * specificity().value(); }
};

struct LoocvOptions {
    bool fast = true;  // exact incremental paths where available
    int jobs = 1;      // fold-level threads
};

struct LoocvPrediction {
    std::vector<double> risk;      // per training row, in `rows` order
    std::vector<std::uint8_t> label;
};

// Held-out prediction of every row in `rows` from a model fitted on the others.
LoocvPrediction loocv_predict(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y,
                              std::span<const std::size_t> rows, const LoocvOptions& options = {});
EvalResult loocv(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y,
                 std::span<const std::size_t> rows, const LoocvOptions& options = {});
EvalResult loocv(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y,
                 const LoocvOptions& options = {});

// Less than half on either rate is inadmissible.
bool admissible(const EvalResult& r);
// Strict "better" under max-min, then max-sum, then lower config id.
bool better(const EvalResult& a, const EvalResult& b);

struct Selection {
    std::optional<EvalResult> best;  // empty: no admissible classifier
    bool tie = false;                // another result has the same min and sum
    std::size_t admissible = 0;
};
Selection select_best(const std::vector<EvalResult>& results);

// ---- search spaces ----------------------------------------------------------

enum class SubsetPolicy { All, Ranked, List };

struct MethodGrid {
    Method method = Method::Dt;
    SubsetPolicy policy = SubsetPolicy::All;
    std::vector<MethodParams> params;  // canonical grid order
    bool explicit_seed = false;        // forest seed given in the space file
};

struct SearchSpace {
    std::vector<std::string> features;  // candidate features, in bit order
    std::vector<std::string> ranking;   // ranked policy order (empty: principal variables)
    std::vector<std::vector<std::string>> subset_list;  // list policy
    int max_subset_size = 0;  // 0: no cap
    std::vector<double> weights{1.0};
    std::vector<MethodGrid> methods;
};

SearchSpace parse_search_space(std::istream& in, const std::string& origin = "<space>");
SearchSpace load_search_space(const std::string& path);
// Sets the forest seed of every grid that does not fix its own.
void apply_forest_seed(SearchSpace& space, std::uint64_t seed);

// Enumerates configurations in canonical order: method, subset, parameters, weight.
class ConfigEnumerator {
public:
    ConfigEnumerator(const SearchSpace& space, const FeatureMatrix& features);

    std::size_t size() const { return total_; }
    ClassifierConfig at(std::size_t id) const;
    const std::vector<std::vector<std::size_t>>& subsets(std::size_t method_block) const {
        return blocks_[method_block].subsets;
    }

private:
    struct Block {
        const MethodGrid* grid;
        std::vector<std::vector<std::size_t>> subsets;
        std::size_t offset = 0;
        std::size_t size = 0;
    };
    std::vector<Block> blocks_;
    std::vector<double> weights_;
    std::size_t total_ = 0;
};

struct SearchOptions {
    std::size_t budget = 0;  // 0: whole space
    int jobs = 1;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct SearchOutcome {
    std::vector<EvalResult> results;  // every evaluated config, by config id
    std::vector<std::size_t> failed;  // config ids that could not be fitted
    std::vector<std::string> failures;
    Selection selection;
    std::size_t evaluated = 0;
    std::size_t space_size = 0;
};

SearchOutcome search(const SearchSpace& space, const FeatureMatrix& features, const Labels& y,
                     const SearchOptions& options = {});

// Admissible results sorted by min desc, sum desc, id asc.
std::vector<EvalResult> leaderboard(const SearchOutcome& outcome);
void write_leaderboard(std::ostream& out, const std::vector<EvalResult>& board, const FeatureMatrix& features);

std::string feature_list(const ClassifierConfig& c, const FeatureMatrix& features, std::string_view sep = " ");

}  // namespace pleiades
