#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pleiades/dataset.hpp"

namespace pleiades {

enum class Method : std::uint8_t { Knn, Dt, Lda, Gm, Pdfe, Lr, Nb, Rf };
enum class Kernel : std::uint8_t { Uniform, Triangular, Epanechnikov, Gaussian };
enum class Distance : std::uint8_t { Euclidean, Fisher, Adaptive };
enum class SplitCriterion : std::uint8_t { InfoGain, GiniGain, DkmGain };

std::string_view to_string(Method m);
std::string_view to_string(Kernel k);
std::string_view to_string(Distance d);
std::string_view to_string(SplitCriterion c);
Method parse_method(std::string_view s);
Kernel parse_kernel(std::string_view s);
Distance parse_distance(std::string_view s);
SplitCriterion parse_criterion(std::string_view s);

// Kernel profile K(u) for u = distance / bandwidth >= 0.
double kernel_profile(Kernel k, double u);

struct KnnParams {
    int k = 5;
    Distance distance = Distance::Euclidean;
    int k_transform = 5;  // neighbourhood used by the Fisher / adaptive transform
    Kernel vote_kernel = Kernel::Uniform;
    Kernel transform_kernel = Kernel::Uniform;
};

struct DtParams {
    SplitCriterion criterion = SplitCriterion::InfoGain;
    bool fisher_combination = false;
    int min_leaf = 5;
};

struct LdaParams {
    SplitCriterion criterion = SplitCriterion::InfoGain;
};

struct GmParams {};

struct PdfeParams {
    int k_density = 10;
    Kernel kernel = Kernel::Gaussian;
};

struct LrParams {
    // Additionally reweight both classes by inverse class frequency.
    bool balanced = false;
};

struct NbParams {
    int max_categorical_levels = 20;
};

struct RfParams {
    int trees = 100;
    DtParams tree{SplitCriterion::GiniGain, false, 1};
    int mtry = 0;  // 0 means ceil(sqrt(#features))
    bool bootstrap = true;
    std::uint64_t seed = 1;
};

// Alternative order matches Method.
using MethodParams = std::variant<KnnParams, DtParams, LdaParams, GmParams, PdfeParams, LrParams, NbParams, RfParams>;

struct ClassifierConfig {
    std::vector<std::size_t> features;  // column indices, ascending
    double user_weight = 1.0;
    MethodParams params = KnnParams{};

    Method method() const { return static_cast<Method>(params.index()); }
    void validate(std::size_t feature_count) const;
};

// "k=5;distance=fisher;..." in a fixed key order.
std::string describe_params(const MethodParams& p);
nlohmann::ordered_json params_to_json(const MethodParams& p);
MethodParams params_from_json(Method m, const nlohmann::json& j);

// Training data: full design matrix plus the rows that form the training set.
struct TrainingView {
    const Eigen::MatrixXd& x;
    const Labels& y;
    std::span<const std::size_t> rows;
};

class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    virtual Method method() const = 0;
    // Probability of "user" for a full-width feature row.
    virtual double risk(std::span<const double> row) const = 0;
    // Label at risk >= 0.5 (LDA: its own threshold, risk is already the label).
    virtual bool classify(std::span<const double> row) const { return risk(row) >= 0.5; }

    const ClassifierConfig& config() const { return config_; }
    const std::vector<std::string>& feature_names() const { return names_; }
    void set_feature_names(std::vector<std::string> names) { names_ = std::move(names); }

    // Method-specific fitted parameters.
    virtual nlohmann::ordered_json fitted_json() const = 0;

protected:
    explicit TrainedModel(ClassifierConfig c) : config_(std::move(c)) {}
    Eigen::VectorXd select(std::span<const double> row) const;

    ClassifierConfig config_;
    std::vector<std::string> names_;
};

std::unique_ptr<TrainedModel> fit(const ClassifierConfig& config, const TrainingView& data);
std::unique_ptr<TrainedModel> fit(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y);

// ---- split gains ----------------------------------------------------------

// n[i][j]: weighted count of class i (0 non-user, 1 user) with split value j.
struct Contingency {
    double n[2][2] = {{0, 0}, {0, 0}};
};

double base_function(SplitCriterion c, double m0, double m1);
double split_gain(const Contingency& t, SplitCriterion c);

// ---- kNN ------------------------------------------------------------------

class KnnModel final : public TrainedModel {
public:
    KnnModel(ClassifierConfig c, Eigen::MatrixXd points, Labels labels);
    Method method() const override { return Method::Knn; }
    double risk(std::span<const double> row) const override;
    // Risk with one training point treated as absent (leave-one-out).
    double risk_excluding(const Eigen::VectorXd& x, std::ptrdiff_t excluded) const;
    nlohmann::ordered_json fitted_json() const override;

private:
    const KnnParams& p() const { return std::get<KnnParams>(config_.params); }
    Eigen::MatrixXd points_;  // rows are training points (selected features)
    Labels labels_;
};

// ---- decision tree ----------------------------------------------------------

struct TreeNode {
    // Leaf when left < 0.
    int left = -1;
    int right = -1;
    int feature = -1;             // position in the config feature list; -1 for a Fisher split
    Eigen::VectorXd direction;    // Fisher split direction over the config features
    double threshold = 0;         // go left when value <= threshold
    double risk = 0;
    double users = 0;             // unweighted counts reaching the node
    double nonusers = 0;
    double gain = 0;
};

class TreeModel final : public TrainedModel {
public:
    TreeModel(ClassifierConfig c, std::vector<TreeNode> nodes);
    Method method() const override { return Method::Dt; }
    double risk(std::span<const double> row) const override;
    double risk_selected(const Eigen::VectorXd& x) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    nlohmann::ordered_json fitted_json() const override;

private:
    std::vector<TreeNode> nodes_;
};

// Per-feature sorted distinct values and the bin of every row, built once on
// the full data and shared by every fold of a leave-one-out run.
struct BinIndex {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint32_t>> bins;  // [feature][row]

    static BinIndex build(const Eigen::MatrixXd& x, const std::vector<std::size_t>& features,
                          std::span<const std::size_t> rows);
};

std::vector<TreeNode> grow_tree(const DtParams& params, double user_weight, const Eigen::MatrixXd& x,
                                const Labels& y, const std::vector<std::size_t>& features, const BinIndex& index,
                                std::vector<std::uint32_t> rows, std::uint64_t* rng_state = nullptr, int mtry = 0);

// ---- LDA --------------------------------------------------------------------

class LdaModel final : public TrainedModel {
public:
    LdaModel(ClassifierConfig c, Eigen::VectorXd direction, double threshold, bool user_above);
    Method method() const override { return Method::Lda; }
    double risk(std::span<const double> row) const override;
    const Eigen::VectorXd& direction() const { return direction_; }
    double threshold() const { return threshold_; }
    nlohmann::ordered_json fitted_json() const override;

private:
    Eigen::VectorXd direction_;
    double threshold_;
    bool user_above_;
};

// Unnormalized LDA direction (S_user + S_non)^-1 (mu_user - mu_non).
Eigen::VectorXd lda_direction(const Eigen::MatrixXd& users, const Eigen::MatrixXd& nonusers);

// ---- Gaussian model -----------------------------------------------------------

struct GaussianClass {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // regularized as used
    Eigen::MatrixXd inverse_factor;  // L^-1 from the Cholesky factor
    double log_det = 0;
    double prior = 0.5;
};

GaussianClass fit_gaussian_class(const Eigen::MatrixXd& rows, double prior);
double gaussian_log_density(const GaussianClass& g, const Eigen::VectorXd& x);

class GmModel final : public TrainedModel {
public:
    GmModel(ClassifierConfig c, GaussianClass user, GaussianClass non);
    Method method() const override { return Method::Gm; }
    double risk(std::span<const double> row) const override;
    double risk_selected(const Eigen::VectorXd& x) const;
    nlohmann::ordered_json fitted_json() const override;

private:
    GaussianClass user_, non_;
};

// ---- PDFE ---------------------------------------------------------------------

// Kernel normalized to unit integral over R^d with bandwidth r.
double log_kernel_density(Kernel k, int dim, double distance, double radius);
// Bandwidth of every point: distance to its k-th nearest other point.
std::vector<double> pdfe_radii(const Eigen::MatrixXd& points, int k);

class PdfeModel final : public TrainedModel {
public:
    PdfeModel(ClassifierConfig c, Eigen::MatrixXd points, Labels labels, std::vector<double> radii);
    Method method() const override { return Method::Pdfe; }
    double risk(std::span<const double> row) const override;
    double risk_selected(const Eigen::VectorXd& x) const;
    const std::vector<double>& radii() const { return radii_; }
    nlohmann::ordered_json fitted_json() const override;

    // Risk given explicit radii and an excluded training point (-1 for none).
    static double risk_with(const PdfeParams& p, double weight, const Eigen::MatrixXd& points, const Labels& labels,
                            const std::vector<double>& radii, const Eigen::VectorXd& x, std::ptrdiff_t excluded,
                            bool* fell_back = nullptr);

private:
    Eigen::MatrixXd points_;
    Labels labels_;
    std::vector<double> radii_;
};

// ---- logistic regression -------------------------------------------------------

struct LrFit {
    Eigen::VectorXd beta;  // intercept first
    int iterations = 0;
    double gradient_norm = 0;
    bool converged = false;
    bool capped = false;
};

LrFit fit_logistic(const Eigen::MatrixXd& x, const Labels& y, std::span<const std::size_t> rows,
                   const std::vector<std::size_t>& features, double user_weight, bool balanced,
                   const Eigen::VectorXd* start = nullptr);

class LrModel final : public TrainedModel {
public:
    LrModel(ClassifierConfig c, LrFit fit);
    Method method() const override { return Method::Lr; }
    double risk(std::span<const double> row) const override;
    const LrFit& solution() const { return fit_; }
    nlohmann::ordered_json fitted_json() const override;

private:
    LrFit fit_;
};

// ---- naive Bayes -----------------------------------------------------------------

struct NbFeature {
    std::vector<double> levels;      // sorted distinct training values
    std::vector<double> counts[2];   // per-class count of each level
    bool categorical = true;         // at most max_categorical_levels levels
    double mean[2] = {0, 0};         // continuous features only
    double var[2] = {1, 1};
};

struct NbStats {
    std::vector<NbFeature> features;
    double class_count[2] = {0, 0};
};

NbStats nb_statistics(const NbParams& p, const Eigen::MatrixXd& x, const Labels& y, std::span<const std::size_t> rows,
                      const std::vector<std::size_t>& features);
// Statistics of `rows` minus the row `excluded`, derived from the full-row
// statistics by decrementing level counts; equals nb_statistics on the reduced rows.
NbStats nb_statistics_without(const NbStats& full, const NbParams& p, const Eigen::MatrixXd& x, const Labels& y,
                              std::span<const std::size_t> rows, const std::vector<std::size_t>& features,
                              std::size_t excluded);
double nb_risk(const NbStats& s, double user_weight, const Eigen::VectorXd& x);

class NbModel final : public TrainedModel {
public:
    NbModel(ClassifierConfig c, NbStats stats);
    Method method() const override { return Method::Nb; }
    double risk(std::span<const double> row) const override;
    double risk_selected(const Eigen::VectorXd& x) const;
    nlohmann::ordered_json fitted_json() const override;
    const NbStats& stats() const { return stats_; }

private:
    NbStats stats_;
};

// ---- random forest -----------------------------------------------------------------

class RfModel final : public TrainedModel {
public:
    RfModel(ClassifierConfig c, std::vector<std::vector<TreeNode>> trees);
    Method method() const override { return Method::Rf; }
    double risk(std::span<const double> row) const override;
    const std::vector<std::vector<TreeNode>>& trees() const { return trees_; }
    nlohmann::ordered_json fitted_json() const override;

private:
    std::vector<std::vector<TreeNode>> trees_;
};

// Deterministic per-tree generator state from the forest seed.
std::uint64_t tree_seed(std::uint64_t seed, std::uint64_t tree);
std::uint64_t next_random(std::uint64_t& state);
std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t n);

std::vector<std::vector<TreeNode>> grow_forest(const RfParams& params, double user_weight, const Eigen::MatrixXd& x,
                                               const Labels& y, const std::vector<std::size_t>& features,
                                               const BinIndex& index, std::span<const std::size_t> rows);

// ---- model bundles --------------------------------------------------------------------

nlohmann::ordered_json model_to_json(const TrainedModel& m);
std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& m, const std::string& path);
std::unique_ptr<TrainedModel> load_model(const std::string& path);

}  // namespace pleiades
