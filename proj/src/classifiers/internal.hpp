#pragma once

#include <memory>

#include "pleiades/classifiers.hpp"

namespace pleiades::detail {

// Rows x selected features.
Eigen::MatrixXd gather(const Eigen::MatrixXd& x, std::span<const std::size_t> rows,
                       const std::vector<std::size_t>& features);
Labels gather_labels(const Labels& y, std::span<const std::size_t> rows);
void require_both_classes(const Labels& y, std::span<const std::size_t> rows, const char* who);

std::unique_ptr<TrainedModel> fit_knn(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_dt(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_lda(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_gm(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_pdfe(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_lr(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_nb(const ClassifierConfig& c, const TrainingView& d);
std::unique_ptr<TrainedModel> fit_rf(const ClassifierConfig& c, const TrainingView& d);

nlohmann::ordered_json tree_to_json(const std::vector<TreeNode>& nodes);
std::vector<TreeNode> tree_from_json(const nlohmann::json& j);
// Class from a stored (already regularized) covariance.
GaussianClass gaussian_class_from(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double prior);

double tree_risk(const std::vector<TreeNode>& nodes, const Eigen::VectorXd& x);

}  // namespace pleiades::detail
