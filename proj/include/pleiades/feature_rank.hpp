#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "pleiades/quantify.hpp"

namespace pleiades {

enum class RankMethod { PrincipalVariables, DoubleKaiser, SparsePca };
RankMethod parse_rank_method(std::string_view token);
std::string_view to_string(RankMethod m);

struct SparseComponent {
    Eigen::VectorXd loadings;  // over the features of that step, zeros exact
    double variance = 0;
};

struct SparseStep {
    std::vector<std::size_t> features;  // indices into the input matrix
    std::vector<SparseComponent> components;
    std::vector<std::size_t> removed;  // trivial features dropped after this step
};

struct RankReport {
    RankMethod method = RankMethod::PrincipalVariables;
    std::vector<std::size_t> order;  // best to worst, indices into the input
    std::vector<double> fve;          // principal variables: marginal fraction per pick
    std::vector<double> cfve;
    std::vector<double> importance;   // double Kaiser: final importance per order entry, NaN if removed
    std::vector<std::size_t> removed;  // removal sequence (double Kaiser, sparse PCA)
    std::vector<std::size_t> retained;  // sparse PCA final feature set
    std::vector<SparseStep> steps;      // sparse PCA removal waves
    std::vector<std::size_t> zero_variance;  // principal variables: constant features
};

RankReport principal_variables(const Eigen::MatrixXd& data);
RankReport double_kaiser_rank(const Eigen::MatrixXd& data);
RankReport sparse_pca_rank(const Eigen::MatrixXd& data);
RankReport rank_features(const Eigen::MatrixXd& data, RankMethod method);

}  // namespace pleiades
