#include <cmath>

#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

std::uint64_t tree_seed(std::uint64_t seed, std::uint64_t tree) { return seed + 0x9E3779B97F4A7C15ULL * (tree + 1); }

// splitmix64
std::uint64_t next_random(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Lemire's multiply-shift with rejection; uniform on [0, n).
std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index: empty range");
    unsigned __int128 m = static_cast<unsigned __int128>(next_random(state)) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t t = (0 - n) % n;
        while (low < t) {
            m = static_cast<unsigned __int128>(next_random(state)) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::vector<TreeNode>> grow_forest(const RfParams& params, double user_weight, const Eigen::MatrixXd& x,
                                               const Labels& y, const std::vector<std::size_t>& features,
                                               const BinIndex& index, std::span<const std::size_t> rows) {
    if (params.trees < 1) throw DomainError("rf: need at least one tree");
    const int mtry = params.mtry > 0 ? params.mtry
                                     : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(features.size()))));
    std::vector<std::vector<TreeNode>> trees;
    trees.reserve(static_cast<std::size_t>(params.trees));
    for (int t = 0; t < params.trees; ++t) {
        std::uint64_t state = tree_seed(params.seed, static_cast<std::uint64_t>(t));
        std::vector<std::uint32_t> sample(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            sample[i] = static_cast<std::uint32_t>(params.bootstrap ? rows[uniform_index(state, rows.size())] : rows[i]);
        trees.push_back(grow_tree(params.tree, user_weight, x, y, features, index, std::move(sample), &state, mtry));
    }
    return trees;
}

RfModel::RfModel(ClassifierConfig c, std::vector<std::vector<TreeNode>> trees)
    : TrainedModel(std::move(c)), trees_(std::move(trees)) {}

double RfModel::risk(std::span<const double> row) const {
    const Eigen::VectorXd x = select(row);
    double s = 0;
    for (const auto& t : trees_) s += detail::tree_risk(t, x);
    return s / static_cast<double>(trees_.size());
}

nlohmann::ordered_json RfModel::fitted_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : trees_) arr.push_back(detail::tree_to_json(t));
    j["trees"] = arr;
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_rf(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<RfParams>(c.params);
    auto index = BinIndex::build(d.x, c.features, d.rows);
    return std::make_unique<RfModel>(c, grow_forest(p, c.user_weight, d.x, d.y, c.features, index, d.rows));
}

}  // namespace detail

}  // namespace pleiades
