#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "internal.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"

namespace pleiades {

namespace {

constexpr std::uint32_t kNoBin = std::numeric_limits<std::uint32_t>::max();
constexpr double kMinGain = 1e-12;

struct Candidate {
    double gain = kMinGain;
    int feature = -1;  // -2 marks a Fisher split
    double threshold = 0;
    Eigen::VectorXd direction;
    bool found = false;
};

// Plain left-to-right sum so that fitting and prediction agree bit for bit.
double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += a(k) * b(k);
    return s;
}

double midpoint(double a, double b) {
    double m = a + (b - a) / 2;
    return m < b ? m : a;
}

struct Grower {
    const DtParams& params;
    double w;
    const Eigen::MatrixXd& x;
    const Labels& y;
    const std::vector<std::size_t>& features;
    const BinIndex& index;
    std::uint64_t* rng;
    int mtry;

    std::vector<double> hist_u, hist_n;
    std::vector<std::uint32_t> touched;

    Contingency table(double lu, double ln, double nu, double nn) const {
        Contingency t;
        t.n[1][0] = w * lu;
        t.n[0][0] = ln;
        t.n[1][1] = w * (nu - lu);
        t.n[0][1] = nn - ln;
        return t;
    }

    void axis_split(std::size_t k, const std::vector<std::uint32_t>& rows, double nu, double nn, Candidate& best) {
        const auto& bins = index.bins[k];
        const auto& values = index.values[k];
        if (hist_u.size() < values.size()) {
            hist_u.assign(values.size(), 0.0);
            hist_n.assign(values.size(), 0.0);
        }
        touched.clear();
        for (auto r : rows) {
            auto b = bins[r];
            if (hist_u[b] == 0 && hist_n[b] == 0) touched.push_back(b);
            (y[r] ? hist_u[b] : hist_n[b]) += 1.0;
        }
        std::sort(touched.begin(), touched.end());
        const double m = nu + nn;
        double lu = 0, ln = 0;
        for (std::size_t i = 0; i + 1 < touched.size(); ++i) {
            lu += hist_u[touched[i]];
            ln += hist_n[touched[i]];
            if (lu + ln < params.min_leaf) continue;
            if (m - lu - ln < params.min_leaf) break;
            double g = split_gain(table(lu, ln, nu, nn), params.criterion);
            if (g > best.gain) {
                best.gain = g;
                best.feature = static_cast<int>(k);
                best.threshold = midpoint(values[touched[i]], values[touched[i + 1]]);
                best.found = true;
            }
        }
        for (auto b : touched) hist_u[b] = hist_n[b] = 0.0;
    }

    void fisher_split(const std::vector<std::uint32_t>& rows, double nu, double nn, Candidate& best) {
        const auto d = static_cast<Eigen::Index>(features.size());
        if (d < 2 || nu < 1 || nn < 1) return;
        Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
        double cnt[2] = {0, 0};
        auto row_vec = [&](std::uint32_t r) {
            Eigen::VectorXd v(d);
            for (Eigen::Index k = 0; k < d; ++k) v(k) = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(features[static_cast<std::size_t>(k)]));
            return v;
        };
        for (auto r : rows) {
            mean[y[r]] += row_vec(r);
            cnt[y[r]] += 1;
        }
        for (int c = 0; c < 2; ++c) mean[c] /= cnt[c];
        Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
        Eigen::MatrixXd cov[2] = {Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
        for (auto r : rows) {
            Eigen::VectorXd z = row_vec(r) - mean[y[r]];
            cov[y[r]] += z * z.transpose();
        }
        for (int c = 0; c < 2; ++c)
            if (cnt[c] > 1) pooled += cov[c] / (cnt[c] - 1);
        Eigen::VectorXd diff = mean[1] - mean[0];
        if (!(diff.norm() > 0)) return;
        Eigen::VectorXd omega;
        try {
            omega = regularized_cholesky(pooled).llt.solve(diff);
        } catch (const NumericError&) {
            return;
        }
        if (!(omega.norm() > 0) || !omega.allFinite()) return;
        omega.normalize();

        std::vector<std::pair<double, std::uint32_t>> proj;
        proj.reserve(rows.size());
        for (auto r : rows) proj.emplace_back(dot(omega, row_vec(r)), r);
        std::sort(proj.begin(), proj.end());
        const double m = nu + nn;
        double lu = 0, ln = 0;
        for (std::size_t i = 0; i + 1 < proj.size(); ++i) {
            (y[proj[i].second] ? lu : ln) += 1.0;
            if (proj[i].first == proj[i + 1].first) continue;
            if (lu + ln < params.min_leaf) continue;
            if (m - lu - ln < params.min_leaf) break;
            double g = split_gain(table(lu, ln, nu, nn), params.criterion);
            if (g > best.gain) {
                best.gain = g;
                best.feature = -2;
                best.threshold = midpoint(proj[i].first, proj[i + 1].first);
                best.direction = omega;
                best.found = true;
            }
        }
    }

    double project(const TreeNode& node, std::uint32_t r) const {
        if (node.feature >= 0)
            return x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(features[static_cast<std::size_t>(node.feature)]));
        double s = 0;
        for (std::size_t k = 0; k < features.size(); ++k)
            s += node.direction(static_cast<Eigen::Index>(k)) * x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(features[k]));
        return s;
    }

    std::vector<TreeNode> grow(std::vector<std::uint32_t> root_rows) {
        std::vector<TreeNode> nodes;
        struct Work {
            int node;
            std::vector<std::uint32_t> rows;
        };
        std::vector<Work> stack;
        nodes.emplace_back();
        stack.push_back({0, std::move(root_rows)});
        const auto d = features.size();
        std::vector<std::size_t> order(d);

        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();
            double nu = 0, nn = 0;
            for (auto r : work.rows) (y[r] ? nu : nn) += 1.0;
            {
                TreeNode& node = nodes[static_cast<std::size_t>(work.node)];
                node.users = nu;
                node.nonusers = nn;
                node.risk = (w * nu + nn) > 0 ? w * nu / (w * nu + nn) : 0.0;
            }
            if (nu == 0 || nn == 0 || nu + nn < 2.0 * params.min_leaf) continue;

            Candidate best;
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::size_t considered = d;
            if (rng && mtry > 0 && static_cast<std::size_t>(mtry) < d) {
                for (std::size_t i = 0; i < static_cast<std::size_t>(mtry); ++i) {
                    auto j = i + static_cast<std::size_t>(uniform_index(*rng, d - i));
                    std::swap(order[i], order[j]);
                }
                considered = static_cast<std::size_t>(mtry);
                std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(considered));
            }
            for (std::size_t i = 0; i < considered; ++i) axis_split(order[i], work.rows, nu, nn, best);
            if (params.fisher_combination) fisher_split(work.rows, nu, nn, best);
            if (!best.found) continue;

            TreeNode& node = nodes[static_cast<std::size_t>(work.node)];
            node.feature = best.feature >= 0 ? best.feature : -1;
            node.threshold = best.threshold;
            node.gain = best.gain;
            if (best.feature < 0) node.direction = best.direction;

            std::vector<std::uint32_t> left, right;
            for (auto r : work.rows) (project(node, r) <= node.threshold ? left : right).push_back(r);
            const int li = static_cast<int>(nodes.size());
            nodes.emplace_back();
            const int ri = static_cast<int>(nodes.size());
            nodes.emplace_back();
            nodes[static_cast<std::size_t>(work.node)].left = li;
            nodes[static_cast<std::size_t>(work.node)].right = ri;
            stack.push_back({ri, std::move(right)});
            stack.push_back({li, std::move(left)});
        }
        return nodes;
    }
};

}  // namespace

BinIndex BinIndex::build(const Eigen::MatrixXd& x, const std::vector<std::size_t>& features,
                         std::span<const std::size_t> rows) {
    BinIndex idx;
    idx.values.resize(features.size());
    idx.bins.resize(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(features[k]);
        auto& vals = idx.values[k];
        vals.reserve(rows.size());
        for (auto r : rows) vals.push_back(x(static_cast<Eigen::Index>(r), col));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        idx.bins[k].assign(static_cast<std::size_t>(x.rows()), kNoBin);
        for (auto r : rows) {
            double v = x(static_cast<Eigen::Index>(r), col);
            idx.bins[k][r] = static_cast<std::uint32_t>(std::lower_bound(vals.begin(), vals.end(), v) - vals.begin());
        }
    }
    return idx;
}

std::vector<TreeNode> grow_tree(const DtParams& params, double user_weight, const Eigen::MatrixXd& x, const Labels& y,
                                const std::vector<std::size_t>& features, const BinIndex& index,
                                std::vector<std::uint32_t> rows, std::uint64_t* rng_state, int mtry) {
    if (rows.empty()) throw DomainError("dt: no training rows");
    Grower g{params, user_weight, x, y, features, index, rng_state, mtry, {}, {}, {}};
    return g.grow(std::move(rows));
}

namespace detail {

double tree_risk(const std::vector<TreeNode>& nodes, const Eigen::VectorXd& x) {
    std::size_t i = 0;
    while (nodes[i].left >= 0) {
        const auto& n = nodes[i];
        double v = n.feature >= 0 ? x(n.feature) : dot(n.direction, x);
        i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
    }
    return nodes[i].risk;
}

nlohmann::ordered_json tree_to_json(const std::vector<TreeNode>& nodes) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) {
        nlohmann::ordered_json j;
        j["left"] = n.left;
        j["right"] = n.right;
        j["feature"] = n.feature;
        if (n.left >= 0 && n.feature < 0) j["direction"] = std::vector<double>(n.direction.data(), n.direction.data() + n.direction.size());
        j["threshold"] = n.threshold;
        j["risk"] = n.risk;
        j["users"] = n.users;
        j["nonusers"] = n.nonusers;
        j["gain"] = n.gain;
        arr.push_back(j);
    }
    return arr;
}

std::vector<TreeNode> tree_from_json(const nlohmann::json& arr) {
    std::vector<TreeNode> nodes;
    for (const auto& j : arr) {
        TreeNode n;
        n.left = j.at("left").get<int>();
        n.right = j.at("right").get<int>();
        n.feature = j.at("feature").get<int>();
        if (j.contains("direction")) {
            auto v = j.at("direction").get<std::vector<double>>();
            n.direction = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        n.threshold = j.at("threshold").get<double>();
        n.risk = j.at("risk").get<double>();
        n.users = j.value("users", 0.0);
        n.nonusers = j.value("nonusers", 0.0);
        n.gain = j.value("gain", 0.0);
        nodes.push_back(std::move(n));
    }
    if (nodes.empty()) throw DomainError("tree bundle has no nodes");
    return nodes;
}

std::unique_ptr<TrainedModel> fit_dt(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<DtParams>(c.params);
    auto index = BinIndex::build(d.x, c.features, d.rows);
    std::vector<std::uint32_t> rows(d.rows.begin(), d.rows.end());
    return std::make_unique<TreeModel>(c, grow_tree(p, c.user_weight, d.x, d.y, c.features, index, std::move(rows)));
}

}  // namespace detail

TreeModel::TreeModel(ClassifierConfig c, std::vector<TreeNode> nodes) : TrainedModel(std::move(c)), nodes_(std::move(nodes)) {}

double TreeModel::risk(std::span<const double> row) const { return detail::tree_risk(nodes_, select(row)); }
double TreeModel::risk_selected(const Eigen::VectorXd& x) const { return detail::tree_risk(nodes_, x); }

nlohmann::ordered_json TreeModel::fitted_json() const {
    nlohmann::ordered_json j;
    j["nodes"] = detail::tree_to_json(nodes_);
    return j;
}

}  // namespace pleiades
