#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace {

constexpr double kVarianceFloor = 1e-9;

void reset_moments(NbFeature& f) {
    f.mean[0] = f.mean[1] = 0;
    f.var[0] = f.var[1] = 1;
}

// Per-class mean and (n-1) variance over rows, skipping `skip`.
void continuous_moments(NbFeature& f, const Eigen::MatrixXd& x, const Labels& y, std::span<const std::size_t> rows,
                        std::size_t column, std::ptrdiff_t skip) {
    double n[2] = {0, 0}, sum[2] = {0, 0};
    for (auto r : rows) {
        if (static_cast<std::ptrdiff_t>(r) == skip) continue;
        n[y[r]] += 1;
        sum[y[r]] += x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(column));
    }
    for (int c = 0; c < 2; ++c) f.mean[c] = n[c] > 0 ? sum[c] / n[c] : 0.0;
    double ss[2] = {0, 0};
    for (auto r : rows) {
        if (static_cast<std::ptrdiff_t>(r) == skip) continue;
        const double dv = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(column)) - f.mean[y[r]];
        ss[y[r]] += dv * dv;
    }
    for (int c = 0; c < 2; ++c) f.var[c] = std::max(n[c] > 1 ? ss[c] / (n[c] - 1) : 0.0, kVarianceFloor);
}

std::ptrdiff_t level_of(const NbFeature& f, double v) {
    auto it = std::lower_bound(f.levels.begin(), f.levels.end(), v);
    if (it == f.levels.end() || *it != v) return -1;
    return it - f.levels.begin();
}

double log_likelihood(const NbFeature& f, int c, double class_count, double v) {
    if (f.categorical) {
        const auto l = level_of(f, v);
        const double cnt = l >= 0 ? f.counts[c][static_cast<std::size_t>(l)] : 0.0;
        return std::log((cnt + 1.0) / (class_count + static_cast<double>(f.levels.size())));
    }
    const double z = v - f.mean[c];
    return -0.5 * std::log(2.0 * M_PI * f.var[c]) - 0.5 * z * z / f.var[c];
}

}  // namespace

NbStats nb_statistics(const NbParams& p, const Eigen::MatrixXd& x, const Labels& y, std::span<const std::size_t> rows,
                      const std::vector<std::size_t>& features) {
    NbStats s;
    for (auto r : rows) s.class_count[y[r]] += 1;
    for (auto col : features) {
        NbFeature f;
        for (auto r : rows) f.levels.push_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)));
        std::sort(f.levels.begin(), f.levels.end());
        f.levels.erase(std::unique(f.levels.begin(), f.levels.end()), f.levels.end());
        for (int c = 0; c < 2; ++c) f.counts[c].assign(f.levels.size(), 0.0);
        for (auto r : rows) f.counts[y[r]][static_cast<std::size_t>(level_of(f, x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))))] += 1;
        f.categorical = f.levels.size() <= static_cast<std::size_t>(p.max_categorical_levels);
        if (!f.categorical) continuous_moments(f, x, y, rows, col, -1);
        s.features.push_back(std::move(f));
    }
    return s;
}

NbStats nb_statistics_without(const NbStats& full, const NbParams& p, const Eigen::MatrixXd& x, const Labels& y,
                              std::span<const std::size_t> rows, const std::vector<std::size_t>& features,
                              std::size_t excluded) {
    NbStats s = full;
    const int cls = y[excluded];
    s.class_count[cls] -= 1;
    for (std::size_t j = 0; j < features.size(); ++j) {
        NbFeature& f = s.features[j];
        const double v = x(static_cast<Eigen::Index>(excluded), static_cast<Eigen::Index>(features[j]));
        const auto l = static_cast<std::size_t>(level_of(f, v));
        f.counts[cls][l] -= 1;
        if (f.counts[0][l] == 0 && f.counts[1][l] == 0) {
            f.levels.erase(f.levels.begin() + static_cast<std::ptrdiff_t>(l));
            for (int c = 0; c < 2; ++c) f.counts[c].erase(f.counts[c].begin() + static_cast<std::ptrdiff_t>(l));
        }
        f.categorical = f.levels.size() <= static_cast<std::size_t>(p.max_categorical_levels);
        if (f.categorical)
            reset_moments(f);
        else
            continuous_moments(f, x, y, rows, features[j], static_cast<std::ptrdiff_t>(excluded));
    }
    return s;
}

double nb_risk(const NbStats& s, double user_weight, const Eigen::VectorXd& x) {
    double lp[2] = {std::log(s.class_count[0]), std::log(user_weight * s.class_count[1])};
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < s.features.size(); ++j)
            lp[c] += log_likelihood(s.features[j], c, s.class_count[c], x(static_cast<Eigen::Index>(j)));
    if (lp[1] >= lp[0]) return 1.0 / (1.0 + std::exp(lp[0] - lp[1]));
    const double e = std::exp(lp[1] - lp[0]);
    return e / (1.0 + e);
}

NbModel::NbModel(ClassifierConfig c, NbStats stats) : TrainedModel(std::move(c)), stats_(std::move(stats)) {}

double NbModel::risk(std::span<const double> row) const { return risk_selected(select(row)); }

double NbModel::risk_selected(const Eigen::VectorXd& x) const { return nb_risk(stats_, config_.user_weight, x); }

nlohmann::ordered_json NbModel::fitted_json() const {
    nlohmann::ordered_json j;
    j["class_count"] = {stats_.class_count[0], stats_.class_count[1]};
    nlohmann::ordered_json fs = nlohmann::ordered_json::array();
    for (const auto& f : stats_.features) {
        nlohmann::ordered_json e;
        e["categorical"] = f.categorical;
        e["levels"] = f.levels;
        e["counts_nonuser"] = f.counts[0];
        e["counts_user"] = f.counts[1];
        e["mean"] = {f.mean[0], f.mean[1]};
        e["var"] = {f.var[0], f.var[1]};
        fs.push_back(e);
    }
    j["features"] = fs;
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_nb(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<NbParams>(c.params);
    require_both_classes(d.y, d.rows, "nb");
    return std::make_unique<NbModel>(c, nb_statistics(p, d.x, d.y, d.rows, c.features));
}

}  // namespace detail

}  // namespace pleiades
