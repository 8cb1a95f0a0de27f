#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"

namespace pleiades {

namespace {

Eigen::MatrixXd class_covariance(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) return Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
    return sample_covariance(rows);
}

}  // namespace

Eigen::VectorXd lda_direction(const Eigen::MatrixXd& users, const Eigen::MatrixXd& nonusers) {
    if (users.rows() == 0 || nonusers.rows() == 0) throw DomainError("lda: both classes must be nonempty");
    Eigen::VectorXd diff = users.colwise().mean().transpose() - nonusers.colwise().mean().transpose();
    if (!(diff.norm() > 0)) throw DomainError("lda: class means coincide, degenerate direction");
    auto f = regularized_cholesky(class_covariance(users) + class_covariance(nonusers));
    Eigen::VectorXd omega = f.llt.solve(diff);
    if (!(omega.norm() > 0) || !omega.allFinite()) throw DomainError("lda: degenerate direction");
    return omega;
}

LdaModel::LdaModel(ClassifierConfig c, Eigen::VectorXd direction, double threshold, bool user_above)
    : TrainedModel(std::move(c)), direction_(std::move(direction)), threshold_(threshold), user_above_(user_above) {}

double LdaModel::risk(std::span<const double> row) const {
    Eigen::VectorXd x = select(row);
    double p = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k) p += direction_(k) * x(k);
    bool above = p > threshold_;
    return above == user_above_ ? 1.0 : 0.0;
}

nlohmann::ordered_json LdaModel::fitted_json() const {
    nlohmann::ordered_json j;
    j["direction"] = std::vector<double>(direction_.data(), direction_.data() + direction_.size());
    if (std::isfinite(threshold_))
        j["threshold"] = threshold_;
    else
        j["threshold"] = threshold_ > 0 ? "inf" : "-inf";
    j["user_above"] = user_above_;
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_lda(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<LdaParams>(c.params);
    std::vector<std::size_t> ur, nr;
    for (auto r : d.rows) (d.y[r] ? ur : nr).push_back(r);
    if (ur.empty() || nr.empty()) throw DomainError("lda: both classes must be nonempty");
    Eigen::MatrixXd users = gather(d.x, ur, c.features);
    Eigen::MatrixXd non = gather(d.x, nr, c.features);
    Eigen::VectorXd omega = lda_direction(users, non);

    std::vector<std::pair<double, std::uint8_t>> proj;
    proj.reserve(d.rows.size());
    for (auto r : d.rows) {
        double s = 0;
        for (std::size_t k = 0; k < c.features.size(); ++k)
            s += omega(static_cast<Eigen::Index>(k)) * d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c.features[k]));
        proj.emplace_back(s, d.y[r]);
    }
    std::sort(proj.begin(), proj.end());

    const double w = c.user_weight;
    const double nu = static_cast<double>(ur.size()), nn = static_cast<double>(nr.size());
    double lu = 0, ln = 0, best = -std::numeric_limits<double>::infinity();
    double threshold = 0, best_lu = 0, best_ln = 0;
    bool found = false;
    for (std::size_t i = 0; i + 1 < proj.size(); ++i) {
        (proj[i].second ? lu : ln) += 1.0;
        if (proj[i].first == proj[i + 1].first) continue;
        Contingency t;
        t.n[1][0] = w * lu;
        t.n[0][0] = ln;
        t.n[1][1] = w * (nu - lu);
        t.n[0][1] = nn - ln;
        double g = split_gain(t, p.criterion);
        if (g > best) {
            best = g;
            double a = proj[i].first, b = proj[i + 1].first;
            threshold = a + (b - a) / 2;
            if (!(threshold < b)) threshold = a;
            best_lu = lu;
            best_ln = ln;
            found = true;
        }
    }
    bool user_above = true;
    if (!found) {
        // All projections equal: label everything by the weighted majority.
        threshold = w * nu >= nn ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    } else {
        const double left = w * best_lu / (w * best_lu + best_ln);
        const double ru = nu - best_lu, rn = nn - best_ln;
        const double right = w * ru / (w * ru + rn);
        user_above = right >= left;
    }
    return std::make_unique<LdaModel>(c, omega, threshold, user_above);
}

}  // namespace detail

}  // namespace pleiades
