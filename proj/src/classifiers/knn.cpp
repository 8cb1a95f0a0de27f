#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"

namespace pleiades {

namespace {

struct Neighbour {
    double dist;  // Euclidean
    std::size_t index;
    double metric = 0;  // distance used for the final selection
};

double euclid(const Eigen::MatrixXd& pts, std::size_t i, const Eigen::VectorXd& x) {
    double s = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double d = pts(static_cast<Eigen::Index>(i), k) - x(k);
        s += d * d;
    }
    return std::sqrt(s);
}

bool by_euclid(const Neighbour& a, const Neighbour& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
}

bool by_metric(const Neighbour& a, const Neighbour& b) {
    if (a.metric != b.metric) return a.metric < b.metric;
    return by_euclid(a, b);
}

// Kernel weights of distances relative to the largest one.
std::vector<double> kernel_weights(Kernel k, const std::vector<double>& d) {
    double dmax = 0;
    for (double v : d) dmax = std::max(dmax, v);
    std::vector<double> w(d.size());
    bool any = false;
    for (std::size_t i = 0; i < d.size(); ++i) {
        w[i] = kernel_profile(k, dmax > 0 ? d[i] / dmax : 0.0);
        any = any || w[i] > 0;
    }
    if (!any) std::fill(w.begin(), w.end(), 1.0);
    return w;
}

struct ClassMoments {
    Eigen::VectorXd mean[2];
    Eigen::MatrixXd cov[2];
    double weight[2] = {0, 0};
};

ClassMoments moments(const Eigen::MatrixXd& pts, const Labels& labels, const std::vector<Neighbour>& hood,
                     const std::vector<double>& w) {
    const Eigen::Index d = pts.cols();
    ClassMoments m;
    for (int c = 0; c < 2; ++c) {
        m.mean[c] = Eigen::VectorXd::Zero(d);
        m.cov[c] = Eigen::MatrixXd::Zero(d, d);
    }
    for (std::size_t i = 0; i < hood.size(); ++i) {
        int c = labels[hood[i].index];
        m.weight[c] += w[i];
        m.mean[c] += w[i] * pts.row(static_cast<Eigen::Index>(hood[i].index)).transpose();
    }
    for (int c = 0; c < 2; ++c)
        if (m.weight[c] > 0) m.mean[c] /= m.weight[c];
    for (std::size_t i = 0; i < hood.size(); ++i) {
        int c = labels[hood[i].index];
        Eigen::VectorXd z = pts.row(static_cast<Eigen::Index>(hood[i].index)).transpose() - m.mean[c];
        m.cov[c] += w[i] * z * z.transpose();
    }
    for (int c = 0; c < 2; ++c)
        if (m.weight[c] > 0) m.cov[c] /= m.weight[c];
    return m;
}

}  // namespace

KnnModel::KnnModel(ClassifierConfig c, Eigen::MatrixXd points, Labels labels)
    : TrainedModel(std::move(c)), points_(std::move(points)), labels_(std::move(labels)) {}

double KnnModel::risk(std::span<const double> row) const { return risk_excluding(select(row), -1); }

double KnnModel::risk_excluding(const Eigen::VectorXd& x, std::ptrdiff_t excluded) const {
    const auto& prm = p();
    const std::size_t n = static_cast<std::size_t>(points_.rows());
    const std::size_t available = n - (excluded >= 0 ? 1 : 0);
    const std::size_t k = static_cast<std::size_t>(prm.k);
    const std::size_t kf = prm.distance == Distance::Euclidean ? k : static_cast<std::size_t>(prm.k_transform);
    if (kf > available) throw DomainError("knn: neighbourhood size exceeds the training set");

    std::vector<Neighbour> all;
    all.reserve(available);
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::ptrdiff_t>(i) == excluded) continue;
        all.push_back({euclid(points_, i, x), i});
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kf), all.end(), by_euclid);
    all.resize(kf);

    std::vector<Neighbour>& hood = all;
    if (prm.distance != Distance::Euclidean) {
        std::vector<double> ed;
        for (const auto& h : hood) ed.push_back(h.dist);
        auto tw = kernel_weights(prm.transform_kernel, ed);
        auto m = moments(points_, labels_, hood, tw);
        const Eigen::Index d = points_.cols();
        bool transformed = false;

        if (prm.distance == Distance::Fisher) {
            if (m.weight[0] > 0 && m.weight[1] > 0) {
                Eigen::VectorXd diff = m.mean[1] - m.mean[0];
                if (diff.norm() > 0) {
                    try {
                        auto f = regularized_cholesky(m.cov[0] + m.cov[1]);
                        Eigen::VectorXd omega = f.llt.solve(diff);
                        if (omega.norm() > 0 && omega.allFinite()) {
                            omega.normalize();
                            for (auto& h : hood)
                                h.metric = std::fabs(omega.dot(points_.row(static_cast<Eigen::Index>(h.index)).transpose() - x));
                            transformed = true;
                        }
                    } catch (const NumericError&) {
                    }
                }
            }
        } else {
            // One DANN step: sphere by the within-class covariance, then
            // stretch along the between-class directions (epsilon = 1).
            const double total = m.weight[0] + m.weight[1];
            Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d, d);
            Eigen::VectorXd grand = Eigen::VectorXd::Zero(d);
            for (int c = 0; c < 2; ++c) {
                if (m.weight[c] <= 0) continue;
                within += (m.weight[c] / total) * m.cov[c];
                grand += (m.weight[c] / total) * m.mean[c];
            }
            Eigen::MatrixXd between = Eigen::MatrixXd::Zero(d, d);
            for (int c = 0; c < 2; ++c) {
                if (m.weight[c] <= 0) continue;
                Eigen::VectorXd z = m.mean[c] - grand;
                between += (m.weight[c] / total) * z * z.transpose();
            }
            auto eig = symmetric_eigen(within);
            double floor = 1e-8 * std::max(within.trace() / static_cast<double>(d), 1e-300);
            if (!(floor > 0)) floor = 1e-8;
            Eigen::VectorXd inv_sqrt = eig.values.cwiseMax(floor).cwiseSqrt().cwiseInverse();
            Eigen::MatrixXd w_half = eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose();
            Eigen::MatrixXd bstar = w_half * between * w_half;
            Eigen::MatrixXd metric = w_half * (bstar + Eigen::MatrixXd::Identity(d, d)) * w_half;
            for (auto& h : hood) {
                Eigen::VectorXd z = points_.row(static_cast<Eigen::Index>(h.index)).transpose() - x;
                h.metric = std::sqrt(std::max(0.0, z.dot(metric * z)));
            }
            transformed = true;
        }
        if (!transformed)
            for (auto& h : hood) h.metric = h.dist;
        std::sort(hood.begin(), hood.end(), by_metric);
        hood.resize(k);
    } else {
        for (auto& h : hood) h.metric = h.dist;
    }

    std::vector<double> md;
    for (const auto& h : hood) md.push_back(h.metric);
    auto w = kernel_weights(prm.vote_kernel, md);
    double mu = 0, mn = 0;
    for (std::size_t i = 0; i < hood.size(); ++i) (labels_[hood[i].index] ? mu : mn) += w[i];
    const double wu = config_.user_weight * mu;
    return wu / (wu + mn);
}

nlohmann::ordered_json KnnModel::fitted_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < points_.cols(); ++c) r.push_back(points_(i, c));
        pts.push_back(r);
    }
    j["points"] = pts;
    j["labels"] = labels_;
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_knn(const ClassifierConfig& c, const TrainingView& d) {
    auto cfg = c;
    auto& p = std::get<KnnParams>(cfg.params);
    if (p.distance == Distance::Euclidean) p.k_transform = p.k;
    const std::size_t kf = static_cast<std::size_t>(std::max(p.k, p.k_transform));
    if (kf > d.rows.size()) throw DomainError("knn: neighbourhood size exceeds the training set");
    return std::make_unique<KnnModel>(cfg, gather(d.x, d.rows, c.features), gather_labels(d.y, d.rows));
}

}  // namespace detail

}  // namespace pleiades
