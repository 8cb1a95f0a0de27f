#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace {

double distance(const Eigen::MatrixXd& pts, std::size_t i, const Eigen::VectorXd& x) {
    double s = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double d = pts(static_cast<Eigen::Index>(i), k) - x(k);
        s += d * d;
    }
    return std::sqrt(s);
}

double log_unit_ball_volume(int d) {
    return 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d + 1.0);
}

// log of sum(exp(v)) over finite entries; -inf when there are none.
double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

double log_kernel_density(Kernel k, int dim, double dist, double radius) {
    const double u = dist / radius;
    const double d = dim;
    double log_norm = 0;
    switch (k) {
        case Kernel::Gaussian: log_norm = -0.5 * d * std::log(2.0 * M_PI); break;
        case Kernel::Uniform: log_norm = -log_unit_ball_volume(dim); break;
        case Kernel::Epanechnikov: log_norm = std::log((d + 2.0) / 2.0) - log_unit_ball_volume(dim); break;
        case Kernel::Triangular: log_norm = std::log(d + 1.0) - log_unit_ball_volume(dim); break;
    }
    if (k == Kernel::Gaussian) return log_norm - d * std::log(radius) - 0.5 * u * u;
    const double prof = kernel_profile(k, u);
    if (!(prof > 0)) return -std::numeric_limits<double>::infinity();
    return log_norm - d * std::log(radius) + std::log(prof);
}

PdfeModel::PdfeModel(ClassifierConfig c, Eigen::MatrixXd points, Labels labels, std::vector<double> radii)
    : TrainedModel(std::move(c)), points_(std::move(points)), labels_(std::move(labels)), radii_(std::move(radii)) {}

double PdfeModel::risk(std::span<const double> row) const { return risk_selected(select(row)); }

double PdfeModel::risk_selected(const Eigen::VectorXd& x) const {
    return risk_with(std::get<PdfeParams>(config_.params), config_.user_weight, points_, labels_, radii_, x, -1);
}

double PdfeModel::risk_with(const PdfeParams& p, double weight, const Eigen::MatrixXd& points, const Labels& labels,
                            const std::vector<double>& radii, const Eigen::VectorXd& x, std::ptrdiff_t excluded,
                            bool* fell_back) {
    const int dim = static_cast<int>(x.size());
    std::vector<double> terms[2];
    double count[2] = {0, 0};
    for (std::size_t t = 0; t < static_cast<std::size_t>(points.rows()); ++t) {
        if (static_cast<std::ptrdiff_t>(t) == excluded) continue;
        count[labels[t]] += 1;
        terms[labels[t]].push_back(log_kernel_density(p.kernel, dim, distance(points, t, x), radii[t]));
    }
    // Class density f_c = (1/N) sum K; the 1/N factor cancels in the ratio.
    const double lu = log_sum_exp(terms[1]);
    const double ln = log_sum_exp(terms[0]);
    if (fell_back) *fell_back = false;
    if (!std::isfinite(lu) && !std::isfinite(ln)) {
        if (fell_back) *fell_back = true;
        const double wu = weight * count[1];
        return wu / (wu + count[0]);
    }
    if (!std::isfinite(lu)) return 0.0;
    if (!std::isfinite(ln)) return 1.0;
    const double a = std::log(weight) + lu;
    if (a >= ln) return 1.0 / (1.0 + std::exp(ln - a));
    const double e = std::exp(a - ln);
    return e / (1.0 + e);
}

nlohmann::ordered_json PdfeModel::fitted_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < points_.cols(); ++c) r.push_back(points_(i, c));
        pts.push_back(r);
    }
    j["points"] = pts;
    j["labels"] = labels_;
    j["radii"] = radii_;
    return j;
}

std::vector<double> pdfe_radii(const Eigen::MatrixXd& pts, int k) {
    const auto n = static_cast<std::size_t>(pts.rows());
    if (static_cast<std::size_t>(k) >= n) throw DomainError("pdfe: k_density must be below the training size");
    std::vector<double> radii(n);
    std::vector<double> d;
    for (std::size_t t = 0; t < n; ++t) {
        d.clear();
        Eigen::VectorXd xt = pts.row(static_cast<Eigen::Index>(t)).transpose();
        for (std::size_t s = 0; s < n; ++s)
            if (s != t) d.push_back(distance(pts, s, xt));
        std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
        radii[t] = std::max(d[static_cast<std::size_t>(k - 1)], 1e-9);
    }
    return radii;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_pdfe(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<PdfeParams>(c.params);
    require_both_classes(d.y, d.rows, "pdfe");
    Eigen::MatrixXd pts = gather(d.x, d.rows, c.features);
    auto radii = pdfe_radii(pts, p.k_density);
    return std::make_unique<PdfeModel>(c, std::move(pts), gather_labels(d.y, d.rows), std::move(radii));
}

}  // namespace detail

}  // namespace pleiades
