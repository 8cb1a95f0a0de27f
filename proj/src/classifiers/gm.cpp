#include <cmath>

#include "internal.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"

namespace pleiades {

namespace {

double logistic_of_difference(double lu, double ln) {
    if (lu >= ln) return 1.0 / (1.0 + std::exp(ln - lu));
    const double e = std::exp(lu - ln);
    return e / (1.0 + e);
}

nlohmann::ordered_json class_json(const GaussianClass& g) {
    nlohmann::ordered_json j;
    j["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
    nlohmann::ordered_json cov = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < g.covariance.rows(); ++i) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (Eigen::Index k = 0; k < g.covariance.cols(); ++k) r.push_back(g.covariance(i, k));
        cov.push_back(r);
    }
    j["covariance"] = cov;
    j["prior"] = g.prior;
    return j;
}

}  // namespace

GaussianClass fit_gaussian_class(const Eigen::MatrixXd& rows, double prior) {
    if (rows.rows() == 0) throw DomainError("gm: empty class");
    GaussianClass g;
    g.mean = rows.colwise().mean().transpose();
    Eigen::MatrixXd cov = rows.rows() >= 2 ? sample_covariance(rows) : Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
    auto f = regularized_cholesky(cov);
    cov.diagonal().array() += f.ridge;
    g.covariance = cov;
    Eigen::MatrixXd l = f.llt.matrixL();
    g.inverse_factor = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(l.rows(), l.cols()));
    g.log_det = 2.0 * l.diagonal().array().log().sum();
    g.prior = prior;
    return g;
}

namespace detail {

GaussianClass gaussian_class_from(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double prior) {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericError("gm: stored covariance is not positive definite");
    GaussianClass g;
    g.mean = std::move(mean);
    g.covariance = std::move(covariance);
    Eigen::MatrixXd l = llt.matrixL();
    g.inverse_factor = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(l.rows(), l.cols()));
    g.log_det = 2.0 * l.diagonal().array().log().sum();
    g.prior = prior;
    return g;
}

}  // namespace detail

double gaussian_log_density(const GaussianClass& g, const Eigen::VectorXd& x) {
    const double k = static_cast<double>(x.size());
    Eigen::VectorXd z = g.inverse_factor * (x - g.mean);
    return -0.5 * k * std::log(2.0 * M_PI) - 0.5 * g.log_det - 0.5 * z.squaredNorm();
}

GmModel::GmModel(ClassifierConfig c, GaussianClass user, GaussianClass non)
    : TrainedModel(std::move(c)), user_(std::move(user)), non_(std::move(non)) {}

double GmModel::risk(std::span<const double> row) const { return risk_selected(select(row)); }

double GmModel::risk_selected(const Eigen::VectorXd& x) const {
    const double lu = std::log(user_.prior) + gaussian_log_density(user_, x);
    const double ln = std::log(non_.prior) + gaussian_log_density(non_, x);
    return logistic_of_difference(lu, ln);
}

nlohmann::ordered_json GmModel::fitted_json() const {
    nlohmann::ordered_json j;
    j["user"] = class_json(user_);
    j["nonuser"] = class_json(non_);
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_gm(const ClassifierConfig& c, const TrainingView& d) {
    std::vector<std::size_t> ur, nr;
    for (auto r : d.rows) (d.y[r] ? ur : nr).push_back(r);
    if (ur.empty() || nr.empty()) throw DomainError("gm: both classes must be nonempty");
    const double wu = c.user_weight * static_cast<double>(ur.size());
    const double nn = static_cast<double>(nr.size());
    auto user = fit_gaussian_class(gather(d.x, ur, c.features), wu / (wu + nn));
    auto non = fit_gaussian_class(gather(d.x, nr, c.features), nn / (wu + nn));
    return std::make_unique<GmModel>(c, std::move(user), std::move(non));
}

}  // namespace detail

}  // namespace pleiades
