#include <cmath>

#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kGradientTolerance = 1e-11;
constexpr double kNormCap = 1e3;

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

struct Problem {
    Eigen::MatrixXd z;  // intercept column then features
    Eigen::VectorXd target;
    Eigen::VectorXd weight;  // normalized to sum 1

    double loss(const Eigen::VectorXd& b) const {
        Eigen::VectorXd eta = z * b;
        double s = 0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) s += weight(i) * (softplus(eta(i)) - target(i) * eta(i));
        return s;
    }

    double gradient_norm(const Eigen::VectorXd& b) const {
        Eigen::VectorXd eta = z * b;
        Eigen::VectorXd resid(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) resid(i) = weight(i) * (sigmoid(eta(i)) - target(i));
        return (z.transpose() * resid).cwiseAbs().maxCoeff();
    }
};

}  // namespace

LrFit fit_logistic(const Eigen::MatrixXd& x, const Labels& y, std::span<const std::size_t> rows,
                   const std::vector<std::size_t>& features, double user_weight, bool balanced,
                   const Eigen::VectorXd* start) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(features.size());
    Problem pr;
    pr.z.resize(n, d + 1);
    pr.target.resize(n);
    pr.weight.resize(n);
    double count[2] = {0, 0};
    for (auto r : rows) count[y[r]] += 1;
    if (n == 0) throw DomainError("lr: no training rows");
    if (count[0] == 0 || count[1] == 0) {
        // The likelihood has no maximum; return the capped intercept-only limit.
        LrFit f;
        f.beta = Eigen::VectorXd::Zero(d + 1);
        f.beta(0) = count[1] > 0 ? kNormCap : -kNormCap;
        f.capped = true;
        return f;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = rows[static_cast<std::size_t>(i)];
        pr.z(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) pr.z(i, j + 1) = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(features[static_cast<std::size_t>(j)]));
        pr.target(i) = y[r];
        double w = y[r] ? user_weight : 1.0;
        if (balanced) w *= static_cast<double>(n) / (2.0 * count[y[r]]);
        pr.weight(i) = w;
    }
    pr.weight /= pr.weight.sum();

    LrFit f;
    f.beta = start && start->size() == d + 1 ? *start : Eigen::VectorXd::Zero(d + 1);
    double current = pr.loss(f.beta);
    for (f.iterations = 0; f.iterations < kMaxIterations; ++f.iterations) {
        Eigen::VectorXd eta = pr.z * f.beta;
        Eigen::VectorXd resid(n), curv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(eta(i));
            resid(i) = pr.weight(i) * (p - pr.target(i));
            curv(i) = pr.weight(i) * p * (1.0 - p);
        }
        Eigen::VectorXd grad = pr.z.transpose() * resid;
        f.gradient_norm = grad.cwiseAbs().maxCoeff();
        if (f.gradient_norm < kGradientTolerance) {
            f.converged = true;
            break;
        }
        Eigen::MatrixXd hess = pr.z.transpose() * curv.asDiagonal() * pr.z;
        hess.diagonal().array() += 1e-12 * std::max(1.0, hess.trace() / static_cast<double>(d + 1));
        Eigen::VectorXd step = hess.ldlt().solve(grad);
        if (!step.allFinite()) step = grad;
        double t = 1.0;
        Eigen::VectorXd next = f.beta - step;
        double next_loss = pr.loss(next);
        // Near the optimum loss changes drop below rounding; accept a full
        // Newton step there when it shrinks the gradient.
        if (!(next_loss <= current) && next_loss - current <= 1e-15 * std::abs(current) &&
            pr.gradient_norm(next) < f.gradient_norm)
            next_loss = current;
        for (int h = 0; h < 40 && !(next_loss <= current); ++h) {
            t *= 0.5;
            next = f.beta - t * step;
            next_loss = pr.loss(next);
        }
        if (!(next_loss <= current)) break;
        f.beta = next;
        current = next_loss;
        if (f.beta.norm() > kNormCap) {
            f.beta *= kNormCap / f.beta.norm();
            f.capped = true;
            ++f.iterations;
            break;
        }
    }
    return f;
}

LrModel::LrModel(ClassifierConfig c, LrFit fit) : TrainedModel(std::move(c)), fit_(std::move(fit)) {}

double LrModel::risk(std::span<const double> row) const {
    const Eigen::VectorXd x = select(row);
    double eta = fit_.beta(0);
    for (Eigen::Index j = 0; j < x.size(); ++j) eta += fit_.beta(j + 1) * x(j);
    return sigmoid(eta);
}

nlohmann::ordered_json LrModel::fitted_json() const {
    nlohmann::ordered_json j;
    j["beta"] = std::vector<double>(fit_.beta.data(), fit_.beta.data() + fit_.beta.size());
    j["iterations"] = fit_.iterations;
    j["gradient_norm"] = fit_.gradient_norm;
    j["converged"] = fit_.converged;
    j["capped"] = fit_.capped;
    return j;
}

namespace detail {

std::unique_ptr<TrainedModel> fit_lr(const ClassifierConfig& c, const TrainingView& d) {
    const auto& p = std::get<LrParams>(c.params);
    return std::make_unique<LrModel>(c, fit_logistic(d.x, d.y, d.rows, c.features, c.user_weight, p.balanced));
}

}  // namespace detail

}  // namespace pleiades
