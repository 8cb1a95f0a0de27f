#include "pleiades/feature_rank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"

namespace pleiades {

RankMethod parse_rank_method(std::string_view token) {
    auto t = csv::lower(token);
    if (t == "pv" || t == "principal_variables") return RankMethod::PrincipalVariables;
    if (t == "dk" || t == "double_kaiser") return RankMethod::DoubleKaiser;
    if (t == "spca" || t == "sparse_pca") return RankMethod::SparsePca;
    throw DomainError("unknown ranking method '" + std::string(token) + "'");
}

std::string_view to_string(RankMethod m) {
    switch (m) {
        case RankMethod::PrincipalVariables: return "pv";
        case RankMethod::DoubleKaiser: return "dk";
        case RankMethod::SparsePca: return "spca";
    }
    return "";
}

namespace {

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& data, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(cols[j]));
    return out;
}

void require_features(const Eigen::MatrixXd& data) {
    if (data.cols() < 2) throw DomainError("feature ranking needs at least two features");
    if (data.rows() < 2) throw DomainError("feature ranking needs at least two rows");
}

}  // namespace

RankReport principal_variables(const Eigen::MatrixXd& data) {
    if (data.cols() < 1 || data.rows() < 2) throw DomainError("principal_variables: need rows and features");
    const Eigen::MatrixXd cov = sample_covariance(data);
    const double total = cov.trace();
    if (!(total > 0)) throw DomainError("principal_variables: all features are constant");
    const auto d = static_cast<std::size_t>(cov.rows());

    RankReport r;
    r.method = RankMethod::PrincipalVariables;
    std::vector<bool> used(d, false);
    for (std::size_t j = 0; j < d; ++j)
        if (cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) <= 0) r.zero_variance.push_back(j);
    auto is_constant = [&](std::size_t j) {
        return std::find(r.zero_variance.begin(), r.zero_variance.end(), j) != r.zero_variance.end();
    };

    Eigen::MatrixXd res = cov;
    const double tiny = 1e-12 * total;
    double cumulative = 0;
    for (std::size_t step = 0; step < d; ++step) {
        std::size_t best = d;
        double best_gain = -1;
        // Constant features only after everything else.
        for (int pass = 0; pass < 2 && best == d; ++pass) {
            for (std::size_t j = 0; j < d; ++j) {
                if (used[j] || is_constant(j) != (pass == 1)) continue;
                const auto jj = static_cast<Eigen::Index>(j);
                const double djj = res(jj, jj);
                const double gain = djj > tiny ? res.col(jj).squaredNorm() / djj : 0.0;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = j;
                }
            }
        }
        used[best] = true;
        const auto bj = static_cast<Eigen::Index>(best);
        const double djj = res(bj, bj);
        if (djj > tiny) {
            Eigen::VectorXd c = res.col(bj);
            res -= c * c.transpose() / djj;
        }
        r.order.push_back(best);
        r.fve.push_back(best_gain / total);
        cumulative += best_gain / total;
        r.cfve.push_back(cumulative);
    }
    return r;
}

RankReport double_kaiser_rank(const Eigen::MatrixXd& data) {
    require_features(data);
    const auto d = static_cast<std::size_t>(data.cols());
    std::vector<std::size_t> current(d);
    std::iota(current.begin(), current.end(), std::size_t{0});

    RankReport r;
    r.method = RankMethod::DoubleKaiser;
    std::vector<double> importance(d, 0.0);

    while (current.size() >= 2) {
        auto p = pca(columns_of(data, current));
        auto pcs = p.informative();
        std::fill(importance.begin(), importance.end(), 0.0);
        if (pcs.empty()) break;
        for (std::size_t k = 0; k < current.size(); ++k) {
            double m = 0;
            for (auto pc : pcs) m = std::max(m, std::fabs(p.components(static_cast<Eigen::Index>(k), pc)));
            importance[current[k]] = m;
        }
        const double cut = 1.0 / std::sqrt(static_cast<double>(current.size()));
        std::size_t worst = current.size();
        for (std::size_t k = 0; k < current.size(); ++k) {
            if (!(importance[current[k]] < cut)) continue;
            if (worst == current.size() || importance[current[k]] < importance[current[worst]]) worst = k;
        }
        if (worst == current.size()) break;
        r.removed.push_back(current[worst]);
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(worst));
    }

    std::vector<std::size_t> kept = current;
    std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    for (auto k : kept) {
        r.order.push_back(k);
        r.importance.push_back(importance[k]);
    }
    for (auto it = r.removed.rbegin(); it != r.removed.rend(); ++it) {
        r.order.push_back(*it);
        r.importance.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return r;
}

namespace {

// Leading unit vector v maximizing v' s v with v supported on `support` and
// orthogonal to every column of `previous`. Returns false if no such vector.
bool constrained_leading(const Eigen::MatrixXd& s, const std::vector<bool>& support, const Eigen::MatrixXd& previous,
                         Eigen::VectorXd& v) {
    const Eigen::Index n = s.rows();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
        if (support[static_cast<std::size_t>(i)]) idx.push_back(i);
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m == 0) return false;

    // Orthonormal basis of {u : previous' E u = 0}, E selecting the support.
    Eigen::MatrixXd basis;
    if (previous.cols() == 0) {
        basis = Eigen::MatrixXd::Identity(m, m);
    } else {
        Eigen::MatrixXd a(previous.cols(), m);
        for (Eigen::Index k = 0; k < m; ++k) a.col(k) = previous.row(idx[static_cast<std::size_t>(k)]).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double tol = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
        Eigen::Index rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > tol;
        if (rank >= m) return false;
        basis = svd.matrixV().rightCols(m - rank);
    }

    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = s(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd reduced = basis.transpose() * sub * basis;
    auto eig = symmetric_eigen(reduced);
    Eigen::VectorXd u = basis * eig.vectors.col(0);
    v = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < m; ++k) v(idx[static_cast<std::size_t>(k)]) = u(k);
    v.normalize();
    canonical_sign(v);
    return true;
}

}  // namespace

RankReport sparse_pca_rank(const Eigen::MatrixXd& data) {
    require_features(data);
    RankReport r;
    r.method = RankMethod::SparsePca;
    std::vector<std::size_t> current(static_cast<std::size_t>(data.cols()));
    std::iota(current.begin(), current.end(), std::size_t{0});

    while (true) {
        SparseStep step;
        step.features = current;
        const Eigen::MatrixXd cov0 = sample_covariance(columns_of(data, current));
        const Eigen::Index n = cov0.rows();
        const double h = cov0.trace() / static_cast<double>(n);
        const double c = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd s = cov0;
        Eigen::MatrixXd found(n, 0);

        for (Eigen::Index comp = 0; comp < n; ++comp) {
            std::vector<bool> support(static_cast<std::size_t>(n), true);
            Eigen::VectorXd v;
            if (!constrained_leading(s, support, found, v)) break;
            if (v.dot(s * v) < h) break;
            while (true) {
                Eigen::Index worst = -1;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (!support[static_cast<std::size_t>(i)]) continue;
                    if (worst < 0 || std::fabs(v(i)) < std::fabs(v(worst))) worst = i;
                }
                if (worst < 0 || !(std::fabs(v(worst)) < c - 1e-12)) break;
                support[static_cast<std::size_t>(worst)] = false;
                Eigen::VectorXd w;
                if (!constrained_leading(s, support, found, w)) break;
                v = w;
            }
            SparseComponent sc;
            sc.loadings = v;
            sc.variance = v.dot(s * v);
            step.components.push_back(sc);
            found.conservativeResize(Eigen::NoChange, found.cols() + 1);
            found.col(found.cols() - 1) = v;
            Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - v * v.transpose();
            s = proj * s * proj;
        }

        std::vector<std::size_t> keep;
        if (!step.components.empty()) {
            for (Eigen::Index i = 0; i < n; ++i) {
                bool zero_everywhere = true;
                for (const auto& sc : step.components) zero_everywhere = zero_everywhere && sc.loadings(i) == 0.0;
                if (zero_everywhere)
                    step.removed.push_back(current[static_cast<std::size_t>(i)]);
                else
                    keep.push_back(current[static_cast<std::size_t>(i)]);
            }
        }
        r.steps.push_back(step);
        if (step.removed.empty()) break;
        for (auto f : step.removed) r.removed.push_back(f);
        current = keep;
        if (current.size() < 2) break;
    }

    r.retained = current;
    r.order = current;
    for (auto it = r.steps.rbegin(); it != r.steps.rend(); ++it)
        for (auto f : it->removed) r.order.push_back(f);
    return r;
}

RankReport rank_features(const Eigen::MatrixXd& data, RankMethod method) {
    switch (method) {
        case RankMethod::PrincipalVariables: return principal_variables(data);
        case RankMethod::DoubleKaiser: return double_kaiser_rank(data);
        case RankMethod::SparsePca: return sparse_pca_rank(data);
    }
    throw DomainError("unknown ranking method");
}

}  // namespace pleiades
