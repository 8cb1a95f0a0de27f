#include "pleiades/linalg.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "pleiades/error.hpp"

namespace pleiades {

void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::fabs(v(i)) > std::fabs(v(best))) best = i;
    if (v.size() > 0 && v(best) < 0) v = -v;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& input) {
    const Eigen::Index n = input.rows();
    if (input.cols() != n) throw DomainError("symmetric_eigen: matrix is not square");
    Eigen::MatrixXd a = 0.5 * (input + input.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

    const double scale = a.norm();
    for (int sweep = 0; sweep < 100 && scale > 0; ++sweep) {
        double off = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
        out.vectors.col(j).normalize();
        canonical_sign(out.vectors.col(j));
    }
    return out;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw DomainError("covariance needs at least two rows");
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
}

RegularizedFactor regularized_cholesky(const Eigen::MatrixXd& s) {
    const Eigen::Index dim = s.rows();
    double scale = s.trace() / static_cast<double>(dim);
    if (!(scale > 0)) scale = 1.0;
    for (double lambda = 1e-8; lambda <= 1e-2 * 1.0000001; lambda *= 10) {
        RegularizedFactor f;
        f.ridge = lambda * scale;
        Eigen::MatrixXd m = s;
        m.diagonal().array() += f.ridge;
        f.llt.compute(m);
        if (f.llt.info() == Eigen::Success && f.llt.matrixLLT().diagonal().minCoeff() > 0) return f;
    }
    throw NumericError("covariance matrix is singular after regularization");
}

}  // namespace pleiades
