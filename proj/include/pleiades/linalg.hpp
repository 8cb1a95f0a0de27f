#pragma once

#include <Eigen/Dense>

namespace pleiades {

struct SymmetricEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // column j pairs with values(j)
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Equal eigenvalues
// keep their diagonal order; each vector is signed so that its
// largest-magnitude coordinate is positive.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

// Column means removed, n - 1 denominator.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x);

// Flips v so that its largest-magnitude coordinate is positive.
void canonical_sign(Eigen::Ref<Eigen::VectorXd> v);

struct RegularizedFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double ridge = 0;  // absolute amount added to the diagonal
};

// Cholesky of s + lambda * trace(s)/dim * I, lambda = 1e-8 escalating by 10x up
// to 1e-2. Throws NumericError if none of these factorizations succeed.
RegularizedFactor regularized_cholesky(const Eigen::MatrixXd& s);

}  // namespace pleiades
