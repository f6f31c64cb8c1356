#pragma once

// Test-only reference computations backed by Eigen. Nothing here shares code
// with the ringres implementation it is used to check.

#include <ringres/linalg.hpp>

#include <Eigen/Dense>

namespace oracle {

inline Eigen::MatrixXd to_eigen(const ringres::Matrix& m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline ringres::Matrix from_eigen(const Eigen::MatrixXd& e)
{
    ringres::Matrix m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

inline double largest_singular_value(const ringres::Matrix& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
    return svd.singularValues()(0);
}

/// (XᵀX + λI)⁻¹ XᵀY with an explicit inverse.
inline ringres::Matrix ridge_direct_inverse(const ringres::Matrix& x, const ringres::Matrix& y, double lambda)
{
    const Eigen::MatrixXd X = to_eigen(x), Y = to_eigen(y);
    const Eigen::MatrixXd g =
      X.transpose() * X + lambda * Eigen::MatrixXd::Identity(X.cols(), X.cols());
    return from_eigen(g.inverse() * X.transpose() * Y);
}

inline ringres::Matrix exact_solve(const ringres::Matrix& a, const ringres::Matrix& b)
{
    return from_eigen(to_eigen(a).fullPivLu().solve(to_eigen(b)));
}

/// ‖(XᵀX + λI)W − XᵀY‖ / ‖XᵀY‖
inline double normal_equation_residual(const ringres::Matrix& x, const ringres::Matrix& y,
                                       const ringres::Matrix& w, double lambda)
{
    const Eigen::MatrixXd X = to_eigen(x), Y = to_eigen(y), W = to_eigen(w);
    const Eigen::MatrixXd rhs = X.transpose() * Y;
    const Eigen::MatrixXd lhs = (X.transpose() * X) * W + lambda * W;
    return (lhs - rhs).norm() / rhs.norm();
}

} // namespace oracle
