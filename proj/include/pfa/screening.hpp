#pragma once

#include "pfa/spectral.hpp"
#include "pfa/types.hpp"

#include <utility>

namespace pfa {

/// Raw design matrix, response, and known noise standard deviation.
struct Design {
    Matrix X;      // n x p
    Vector y;      // length n
    double sigma;  // > 0

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
};

/// Column-wise sample correlation of X (standard-deviation divisor n; the
/// divisor cancels in the ratio). Throws DegenerateColumnError on any
/// zero-variance column.
Matrix sample_correlation(const Matrix& X);

/// Marginal simple regressions of y on each column of X (intercept included):
/// z_j = sqrt(n) * s_jj * beta_hat_j / sigma with s_jj the divisor-n sample
/// standard deviation of column j. The returned correlation matrix is the
/// sample correlation of the columns of X, which is the exact covariance of
/// the z vector conditional on X.
std::pair<ZStatistics, CorrelationMatrix> marginal_z(const Design& design);

}  // namespace pfa
