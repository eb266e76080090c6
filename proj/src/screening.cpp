#include "pfa/screening.hpp"

#include "pfa/errors.hpp"

#include <cmath>
#include <string>

namespace pfa {

Matrix sample_correlation(const Matrix& X) {
    const Index n = X.rows();
    const Index p = X.cols();
    Matrix centered = X.rowwise() - X.colwise().mean();
    Vector norms(p);
    for (Index j = 0; j < p; ++j) {
        norms[j] = centered.col(j).norm();
        if (!(norms[j] > 0.0)) {
            throw DegenerateColumnError("column " + std::to_string(j) +
                                        " has zero sample variance");
        }
        centered.col(j) /= norms[j];
    }
    Matrix corr = centered.transpose() * centered;
    // Force exact unit diagonal and symmetry against rounding.
    for (Index i = 0; i < p; ++i) {
        corr(i, i) = 1.0;
        for (Index j = i + 1; j < p; ++j) {
            const double v = 0.5 * (corr(i, j) + corr(j, i));
            corr(i, j) = v;
            corr(j, i) = v;
        }
    }
    (void)n;
    return corr;
}

std::pair<ZStatistics, CorrelationMatrix> marginal_z(const Design& design) {
    const Index n = design.n();
    const Index p = design.p();
    if (n < 3) {
        throw InvalidSpecError("design needs n >= 3, got n = " + std::to_string(n));
    }
    if (design.y.size() != n) {
        throw DimensionMismatchError("response length " + std::to_string(design.y.size()) +
                                     " does not match n = " + std::to_string(n));
    }
    if (!(design.sigma > 0.0)) {
        throw InvalidSpecError("sigma must be positive");
    }

    const Vector y_centered = design.y.array() - design.y.mean();
    ZStatistics stats;
    stats.z.resize(p);
    for (Index j = 0; j < p; ++j) {
        const Vector x_centered = design.X.col(j).array() - design.X.col(j).mean();
        const double sxx = x_centered.squaredNorm();
        if (!(sxx > 0.0)) {
            throw DegenerateColumnError("column " + std::to_string(j) +
                                        " has zero sample variance");
        }
        // beta_hat = sxy/sxx; z = sqrt(n) * sqrt(sxx/n) * beta_hat / sigma
        // collapses to sxy / (sqrt(sxx) * sigma).
        const double sxy = x_centered.dot(y_centered);
        stats.z[j] = sxy / (std::sqrt(sxx) * design.sigma);
    }
    return {std::move(stats), CorrelationMatrix(sample_correlation(design.X))};
}

}  // namespace pfa
