#include "pfa/factors.hpp"

#include "pfa/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pfa {

namespace {

constexpr double kRankTol = 1e-10;
constexpr int kMaxIterations = 500;

void check_fit_inputs(const Vector& z_sub, const Matrix& B_sub) {
    const Index m = B_sub.rows();
    const Index k = B_sub.cols();
    if (z_sub.size() != m) {
        throw DimensionMismatchError("z_sub has length " + std::to_string(z_sub.size()) +
                                     " but B_sub has " + std::to_string(m) + " rows");
    }
    if (k < 1 || m < k) {
        throw DimensionMismatchError("factor fit needs m >= k >= 1, got m = " +
                                     std::to_string(m) + ", k = " + std::to_string(k));
    }
    // Singular values via the k x k Gram matrix; cheaper than a full SVD and
    // accurate enough for a rank gate at 1e-10.
    Eigen::SelfAdjointEigenSolver<Matrix> gram(B_sub.transpose() * B_sub);
    const double smallest = std::sqrt(std::max(gram.eigenvalues().minCoeff(), 0.0));
    const double largest = std::sqrt(std::max(gram.eigenvalues().maxCoeff(), 0.0));
    if (!(smallest > kRankTol * largest)) {
        throw RankDeficientError("loading matrix is numerically rank deficient");
    }
}

}  // namespace

IndexSet select_calibration_set(const ZStatistics& z, double fraction) {
    const Index p = z.z.size();
    if (p < 1) {
        throw DimensionMismatchError("z must be nonempty");
    }
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw DomainError("calibration fraction must lie in (0,1], got " +
                          std::to_string(fraction));
    }
    const Index m = static_cast<Index>(std::ceil(fraction * static_cast<double>(p)));

    IndexSet order(p);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double fa = std::abs(z.z[a]);
        const double fb = std::abs(z.z[b]);
        if (fa != fb) return fa < fb;
        return a < b;
    });
    order.resize(m);
    std::sort(order.begin(), order.end());
    return order;
}

double lad_objective(const Vector& z_sub, const Matrix& B_sub, const Vector& w) {
    return (z_sub - B_sub * w).cwiseAbs().sum();
}

RealizedFactors ls_fit(const Vector& z_sub, const Matrix& B_sub) {
    check_fit_inputs(z_sub, B_sub);
    RealizedFactors fit;
    fit.method = FactorFitMethod::LS;
    fit.m_used = B_sub.rows();
    fit.w_hat = B_sub.householderQr().solve(z_sub);
    fit.objective = lad_objective(z_sub, B_sub, fit.w_hat);
    return fit;
}

RealizedFactors lad_fit(const Vector& z_sub, const Matrix& B_sub) {
    check_fit_inputs(z_sub, B_sub);
    const Index m = B_sub.rows();

    Vector w = B_sub.householderQr().solve(z_sub);

    // Each smoothing stage runs reweighted solves until the smoothed
    // objective and the iterate both settle; the stage budget keeps the total
    // under the overall cap even if a stage stalls at machine precision.
    constexpr int kStageCap = 40;
    int iterations = 0;
    Matrix scaled(B_sub.rows(), B_sub.cols());
    Vector rhs(m);
    for (double tau = 1e-2; tau >= 0.5e-10; tau *= 0.1) {
        const double tau_sq = tau * tau;
        auto smoothed = [&](const Vector& candidate) {
            return (z_sub - B_sub * candidate)
                .array()
                .square()
                .unaryExpr([&](double r2) { return std::sqrt(r2 + tau_sq); })
                .sum();
        };
        double prev = smoothed(w);
        for (int stage_iter = 0; stage_iter < kStageCap; ++stage_iter) {
            if (++iterations > kMaxIterations) {
                throw NonConvergenceError("LAD fit hit the iteration cap of " +
                                          std::to_string(kMaxIterations));
            }
            const Vector residual = z_sub - B_sub * w;
            for (Index i = 0; i < m; ++i) {
                // Row scale sqrt(weight) with weight = (r^2 + tau^2)^(-1/2).
                const double s = std::pow(residual[i] * residual[i] + tau_sq, -0.25);
                scaled.row(i) = B_sub.row(i) * s;
                rhs[i] = z_sub[i] * s;
            }
            const Vector next = scaled.householderQr().solve(rhs);
            const double step = (next - w).norm();
            w = next;
            const double now = smoothed(w);
            if (std::abs(prev - now) <= 1e-12 * std::max(1.0, now) ||
                step <= 1e-13 * (1.0 + w.norm())) {
                break;
            }
            prev = now;
        }
    }

    RealizedFactors fit;
    fit.method = FactorFitMethod::LAD;
    fit.m_used = m;
    fit.w_hat = std::move(w);
    fit.objective = lad_objective(z_sub, B_sub, fit.w_hat);
    return fit;
}

}  // namespace pfa
