#include "pfa/spectral.hpp"

#include "pfa/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace pfa {

namespace {
constexpr double kSymmetryTol = 1e-10;
constexpr double kDiagonalTol = 1e-10;
constexpr double kRadicandFloor = 1e-8;
}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix entries) : entries_(std::move(entries)) {
    const Index p = entries_.rows();
    if (p == 0 || entries_.cols() != p) {
        throw DimensionMismatchError("correlation matrix must be square and nonempty");
    }
    for (Index i = 0; i < p; ++i) {
        if (std::abs(entries_(i, i) - 1.0) > kDiagonalTol) {
            throw NotUnitDiagonalError("diagonal entry " + std::to_string(i) + " is " +
                                       std::to_string(entries_(i, i)));
        }
        for (Index j = i + 1; j < p; ++j) {
            if (std::abs(entries_(i, j) - entries_(j, i)) > kSymmetryTol) {
                throw NotSymmetricError("asymmetry at (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
            }
        }
    }
}

Eigendecomposition eigendecompose(const CorrelationMatrix& sigma) {
    const Index p = sigma.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma.matrix());
    if (solver.info() != Eigen::Success) {
        throw IndefiniteError("eigendecomposition failed to converge");
    }

    // Solver returns ascending order; flip to descending.
    Eigendecomposition decomp;
    decomp.values = solver.eigenvalues().reverse();
    decomp.vectors = solver.eigenvectors().rowwise().reverse();

    const double clamp_tol = 1e-8 * static_cast<double>(p);
    for (Index i = 0; i < p; ++i) {
        double& lambda = decomp.values[i];
        if (lambda < 0.0) {
            if (lambda < -clamp_tol) {
                throw IndefiniteError("eigenvalue " + std::to_string(lambda) +
                                      " below tolerance " + std::to_string(-clamp_tol));
            }
            lambda = 0.0;
        }
    }

    // Sign convention: largest-magnitude entry positive, ties to lowest index.
    for (Index j = 0; j < p; ++j) {
        Index arg = 0;
        double best = std::abs(decomp.vectors(0, j));
        for (Index i = 1; i < p; ++i) {
            const double a = std::abs(decomp.vectors(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (decomp.vectors(arg, j) < 0.0) decomp.vectors.col(j) = -decomp.vectors.col(j);
    }
    return decomp;
}

int select_num_factors(const Vector& eigenvalues, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw InvalidEpsilonError("epsilon must lie in (0,1), got " + std::to_string(epsilon));
    }
    const Index p = eigenvalues.size();
    const double total = eigenvalues.sum();

    // Tail sums of squares, accumulated back to front so each candidate k is
    // a single lookup.
    Vector tail_sq(p + 1);
    tail_sq[p] = 0.0;
    for (Index i = p - 1; i >= 0; --i) {
        tail_sq[i] = tail_sq[i + 1] + eigenvalues[i] * eigenvalues[i];
    }
    for (Index k = 0; k <= p; ++k) {
        if (std::sqrt(tail_sq[k]) < epsilon * total) return static_cast<int>(k);
    }
    return static_cast<int>(p);
}

SpectralModel build_factor_model(const CorrelationMatrix& sigma, double epsilon,
                                 std::optional<int> k_override) {
    Eigendecomposition decomp = eigendecompose(sigma);
    const Index p = sigma.dim();

    int k;
    if (k_override) {
        k = *k_override;
        if (k < 0 || k > p) {
            throw DomainError("k_override must lie in [0, p], got " + std::to_string(k));
        }
    } else {
        k = select_num_factors(decomp.values, epsilon);
    }

    SpectralModel model;
    model.eigenvalues = std::move(decomp.values);
    model.eigenvectors = std::move(decomp.vectors);
    model.k = k;
    model.loadings.resize(p, k);
    for (int h = 0; h < k; ++h) {
        model.loadings.col(h) = std::sqrt(model.eigenvalues[h]) * model.eigenvectors.col(h);
    }
    model.standardizers.resize(p);
    for (Index i = 0; i < p; ++i) {
        const double radicand = 1.0 - model.loadings.row(i).squaredNorm();
        model.standardizers[i] = 1.0 / std::sqrt(std::max(radicand, kRadicandFloor));
    }
    return model;
}

}  // namespace pfa
