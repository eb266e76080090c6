#pragma once

#include "pfa/types.hpp"

#include <optional>

namespace pfa {

/// Dense symmetric correlation matrix with unit diagonal. Construction
/// validates symmetry (1e-10 absolute) and the diagonal (1e-10); positive
/// semidefiniteness is checked at decomposition time.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(Matrix entries);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

private:
    Matrix entries_;
};

struct Eigendecomposition {
    Vector values;   // descending, clamped at 0
    Matrix vectors;  // orthonormal columns, sign-fixed
};

/// Principal factor model of a correlation matrix: the full spectrum plus the
/// chosen factor count k, loadings B (p x k, column h = sqrt(lambda_h)*gamma_h)
/// and per-test standardizers a_i = (1 - sum_h b_ih^2)^(-1/2).
struct SpectralModel {
    Vector eigenvalues;
    Matrix eigenvectors;
    int k = 0;
    Matrix loadings;
    Vector standardizers;

    Index dim() const { return eigenvalues.size(); }

    /// Per-test common-factor variance sigma_i^2 = sum_h b_ih^2.
    Vector factor_variances() const { return loadings.rowwise().squaredNorm(); }
};

/// Full spectral decomposition. Eigenvalues are sorted descending; values in
/// [-1e-8*p, 0) are clamped to 0, anything below that throws IndefiniteError.
/// Sign convention: each eigenvector's largest-magnitude entry is positive
/// (ties broken by lowest index), so repeated runs are bitwise identical.
Eigendecomposition eigendecompose(const CorrelationMatrix& sigma);

/// Smallest k >= 0 with sqrt(lambda_{k+1}^2+...+lambda_p^2)/(lambda_1+...+lambda_p) < epsilon.
/// The empty tail has ratio 0, so k = p always terminates.
int select_num_factors(const Vector& eigenvalues, double epsilon);

/// Builds the factor model, choosing k by the epsilon rule unless k_override
/// is given. The standardizer radicand 1 - sum_h b_ih^2 is clamped below at
/// 1e-8 (so a_i <= 1e4): rank-deficient correlation matrices reach exactly 0
/// at full k.
SpectralModel build_factor_model(const CorrelationMatrix& sigma, double epsilon = 0.01,
                                 std::optional<int> k_override = std::nullopt);

}  // namespace pfa
