#pragma once

#include "pfa/types.hpp"

namespace pfa {

enum class FactorFitMethod { LAD, LS };

/// Estimated factor realizations with fit diagnostics. `objective` is the
/// achieved L1 objective (also reported for LS fits, for comparability).
struct RealizedFactors {
    Vector w_hat;
    FactorFitMethod method = FactorFitMethod::LAD;
    Index m_used = 0;
    double objective = 0.0;
};

/// Indices of the ceil(fraction * p) smallest |z_i|, ties broken by lower
/// index; returned sorted ascending. fraction must lie in (0, 1].
IndexSet select_calibration_set(const ZStatistics& z, double fraction);

/// Least-absolute-deviation fit of z_sub ~ B_sub * w, solved by iteratively
/// reweighted least squares on the smoothed objective sum sqrt(r^2 + tau^2)
/// with tau driven from 1e-2 down to 1e-10, warm-started at the LS solution.
/// Requires m >= k >= 1 and numerical column rank k.
RealizedFactors lad_fit(const Vector& z_sub, const Matrix& B_sub);

/// Ordinary least-squares fit of z_sub ~ B_sub * w.
RealizedFactors ls_fit(const Vector& z_sub, const Matrix& B_sub);

/// L1 objective sum_i |z_i - b_i . w|.
double lad_objective(const Vector& z_sub, const Matrix& B_sub, const Vector& w);

}  // namespace pfa
