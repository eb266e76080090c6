#pragma once

#include "pfa/factors.hpp"
#include "pfa/spectral.hpp"
#include "pfa/types.hpp"

namespace pfa {

/// Dependence-adjusted test statistics, p-values, and ranking. `ranking[r]`
/// is the index of the hypothesis with the (r+1)-th smallest adjusted
/// p-value (ties broken by index).
struct AdjustedResult {
    Vector adjusted_z;  // a_i * (z_i - b_i . w_hat)
    Vector adjusted_p;  // 2*Phi(-|adjusted_z_i|)
    IndexSet ranking;
};

/// Subtracts the estimated common factors and rescales by a_i, sharpening the
/// signal-to-noise ratio of every test statistic. With k = 0 this is the
/// identity on z.
AdjustedResult adjusted_pvalues(const ZStatistics& z, const SpectralModel& model,
                                const RealizedFactors& w_hat);

}  // namespace pfa
