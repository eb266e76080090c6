#include "pfa/adjust.hpp"

#include "pfa/errors.hpp"
#include "pfa/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pfa {

AdjustedResult adjusted_pvalues(const ZStatistics& z, const SpectralModel& model,
                                const RealizedFactors& w_hat) {
    const Index p = model.dim();
    if (z.z.size() != p) {
        throw DimensionMismatchError("z length does not match model dimension");
    }
    if (w_hat.w_hat.size() != model.k) {
        throw DimensionMismatchError("w_hat length does not match model factor count");
    }

    AdjustedResult out;
    const Vector eta = model.loadings * w_hat.w_hat;
    out.adjusted_z = model.standardizers.array() * (z.z - eta).array();
    out.adjusted_p.resize(p);
    for (Index i = 0; i < p; ++i) {
        out.adjusted_p[i] = 2.0 * normal_cdf(-std::abs(out.adjusted_z[i]));
    }
    out.ranking.resize(p);
    std::iota(out.ranking.begin(), out.ranking.end(), Index{0});
    std::sort(out.ranking.begin(), out.ranking.end(), [&](Index a, Index b) {
        if (out.adjusted_p[a] != out.adjusted_p[b]) return out.adjusted_p[a] < out.adjusted_p[b];
        return a < b;
    });
    return out;
}

}  // namespace pfa
