#include "pfa/comparators.hpp"

#include "pfa/errors.hpp"
#include "pfa/fdp.hpp"
#include "pfa/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pfa {

IndexSet bh_rejections(const Vector& pvals, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    const Index p = pvals.size();
    IndexSet order(p);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (pvals[a] != pvals[b]) return pvals[a] < pvals[b];
        return a < b;
    });

    Index cutoff = 0;
    for (Index i = p; i >= 1; --i) {
        if (pvals[order[i - 1]] <= static_cast<double>(i) * alpha / static_cast<double>(p)) {
            cutoff = i;
            break;
        }
    }
    IndexSet rejected(order.begin(), order.begin() + cutoff);
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

double storey_fdp(const Vector& pvals, double t, double p0_hat) {
    if (p0_hat < 0.0 || p0_hat > static_cast<double>(pvals.size())) {
        throw DomainError("p0_hat must lie in [0, p]");
    }
    const long r = count_rejections(pvals, t);
    return p0_hat * t / static_cast<double>(std::max(r, 1L));
}

double storey_p0_lambda(const Vector& pvals, double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0)) {
        throw DomainError("lambda must lie in (0,1), got " + std::to_string(lambda));
    }
    long above = 0;
    for (Index i = 0; i < pvals.size(); ++i) {
        if (pvals[i] > lambda) ++above;
    }
    const double estimate = static_cast<double>(above) / (1.0 - lambda);
    return std::clamp(estimate, 0.0, static_cast<double>(pvals.size()));
}

double efron_A_hat(const Vector& eta_hat, const Vector& eta2_mean, long p0) {
    if (eta_hat.size() != eta2_mean.size() || eta_hat.size() == 0) {
        throw DimensionMismatchError("eta_hat and eta2_mean must be nonempty and equal length");
    }
    if (p0 < 1) {
        throw DomainError("p0 must be >= 1");
    }
    const double centered = (eta_hat.array().square() - eta2_mean.array()).sum();
    return centered / (std::sqrt(2.0) * static_cast<double>(p0));
}

EfronEstimate efron_fdp(double t, long rejections, double p0, double a_hat) {
    if (!(t > 0.0) || !(t < 1.0)) {
        throw DomainError("threshold t must lie in (0,1), got " + std::to_string(t));
    }
    if (rejections < 0) {
        throw DomainError("rejection count must be nonnegative");
    }
    const double z_half = normal_quantile(0.5 * t);
    const double bracket = 1.0 + 2.0 * a_hat * (-z_half) * normal_pdf(z_half) / std::sqrt(2.0 * t);
    EfronEstimate out;
    out.raw = p0 * t * bracket / static_cast<double>(std::max(rejections, 1L));
    out.fdp = std::clamp(out.raw, 0.0, 1.0);
    return out;
}

}  // namespace pfa
