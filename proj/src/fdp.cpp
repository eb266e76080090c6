#include "pfa/fdp.hpp"

#include "pfa/errors.hpp"
#include "pfa/normal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfa {

namespace {

void check_threshold_open(double t) {
    if (!(t > 0.0) || !(t < 1.0)) {
        throw DomainError("threshold t must lie in (0,1), got " + std::to_string(t));
    }
}

void check_threshold_closed(double t) {
    if (!(t > 0.0) || t > 1.0) {
        throw DomainError("threshold t must lie in (0,1], got " + std::to_string(t));
    }
}

// Accumulates the limit-sum terms. 2*Phi(z_{t/2}) == t exactly, so terms with
// a_i == 1 and eta_i == 0 are counted and folded in as count * t at the end;
// this keeps the k = 0 reduction to p*t bit-exact.
struct SummandAccumulator {
    double z_half;
    double total = 0.0;
    long trivial = 0;

    void add(double a, double eta) {
        if (eta == 0.0 && a == 1.0) {
            ++trivial;
        } else {
            total += normal_cdf(a * (z_half + eta)) + normal_cdf(a * (z_half - eta));
        }
    }

    double value(double t) const { return total + static_cast<double>(trivial) * t; }
};

}  // namespace

Vector pvalues(const ZStatistics& z) {
    Vector p(z.z.size());
    for (Index i = 0; i < z.z.size(); ++i) {
        if (!std::isfinite(z.z[i])) {
            throw DomainError("z statistic " + std::to_string(i) + " is not finite");
        }
        p[i] = 2.0 * normal_cdf(-std::abs(z.z[i]));
    }
    return p;
}

long count_rejections(const Vector& pvals, double t) {
    check_threshold_closed(t);
    long r = 0;
    for (Index i = 0; i < pvals.size(); ++i) {
        if (pvals[i] <= t) ++r;
    }
    return r;
}

double limit_sum(const SpectralModel& model, const Vector& eta, double t,
                 const IndexSet& subset) {
    check_threshold_open(t);
    if (eta.size() != model.dim()) {
        throw DimensionMismatchError("eta length does not match model dimension");
    }
    SummandAccumulator acc{normal_quantile(0.5 * t)};
    for (Index i : subset) {
        acc.add(model.standardizers[i], eta[i]);
    }
    return acc.value(t);
}

double limit_sum(const SpectralModel& model, const Vector& eta, double t) {
    check_threshold_open(t);
    if (eta.size() != model.dim()) {
        throw DimensionMismatchError("eta length does not match model dimension");
    }
    SummandAccumulator acc{normal_quantile(0.5 * t)};
    for (Index i = 0; i < model.dim(); ++i) {
        acc.add(model.standardizers[i], eta[i]);
    }
    return acc.value(t);
}

double limit_sum_shifted(const SpectralModel& model, const Vector& eta, const Vector& mu,
                         double t) {
    check_threshold_open(t);
    if (eta.size() != model.dim() || mu.size() != model.dim()) {
        throw DimensionMismatchError("eta/mu length does not match model dimension");
    }
    SummandAccumulator acc{normal_quantile(0.5 * t)};
    for (Index i = 0; i < model.dim(); ++i) {
        acc.add(model.standardizers[i], eta[i] + mu[i]);
    }
    return acc.value(t);
}

FdpReport estimate_fdp(const ZStatistics& z, const SpectralModel& model,
                       const RealizedFactors& w_hat, double t) {
    check_threshold_open(t);
    if (z.z.size() != model.dim()) {
        throw DimensionMismatchError("z length does not match model dimension");
    }
    if (w_hat.w_hat.size() != model.k) {
        throw DimensionMismatchError("w_hat length does not match model factor count");
    }

    FdpReport report;
    report.t = t;
    report.k_used = model.k;
    report.m_used = w_hat.m_used;
    report.rejections = count_rejections(pvalues(z), t);

    const Vector eta = model.loadings * w_hat.w_hat;
    report.v_hat = limit_sum(model, eta, t);
    report.fdp_hat = report.rejections > 0
                         ? std::min(report.v_hat, static_cast<double>(report.rejections)) /
                               static_cast<double>(report.rejections)
                         : 0.0;
    return report;
}

TrueFdp true_fdp(const Vector& pvals, const std::vector<bool>& null_mask, double t) {
    check_threshold_closed(t);
    if (static_cast<Index>(null_mask.size()) != pvals.size()) {
        throw DimensionMismatchError("null mask length does not match p-value length");
    }
    TrueFdp out;
    for (Index i = 0; i < pvals.size(); ++i) {
        if (pvals[i] <= t) {
            ++out.r;
            if (null_mask[static_cast<std::size_t>(i)]) ++out.v;
        }
    }
    out.s = out.r - out.v;
    out.fdp = out.r > 0 ? static_cast<double>(out.v) / static_cast<double>(out.r) : 0.0;
    return out;
}

TrueFdp true_fdp(const ZStatistics& z, double t) {
    if (!z.null_mask) {
        throw MissingMaskError("true_fdp requires a ground-truth null mask");
    }
    return true_fdp(pvalues(z), *z.null_mask, t);
}

}  // namespace pfa
