#pragma once

#include "pfa/factors.hpp"
#include "pfa/spectral.hpp"
#include "pfa/types.hpp"

#include <string>

namespace pfa {

/// Report of an FDP estimate at a fixed p-value threshold.
struct FdpReport {
    double t = 0.0;
    long rejections = 0;        // R(t)
    double v_hat = 0.0;         // estimated false-discovery count
    double fdp_hat = 0.0;       // min(v_hat, R)/R, 0 when R = 0
    std::string method = "PFA";
    int k_used = 0;
    Index m_used = 0;
};

/// Counts of an oracle evaluation against the ground-truth null mask.
struct TrueFdp {
    long v = 0;
    long s = 0;
    long r = 0;
    double fdp = 0.0;
};

/// Two-sided p-values P_i = 2*Phi(-|z_i|).
Vector pvalues(const ZStatistics& z);

/// #{P_i <= t} (closed inequality). Accepts t in (0, 1].
long count_rejections(const Vector& pvals, double t);

/// sum over the subset of Phi(a_i(z_{t/2}+eta_i)) + Phi(a_i(z_{t/2}-eta_i))
/// with z_{t/2} = Phi^{-1}(t/2). When a_i == 1 and eta_i == 0 the summand is
/// exactly t by the quantile identity and is computed as such.
double limit_sum(const SpectralModel& model, const Vector& eta, double t);
double limit_sum(const SpectralModel& model, const Vector& eta, double t,
                 const IndexSet& subset);

/// Shifted variant with per-index offsets mu_i:
/// sum Phi(a_i(z_{t/2}+eta_i+mu_i)) + Phi(a_i(z_{t/2}-eta_i-mu_i)).
double limit_sum_shifted(const SpectralModel& model, const Vector& eta, const Vector& mu,
                         double t);

/// Realized-FDP estimate: v_hat is the limit sum over all p indices with
/// eta_hat = B * w_hat (the conservative all-index surrogate), capped at R.
FdpReport estimate_fdp(const ZStatistics& z, const SpectralModel& model,
                       const RealizedFactors& w_hat, double t);

/// Oracle bookkeeping for simulations; requires the null mask.
TrueFdp true_fdp(const Vector& pvals, const std::vector<bool>& null_mask, double t);
TrueFdp true_fdp(const ZStatistics& z, double t);

}  // namespace pfa
