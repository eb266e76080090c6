#pragma once

#include "pfa/types.hpp"

namespace pfa {

/// Benjamini-Hochberg step-up at level alpha: with ascending order statistics
/// p_(1) <= ... <= p_(p), finds the largest i with p_(i) <= i*alpha/p and
/// rejects the hypotheses carrying the i smallest p-values (ties broken by
/// index). Returns rejected indices sorted ascending; empty if no i qualifies.
IndexSet bh_rejections(const Vector& pvals, double alpha);

/// Storey estimate p0_hat * t / max(R(t), 1). Oracle callers pass
/// p0_hat = p - p1; otherwise use storey_p0_lambda.
double storey_fdp(const Vector& pvals, double t, double p0_hat);

/// Data-driven null-count estimate #{P_i > lambda}/(1 - lambda), clamped to
/// [0, p]. Reports using this should carry a "Storey(lambda=...)" tag.
double storey_p0_lambda(const Vector& pvals, double lambda = 0.5);

/// Dispersion-variate estimate from the factor components over a
/// null-surrogate set: A_hat = (1/(sqrt(2)*p0)) * sum_i (eta_hat_i^2 - eta2_mean_i),
/// where eta2_mean_i = sum_h b_ih^2 is the model variance of eta_hat_i.
double efron_A_hat(const Vector& eta_hat, const Vector& eta2_mean, long p0);

struct EfronEstimate {
    double fdp = 0.0;  // clamped into [0,1]
    double raw = 0.0;  // unclamped parametric value
};

/// Parametric realized-FDP estimate
/// p0*t*[1 + 2*A_hat*(-z_{t/2})*phi(z_{t/2})/sqrt(2t)] / max(R, 1).
EfronEstimate efron_fdp(double t, long rejections, double p0, double a_hat);

}  // namespace pfa
