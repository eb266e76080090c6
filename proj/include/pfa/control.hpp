#pragma once

#include "pfa/spectral.hpp"
#include "pfa/types.hpp"

#include <cstdint>

namespace pfa {

/// Monte-Carlo configuration for the FDR functional. Draw j of the factor
/// vector W is seeded from (seed, j), so any evaluation order reproduces the
/// sequential result bit for bit.
struct McConfig {
    long n_draws = 10000;
    std::uint64_t seed = 0;
    double tolerance = 1e-6;  // bisection resolution on t
};

struct ThresholdResult {
    double t_star = 0.0;
    double fdr_at_t = 0.0;
    double mc_se = 0.0;
    long n_draws = 0;
    std::uint64_t seed = 0;
    int clamped = 0;  // -1: target below FDR at t_lo, +1: above FDR at t_hi
};

/// Approximate FDR at threshold t: the Monte-Carlo mean over W ~ N(0, I_k) of
/// s(W)/(s(W)+p1), where s(W) is the all-index limit sum with eta = B*W.
/// k = 0 needs no simulation and returns p*t/(p*t + p1) exactly.
double fdr_expectation(const SpectralModel& model, long p1, double t, const McConfig& mc);

/// Bisection solve of fdr_expectation(t) = alpha over t in [1e-12, 0.5] with
/// common random numbers across evaluations (the per-draw integrand is
/// monotone in t, so the shared-draw mean is too). If alpha is outside the
/// attainable range the nearer endpoint is returned with `clamped` set.
ThresholdResult find_threshold(const SpectralModel& model, long p1, double alpha,
                               const McConfig& mc);

/// Sample variance over W draws of the limit sum restricted to `subset`
/// (all indices reproduces the conservative surrogate; the true-null subset
/// gives the oracle expression).
double variance_of_v(const SpectralModel& model, const IndexSet& subset, double t,
                     const McConfig& mc);
double variance_of_v(const SpectralModel& model, double t, const McConfig& mc);

}  // namespace pfa
