#pragma once

#include "pfa/spectral.hpp"
#include "pfa/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pfa {

enum class DgpStructure {
    EqualCorrelation,
    FanSong,
    IndependentCauchy,
    ThreeFactor,
    TwoFactor,
    NonlinearFactor,
};

const char* dgp_structure_name(DgpStructure s);
DgpStructure dgp_structure_from_name(const std::string& name);

/// Data-generating process for one experiment. The nonzero signal magnitudes
/// are beta_lo when beta_lo == beta_hi and Uniform(beta_lo, beta_hi) draws
/// otherwise.
struct DgpSpec {
    DgpStructure structure = DgpStructure::TwoFactor;
    int n = 100;
    int p = 2000;
    int p1 = 10;
    double beta_lo = 1.0;
    double beta_hi = 1.0;
    double sigma = 2.0;
    std::uint64_t seed = 0;
};

/// n x p design matrix with columns following the requested dependence
/// structure; deterministic given the spec seed.
Matrix generate_design(const DgpSpec& spec);

/// Mean vector mu_j = sqrt(n)*beta_j*sd_j/sigma on the first p1 indices
/// (sd_j is the divisor-n column standard deviation), zero elsewhere.
/// Second element is the null mask (true = true null).
std::pair<Vector, std::vector<bool>> build_mu(const DgpSpec& spec, const Matrix& X);

/// Draws Z = mu + Gamma * diag(sqrt(lambda)) * xi with xi standard normal;
/// the eigen square root handles rank-deficient correlation matrices.
ZStatistics sample_z(const Vector& mu, const CorrelationMatrix& sigma, std::uint64_t seed);

struct MethodSet {
    bool pfa = true;
    bool storey = false;  // oracle p0 = p - p1
    bool efron = false;   // dispersion bridge with the PFA factor estimates
    bool bh = false;      // realized FDP of BH at bh_alpha
};

struct ExperimentOptions {
    double epsilon = 0.01;
    std::optional<int> k_override;
    double fraction = 0.90;
    MethodSet methods;
    double bh_alpha = 0.05;
};

struct ThresholdRecord {
    double t = 0.0;
    long v = 0;
    long s = 0;
    long r = 0;
    double true_fdp = 0.0;
    double fdp_a = 0.0;  // limit sum with the true factors over R(t)
    std::map<std::string, double> estimates;
};

struct SimReplicate {
    std::uint64_t seed = 0;
    std::vector<ThresholdRecord> records;
    double w_err = 0.0;  // ||w_hat - w||_2 when the LAD fit ran
};

struct ExperimentResult {
    DgpSpec spec;
    std::vector<double> thresholds;
    ExperimentOptions options;
    int k_used = 0;
    std::vector<SimReplicate> replicates;
};

/// Runs the conditional-on-X protocol: the design (hence the correlation
/// matrix, factor model, and mu) is generated once; each replicate redraws Z
/// from a stream derived from (seed, replicate index).
ExperimentResult run_experiment(const DgpSpec& spec, const std::vector<double>& thresholds,
                                const ExperimentOptions& options, int n_replicates);

struct MethodSummary {
    double mean = 0.0;
    double sd = 0.0;
    double mean_abs_re = 0.0;  // |est-true|/true, 0 when true FDP is 0
};

struct ThresholdSummary {
    double t = 0.0;
    double true_mean = 0.0;
    double true_sd = 0.0;
    double var_v = 0.0;  // empirical variance of V(t)
    double fdp_a_mean = 0.0;
    double fdp_a_sd = 0.0;
    double tv_fdp_vs_a = 0.0;        // smoothed TV(FDP, FDP_A)
    double mean_abs_diff_a = 0.0;    // mean |FDP - FDP_A|
    std::map<std::string, MethodSummary> methods;
};

std::vector<ThresholdSummary> summarize(const ExperimentResult& result);

/// Total variation distance between Gaussian kernel density estimates of the
/// two samples (shared Silverman bandwidth on the pooled sample).
double smoothed_tv_distance(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pfa
