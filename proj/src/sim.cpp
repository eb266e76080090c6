#include "pfa/sim.hpp"

#include "pfa/adjust.hpp"
#include "pfa/comparators.hpp"
#include "pfa/errors.hpp"
#include "pfa/factors.hpp"
#include "pfa/fdp.hpp"
#include "pfa/normal.hpp"
#include "pfa/rng.hpp"
#include "pfa/screening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfa {

namespace {

// Sub-stream tags so the design, the signal magnitudes, and each replicate
// consume independent portions of the seed space.
constexpr std::uint64_t kDesignStream = 0x10;
constexpr std::uint64_t kBetaStream = 0x20;
constexpr std::uint64_t kReplicateStream = 0x30;

void validate(const DgpSpec& spec) {
    if (spec.n < 3) throw InvalidSpecError("need n >= 3");
    if (spec.p < 1) throw InvalidSpecError("need p >= 1");
    if (spec.p1 < 0 || spec.p1 > spec.p) throw InvalidSpecError("need 0 <= p1 <= p");
    if (!(spec.sigma > 0.0)) throw InvalidSpecError("need sigma > 0");
    if (spec.beta_hi < spec.beta_lo) throw InvalidSpecError("need beta_lo <= beta_hi");
}

double uniform_pm1(Rng& rng) { return 2.0 * rng.uniform01() - 1.0; }

}  // namespace

const char* dgp_structure_name(DgpStructure s) {
    switch (s) {
        case DgpStructure::EqualCorrelation: return "EqualCorrelation";
        case DgpStructure::FanSong: return "FanSong";
        case DgpStructure::IndependentCauchy: return "IndependentCauchy";
        case DgpStructure::ThreeFactor: return "ThreeFactor";
        case DgpStructure::TwoFactor: return "TwoFactor";
        case DgpStructure::NonlinearFactor: return "NonlinearFactor";
    }
    return "unknown";
}

DgpStructure dgp_structure_from_name(const std::string& name) {
    for (DgpStructure s :
         {DgpStructure::EqualCorrelation, DgpStructure::FanSong, DgpStructure::IndependentCauchy,
          DgpStructure::ThreeFactor, DgpStructure::TwoFactor, DgpStructure::NonlinearFactor}) {
        if (name == dgp_structure_name(s)) return s;
    }
    throw InvalidSpecError("unknown dependence structure: " + name);
}

Matrix generate_design(const DgpSpec& spec) {
    validate(spec);
    const int n = spec.n;
    const int p = spec.p;
    Rng rng(derive_seed(spec.seed, kDesignStream));
    Matrix X(n, p);

    switch (spec.structure) {
        case DgpStructure::EqualCorrelation: {
            const double rho = 0.5;
            const double common = std::sqrt(rho);
            const double own = std::sqrt(1.0 - rho);
            for (int i = 0; i < n; ++i) {
                const double g = rng.normal();
                for (int j = 0; j < p; ++j) {
                    X(i, j) = common * g + own * rng.normal();
                }
            }
            break;
        }
        case DgpStructure::FanSong: {
            // Proportional generalization of the 1900/100 split: the leading
            // floor(0.95 p) columns are i.i.d. N(0,1), the rest load on the
            // first ten of them with alternating signs.
            const int m0 = static_cast<int>(std::floor(0.95 * p));
            if (m0 < 10) {
                throw InvalidSpecError("FanSong needs floor(0.95*p) >= 10 independent columns");
            }
            const double resid = std::sqrt(1.0 - 10.0 / 25.0);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < m0; ++j) {
                    X(i, j) = rng.normal();
                }
                for (int j = m0; j < p; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < 10; ++l) {
                        acc += (l % 2 == 0 ? 1.0 : -1.0) * X(i, l) / 5.0;
                    }
                    X(i, j) = acc + resid * rng.normal();
                }
            }
            break;
        }
        case DgpStructure::IndependentCauchy: {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < p; ++j) {
                    X(i, j) = rng.cauchy();
                }
            }
            break;
        }
        case DgpStructure::ThreeFactor: {
            Matrix load(p, 3);
            for (int j = 0; j < p; ++j) {
                for (int h = 0; h < 3; ++h) load(j, h) = uniform_pm1(rng);
            }
            for (int i = 0; i < n; ++i) {
                const double w1 = -2.0 + rng.normal();
                const double w2 = 1.0 + rng.normal();
                const double w3 = 4.0 + rng.normal();
                for (int j = 0; j < p; ++j) {
                    X(i, j) = load(j, 0) * w1 + load(j, 1) * w2 + load(j, 2) * w3 + rng.normal();
                }
            }
            break;
        }
        case DgpStructure::TwoFactor: {
            Matrix load(p, 2);
            for (int j = 0; j < p; ++j) {
                for (int h = 0; h < 2; ++h) load(j, h) = uniform_pm1(rng);
            }
            for (int i = 0; i < n; ++i) {
                const double w1 = rng.normal();
                const double w2 = rng.normal();
                for (int j = 0; j < p; ++j) {
                    X(i, j) = load(j, 0) * w1 + load(j, 1) * w2 + rng.normal();
                }
            }
            break;
        }
        case DgpStructure::NonlinearFactor: {
            Matrix load(p, 2);
            for (int j = 0; j < p; ++j) {
                for (int h = 0; h < 2; ++h) load(j, h) = uniform_pm1(rng);
            }
            for (int i = 0; i < n; ++i) {
                const double w1 = rng.normal();
                const double w2 = rng.normal();
                for (int j = 0; j < p; ++j) {
                    const double sgn = load(j, 1) >= 0.0 ? 1.0 : -1.0;
                    X(i, j) = std::sin(load(j, 0) * w1) +
                              sgn * std::exp(std::abs(load(j, 1)) * w2) + rng.normal();
                }
            }
            break;
        }
    }
    return X;
}

std::pair<Vector, std::vector<bool>> build_mu(const DgpSpec& spec, const Matrix& X) {
    validate(spec);
    if (X.rows() != spec.n || X.cols() != spec.p) {
        throw DimensionMismatchError("design dimensions do not match the spec");
    }
    Rng rng(derive_seed(spec.seed, kBetaStream));
    Vector mu = Vector::Zero(spec.p);
    std::vector<bool> null_mask(static_cast<std::size_t>(spec.p), true);
    const double sqrt_n = std::sqrt(static_cast<double>(spec.n));
    for (int j = 0; j < spec.p1; ++j) {
        const Vector centered = X.col(j).array() - X.col(j).mean();
        const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(spec.n));
        const double beta = spec.beta_lo == spec.beta_hi
                                ? spec.beta_lo
                                : spec.beta_lo + (spec.beta_hi - spec.beta_lo) * rng.uniform01();
        mu[j] = sqrt_n * beta * sd / spec.sigma;
        null_mask[static_cast<std::size_t>(j)] = false;
    }
    return {std::move(mu), std::move(null_mask)};
}

ZStatistics sample_z(const Vector& mu, const CorrelationMatrix& sigma, std::uint64_t seed) {
    const Eigendecomposition decomp = eigendecompose(sigma);
    const Index p = sigma.dim();
    if (mu.size() != p) {
        throw DimensionMismatchError("mu length does not match correlation dimension");
    }
    Rng rng(seed);
    Vector xi(p);
    for (Index i = 0; i < p; ++i) xi[i] = rng.normal();
    ZStatistics out;
    out.z = mu + decomp.vectors * (decomp.values.array().sqrt() * xi.array()).matrix();
    return out;
}

ExperimentResult run_experiment(const DgpSpec& spec, const std::vector<double>& thresholds,
                                const ExperimentOptions& options, int n_replicates) {
    validate(spec);
    if (thresholds.empty()) throw InvalidSpecError("need at least one threshold");
    if (n_replicates < 1) throw InvalidSpecError("need at least one replicate");

    const Matrix X = generate_design(spec);
    const CorrelationMatrix sigma(sample_correlation(X));
    const SpectralModel model = build_factor_model(sigma, options.epsilon, options.k_override);
    auto [mu, null_mask] = build_mu(spec, X);

    const Index p = model.dim();
    const int k = model.k;
    const bool needs_fit = (options.methods.pfa || options.methods.efron) && k > 0;

    // Z = mu + root * xi, with root = Gamma diag(sqrt(lambda)).
    const Matrix root = model.eigenvectors * model.eigenvalues.array().sqrt().matrix().asDiagonal();

    IndexSet null_set;
    for (Index i = 0; i < p; ++i) {
        if (null_mask[static_cast<std::size_t>(i)]) null_set.push_back(i);
    }
    const Vector eta2_mean = model.factor_variances();
    const long p0 = static_cast<long>(null_set.size());

    ExperimentResult result;
    result.spec = spec;
    result.thresholds = thresholds;
    result.options = options;
    result.k_used = k;
    result.replicates.reserve(static_cast<std::size_t>(n_replicates));

    const std::uint64_t rep_base = derive_seed(spec.seed, kReplicateStream);
    Vector xi(p);
    for (int rep = 0; rep < n_replicates; ++rep) {
        SimReplicate record;
        record.seed = derive_seed(rep_base, static_cast<std::uint64_t>(rep));
        Rng rng(record.seed);
        for (Index i = 0; i < p; ++i) xi[i] = rng.normal();

        ZStatistics z;
        z.z = mu + root * xi;
        z.null_mask = null_mask;
        const Vector pvals = pvalues(z);
        const Vector w_true = xi.head(k);
        const Vector eta_true = model.loadings * w_true;

        RealizedFactors fit;
        fit.w_hat = Vector::Zero(k);
        if (needs_fit) {
            const IndexSet calib = select_calibration_set(z, options.fraction);
            Vector z_sub(static_cast<Index>(calib.size()));
            Matrix B_sub(static_cast<Index>(calib.size()), k);
            for (Index row = 0; row < static_cast<Index>(calib.size()); ++row) {
                z_sub[row] = z.z[calib[static_cast<std::size_t>(row)]];
                B_sub.row(row) = model.loadings.row(calib[static_cast<std::size_t>(row)]);
            }
            fit = lad_fit(z_sub, B_sub);
            record.w_err = (fit.w_hat - w_true).norm();
        }
        const Vector eta_hat = model.loadings * fit.w_hat;

        // A_hat and the BH rejection set do not depend on t.
        double a_hat = 0.0;
        if (options.methods.efron && p0 > 0) {
            Vector eta_null(static_cast<Index>(null_set.size()));
            Vector eta2_null(static_cast<Index>(null_set.size()));
            for (Index row = 0; row < static_cast<Index>(null_set.size()); ++row) {
                eta_null[row] = eta_hat[null_set[static_cast<std::size_t>(row)]];
                eta2_null[row] = eta2_mean[null_set[static_cast<std::size_t>(row)]];
            }
            a_hat = efron_A_hat(eta_null, eta2_null, p0);
        }
        double bh_fdp = 0.0;
        if (options.methods.bh) {
            const IndexSet rejected = bh_rejections(pvals, options.bh_alpha);
            long v_bh = 0;
            for (Index i : rejected) {
                if (null_mask[static_cast<std::size_t>(i)]) ++v_bh;
            }
            bh_fdp = rejected.empty()
                         ? 0.0
                         : static_cast<double>(v_bh) / static_cast<double>(rejected.size());
        }

        for (double t : thresholds) {
            ThresholdRecord row;
            row.t = t;
            const TrueFdp truth = true_fdp(pvals, null_mask, t);
            row.v = truth.v;
            row.s = truth.s;
            row.r = truth.r;
            row.true_fdp = truth.fdp;
            row.fdp_a = truth.r > 0
                            ? limit_sum(model, eta_true, t) / static_cast<double>(truth.r)
                            : 0.0;
            if (options.methods.pfa) {
                row.estimates["pfa"] = estimate_fdp(z, model, fit, t).fdp_hat;
            }
            if (options.methods.storey) {
                row.estimates["storey"] =
                    storey_fdp(pvals, t, static_cast<double>(spec.p - spec.p1));
            }
            if (options.methods.efron) {
                row.estimates["efron"] =
                    efron_fdp(t, truth.r, static_cast<double>(p0), a_hat).fdp;
            }
            if (options.methods.bh) {
                row.estimates["bh"] = bh_fdp;
            }
            record.records.push_back(std::move(row));
        }
        result.replicates.push_back(std::move(record));
    }
    return result;
}

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments out;
    double m2 = 0.0;
    long count = 0;
    for (double x : xs) {
        ++count;
        const double delta = x - out.mean;
        out.mean += delta / static_cast<double>(count);
        m2 += delta * (x - out.mean);
    }
    if (count > 1) {
        out.var = m2 / static_cast<double>(count - 1);
        out.sd = std::sqrt(out.var);
    }
    return out;
}

}  // namespace

std::vector<ThresholdSummary> summarize(const ExperimentResult& result) {
    std::vector<ThresholdSummary> summaries;
    for (std::size_t ti = 0; ti < result.thresholds.size(); ++ti) {
        ThresholdSummary summary;
        summary.t = result.thresholds[ti];

        std::vector<double> truths, vs, fdp_as, abs_diffs;
        std::map<std::string, std::vector<double>> ests;
        std::map<std::string, std::vector<double>> abs_res;
        for (const SimReplicate& rep : result.replicates) {
            const ThresholdRecord& row = rep.records[ti];
            truths.push_back(row.true_fdp);
            vs.push_back(static_cast<double>(row.v));
            fdp_as.push_back(row.fdp_a);
            abs_diffs.push_back(std::abs(row.true_fdp - row.fdp_a));
            for (const auto& [name, value] : row.estimates) {
                ests[name].push_back(value);
                abs_res[name].push_back(
                    row.true_fdp > 0.0 ? std::abs(value - row.true_fdp) / row.true_fdp : 0.0);
            }
        }

        const Moments truth_m = moments(truths);
        summary.true_mean = truth_m.mean;
        summary.true_sd = truth_m.sd;
        summary.var_v = moments(vs).var;
        const Moments a_m = moments(fdp_as);
        summary.fdp_a_mean = a_m.mean;
        summary.fdp_a_sd = a_m.sd;
        summary.tv_fdp_vs_a = smoothed_tv_distance(truths, fdp_as);
        summary.mean_abs_diff_a = moments(abs_diffs).mean;
        for (const auto& [name, values] : ests) {
            MethodSummary ms;
            const Moments m = moments(values);
            ms.mean = m.mean;
            ms.sd = m.sd;
            ms.mean_abs_re = moments(abs_res[name]).mean;
            summary.methods[name] = ms;
        }
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

double smoothed_tv_distance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) {
        throw DomainError("smoothed_tv_distance needs nonempty samples");
    }
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    const Moments pooled_m = moments(pooled);
    double h = 1.06 * pooled_m.sd * std::pow(static_cast<double>(pooled.size()), -0.2);
    h = std::max(h, 1e-4);

    const auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
    const double lo = *lo_it - 3.0 * h;
    const double hi = *hi_it + 3.0 * h;
    constexpr int kGrid = 512;
    const double dx = (hi - lo) / (kGrid - 1);

    auto kde_at = [&](const std::vector<double>& sample, double point) {
        double density = 0.0;
        for (double s : sample) density += normal_pdf((point - s) / h);
        return density / (h * static_cast<double>(sample.size()));
    };

    double tv = 0.0;
    for (int g = 0; g < kGrid; ++g) {
        const double point = lo + dx * g;
        tv += std::abs(kde_at(x, point) - kde_at(y, point));
    }
    return 0.5 * tv * dx;
}

}  // namespace pfa
