#include "pfa/control.hpp"

#include "pfa/errors.hpp"
#include "pfa/fdp.hpp"
#include "pfa/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace pfa {

namespace {

constexpr double kBisectLo = 1e-12;
constexpr double kBisectHi = 0.5;

void check_mc(const McConfig& mc) {
    if (mc.n_draws < 100) {
        throw DomainError("n_draws must be >= 100, got " + std::to_string(mc.n_draws));
    }
}

// W draws as rows; draw j comes from stream (seed, j) regardless of order.
Matrix draw_factors(const SpectralModel& model, const McConfig& mc) {
    Matrix draws(mc.n_draws, model.k);
    for (long j = 0; j < mc.n_draws; ++j) {
        Rng rng = rng_stream(mc.seed, static_cast<std::uint64_t>(j));
        for (int h = 0; h < model.k; ++h) {
            draws(j, h) = rng.normal();
        }
    }
    return draws;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Welford accumulation keeps the k = 0 degenerate case exact and the variance
// numerically stable.
template <typename ValueAt>
MeanSe welford(long n, ValueAt&& value_at) {
    double mean = 0.0;
    double m2 = 0.0;
    for (long j = 0; j < n; ++j) {
        const double x = value_at(j);
        const double delta = x - mean;
        mean += delta / static_cast<double>(j + 1);
        m2 += delta * (x - mean);
    }
    MeanSe out;
    out.mean = mean;
    out.se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return out;
}

MeanSe fdr_mean_se(const SpectralModel& model, const Matrix& draws, long p1, double t) {
    return welford(draws.rows(), [&](long j) {
        const Vector eta = model.loadings * draws.row(j).transpose();
        const double s = limit_sum(model, eta, t);
        return s / (s + static_cast<double>(p1));
    });
}

}  // namespace

double fdr_expectation(const SpectralModel& model, long p1, double t, const McConfig& mc) {
    check_mc(mc);
    if (!(t > 0.0) || !(t < 1.0)) {
        throw DomainError("threshold t must lie in (0,1), got " + std::to_string(t));
    }
    if (p1 < 0 || p1 >= model.dim()) {
        throw DomainError("p1 must lie in [0, p)");
    }
    if (model.k == 0) {
        const double s = static_cast<double>(model.dim()) * t;
        return s / (s + static_cast<double>(p1));
    }
    const Matrix draws = draw_factors(model, mc);
    return fdr_mean_se(model, draws, p1, t).mean;
}

ThresholdResult find_threshold(const SpectralModel& model, long p1, double alpha,
                               const McConfig& mc) {
    check_mc(mc);
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    if (p1 < 0 || p1 >= model.dim()) {
        throw DomainError("p1 must lie in [0, p)");
    }

    const bool exact = model.k == 0;
    Matrix draws;
    if (!exact) draws = draw_factors(model, mc);

    auto eval = [&](double t) -> MeanSe {
        if (exact) {
            const double s = static_cast<double>(model.dim()) * t;
            return {s / (s + static_cast<double>(p1)), 0.0};
        }
        return fdr_mean_se(model, draws, p1, t);
    };

    ThresholdResult out;
    out.n_draws = mc.n_draws;
    out.seed = mc.seed;

    const MeanSe at_lo = eval(kBisectLo);
    if (at_lo.mean >= alpha) {
        out.t_star = kBisectLo;
        out.fdr_at_t = at_lo.mean;
        out.mc_se = at_lo.se;
        out.clamped = -1;
        return out;
    }
    const MeanSe at_hi = eval(kBisectHi);
    if (at_hi.mean <= alpha) {
        out.t_star = kBisectHi;
        out.fdr_at_t = at_hi.mean;
        out.mc_se = at_hi.se;
        out.clamped = 1;
        return out;
    }

    double lo = kBisectLo;
    double hi = kBisectHi;
    MeanSe at_mid;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        at_mid = eval(mid);
        if (at_mid.mean < alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
        const bool close_enough = std::abs(at_mid.mean - alpha) <= std::max(2.0 * at_mid.se, 1e-4);
        if (hi - lo <= mc.tolerance && close_enough) break;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    out.t_star = mid;
    out.fdr_at_t = at_mid.mean;
    out.mc_se = at_mid.se;
    return out;
}

double variance_of_v(const SpectralModel& model, const IndexSet& subset, double t,
                     const McConfig& mc) {
    check_mc(mc);
    if (!(t > 0.0) || !(t < 1.0)) {
        throw DomainError("threshold t must lie in (0,1), got " + std::to_string(t));
    }
    if (model.k == 0) return 0.0;  // the expression is deterministic

    const Matrix draws = draw_factors(model, mc);
    double mean = 0.0;
    double m2 = 0.0;
    for (long j = 0; j < mc.n_draws; ++j) {
        const Vector eta = model.loadings * draws.row(j).transpose();
        const double x = limit_sum(model, eta, t, subset);
        const double delta = x - mean;
        mean += delta / static_cast<double>(j + 1);
        m2 += delta * (x - mean);
    }
    return m2 / static_cast<double>(mc.n_draws - 1);
}

double variance_of_v(const SpectralModel& model, double t, const McConfig& mc) {
    IndexSet all(static_cast<std::size_t>(model.dim()));
    std::iota(all.begin(), all.end(), Index{0});
    return variance_of_v(model, all, t, mc);
}

}  // namespace pfa
