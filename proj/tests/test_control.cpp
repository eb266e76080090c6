#include "pfa/control.hpp"

#include "pfa/errors.hpp"
#include "pfa/normal.hpp"
#include "pfa/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfa;

namespace {

SpectralModel equicorrelation_model(Index p, double rho, int k) {
    Matrix m = Matrix::Constant(p, p, rho);
    m.diagonal().setOnes();
    return build_factor_model(CorrelationMatrix(m), 0.01, k);
}

SpectralModel independence_model(Index p) {
    return build_factor_model(CorrelationMatrix(Matrix::Identity(p, p)), 0.01, 0);
}

// Closed-form equicorrelation integrand, independent of limit_sum: all rows
// share the same (a, b).
struct EquicorrIntegrand {
    double p;
    double a;
    double b;
    double p1;

    double s(double w, double t) const {
        const double z = normal_quantile(0.5 * t);
        return p * (normal_cdf(a * (z + b * w)) + normal_cdf(a * (z - b * w)));
    }
    double fdr(double w, double t) const {
        const double sw = s(w, t);
        return sw / (sw + p1);
    }
};

}  // namespace

TEST_CASE("fdr_expectation: k = 0 closed form and p1 = 0") {
    const SpectralModel model = independence_model(1000);
    const McConfig mc{10000, 7, 1e-6};
    CHECK(fdr_expectation(model, 10, 0.001, mc) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    CHECK(fdr_expectation(model, 0, 0.001, mc) == 1.0);
    CHECK_THROWS_AS(fdr_expectation(model, 10, 0.001, McConfig{50, 0, 1e-6}), DomainError);
}

TEST_CASE("find_threshold: k = 0 inverts the closed form") {
    const SpectralModel model = independence_model(1000);
    const McConfig mc{10000, 11, 1e-6};
    const ThresholdResult res = find_threshold(model, 10, 0.15, mc);
    const double expected = 0.15 * 10.0 / (1000.0 * 0.85);
    CHECK(res.clamped == 0);
    CHECK(std::abs(res.t_star - expected) <= 1e-6);
    CHECK(std::abs(res.fdr_at_t - 0.15) <= 1e-4);
}

TEST_CASE("find_threshold: unreachable targets clamp with a flag") {
    const SpectralModel model = independence_model(1000);
    const McConfig mc{10000, 11, 1e-6};
    const ThresholdResult low = find_threshold(model, 10, 1e-12, mc);
    CHECK(low.clamped == -1);
    CHECK(low.t_star == 1e-12);
    const ThresholdResult high = find_threshold(model, 10, 0.99, mc);
    CHECK(high.clamped == 1);
    CHECK(high.t_star == 0.5);
}

TEST_CASE("variance_of_v: k = 0 is deterministic, hence zero") {
    const SpectralModel model = independence_model(300);
    const McConfig mc{5000, 3, 1e-6};
    CHECK(variance_of_v(model, 0.001, mc) == 0.0);
}

TEST_CASE("control outputs are bitwise reproducible for a fixed seed") {
    const SpectralModel model = equicorrelation_model(60, 0.5, 1);
    const McConfig mc{2000, 99, 1e-6};
    CHECK(fdr_expectation(model, 5, 0.01, mc) == fdr_expectation(model, 5, 0.01, mc));
    CHECK(variance_of_v(model, 0.01, mc) == variance_of_v(model, 0.01, mc));
    const ThresholdResult a = find_threshold(model, 5, 0.2, mc);
    const ThresholdResult b = find_threshold(model, 5, 0.2, mc);
    CHECK(a.t_star == b.t_star);
    CHECK(a.fdr_at_t == b.fdr_at_t);
}

TEST_CASE("fdr_expectation is monotone in t under common random numbers") {
    const SpectralModel model = equicorrelation_model(50, 0.5, 1);
    const McConfig mc{1000, 42, 1e-6};
    double prev = 0.0;
    for (double t : {0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.3}) {
        const double now = fdr_expectation(model, 5, t, mc);
        CHECK(now >= prev - 1e-12);
        prev = now;
    }
}

TEST_SUITE("slow") {

TEST_CASE("fdr_expectation: equicorrelation agrees with Gauss-Hermite quadrature") {
    const Index p = 200;
    const SpectralModel model = equicorrelation_model(p, 0.5, 1);
    const EquicorrIntegrand integrand{static_cast<double>(p), model.standardizers[0],
                                      model.loadings(0, 0), 10.0};
    const auto gh = oracles::gauss_hermite_normal(200);
    const double t = 0.001;

    double gh_mean = 0.0;
    double gh_sq = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double f = integrand.fdr(gh.nodes[i], t);
        gh_mean += gh.weights[i] * f;
        gh_sq += gh.weights[i] * f * f;
    }
    const double gh_sd = std::sqrt(std::max(gh_sq - gh_mean * gh_mean, 0.0));

    const McConfig mc{10000, 2024, 1e-6};
    const double mc_mean = fdr_expectation(model, 10, t, mc);
    const double se = gh_sd / std::sqrt(static_cast<double>(mc.n_draws));
    CHECK(std::abs(mc_mean - gh_mean) <= 3.0 * se);
}

TEST_CASE("find_threshold: equicorrelation matches a quadrature root-find") {
    const Index p = 200;
    const SpectralModel model = equicorrelation_model(p, 0.5, 1);
    const EquicorrIntegrand integrand{static_cast<double>(p), model.standardizers[0],
                                      model.loadings(0, 0), 10.0};
    const auto gh = oracles::gauss_hermite_normal(200);
    const double alpha = 0.15;

    auto gh_fdr = [&](double t) {
        double mean = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            mean += gh.weights[i] * integrand.fdr(gh.nodes[i], t);
        }
        return mean;
    };
    double lo = 1e-12, hi = 0.5;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (gh_fdr(mid) < alpha ? lo : hi) = mid;
    }
    const double oracle_t = 0.5 * (lo + hi);

    const McConfig mc{20000, 31337, 1e-6};
    const ThresholdResult res = find_threshold(model, 10, alpha, mc);
    CHECK(res.clamped == 0);
    CHECK(std::abs(res.t_star - oracle_t) <= 1e-4);
}

TEST_CASE("variance_of_v: equicorrelation agrees with quadrature moments") {
    const Index p = 200;
    const SpectralModel model = equicorrelation_model(p, 0.5, 1);
    const EquicorrIntegrand integrand{static_cast<double>(p), model.standardizers[0],
                                      model.loadings(0, 0), 0.0};
    const auto gh = oracles::gauss_hermite_normal(200);
    const double t = 0.001;

    double m1 = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        m1 += gh.weights[i] * integrand.s(gh.nodes[i], t);
    }
    double m2c = 0.0, m4c = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double centered = integrand.s(gh.nodes[i], t) - m1;
        m2c += gh.weights[i] * centered * centered;
        m4c += gh.weights[i] * centered * centered * centered * centered;
    }

    const McConfig mc{10000, 91, 1e-6};
    const double var = variance_of_v(model, t, mc);
    const double se_var =
        std::sqrt(std::max(m4c - m2c * m2c, 0.0) / static_cast<double>(mc.n_draws));
    CHECK(std::abs(var - m2c) <= 3.0 * se_var);
}

}  // TEST_SUITE("slow")
