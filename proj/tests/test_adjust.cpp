#include "pfa/adjust.hpp"

#include "pfa/fdp.hpp"
#include "pfa/normal.hpp"
#include "pfa/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pfa;

namespace {

Matrix equicorrelation(Index p, double rho) {
    Matrix m = Matrix::Constant(p, p, rho);
    m.diagonal().setOnes();
    return m;
}

}  // namespace

TEST_CASE("adjusted_pvalues: k = 0 is exactly the unadjusted p-values") {
    const SpectralModel model =
        build_factor_model(CorrelationMatrix(Matrix::Identity(8, 8)), 0.01, 0);
    Rng rng(2);
    ZStatistics z;
    z.z.resize(8);
    for (Index i = 0; i < 8; ++i) z.z[i] = 2.0 * rng.normal();
    RealizedFactors fit;
    fit.w_hat = Vector::Zero(0);

    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);
    const Vector raw = pvalues(z);
    for (Index i = 0; i < 8; ++i) {
        CHECK(adjusted.adjusted_z[i] == z.z[i]);
        CHECK(adjusted.adjusted_p[i] == raw[i]);
    }
}

TEST_CASE("adjusted_pvalues: exact factor match has p-value 1") {
    const SpectralModel model =
        build_factor_model(CorrelationMatrix(equicorrelation(5, 0.5)), 0.01, 1);
    RealizedFactors fit;
    fit.w_hat.resize(1);
    fit.w_hat << 1.7;
    ZStatistics z;
    z.z = model.loadings * fit.w_hat;
    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);
    for (Index i = 0; i < 5; ++i) {
        CHECK(adjusted.adjusted_z[i] == 0.0);
        CHECK(adjusted.adjusted_p[i] == 1.0);
    }
}

TEST_CASE("adjusted_pvalues: constructed k = 1 case against the scalar oracle") {
    SpectralModel model;
    model.eigenvalues = Vector::Ones(1);
    model.eigenvectors = Matrix::Identity(1, 1);
    model.k = 1;
    model.loadings.resize(1, 1);
    model.loadings << 0.8;
    model.standardizers.resize(1);
    model.standardizers << 1.0 / std::sqrt(1.0 - 0.64);

    ZStatistics z;
    z.z.resize(1);
    z.z << 2.0;
    RealizedFactors fit;
    fit.w_hat.resize(1);
    fit.w_hat << 1.5;

    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);
    CHECK(adjusted.adjusted_z[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    const double expected =
        2.0 * static_cast<double>(oracles::normal_cdf_oracle(-4.0 / 3.0));
    CHECK(adjusted.adjusted_p[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adjusted_pvalues: ranking is a tie-stable permutation") {
    const SpectralModel model =
        build_factor_model(CorrelationMatrix(equicorrelation(6, 0.3)), 0.01, 1);
    RealizedFactors fit;
    fit.w_hat = Vector::Zero(1);
    ZStatistics z;
    z.z.resize(6);
    z.z << 1.0, -1.0, 0.2, 3.0, 0.2, -3.0;  // |z| ties at (0,1), (2,4), (3,5)
    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);

    IndexSet sorted = adjusted.ranking;
    std::sort(sorted.begin(), sorted.end());
    for (Index i = 0; i < 6; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
    CHECK(adjusted.ranking == IndexSet{3, 5, 0, 1, 2, 4});
}

TEST_CASE("adjusted_pvalues: rescaling never shrinks the statistic") {
    const SpectralModel model =
        build_factor_model(CorrelationMatrix(equicorrelation(10, 0.5)), 0.01, 2);
    Rng rng(12);
    ZStatistics z;
    z.z.resize(10);
    for (Index i = 0; i < 10; ++i) z.z[i] = rng.normal();
    RealizedFactors fit;
    fit.w_hat.resize(2);
    fit.w_hat << 0.4, -0.2;
    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);
    const Vector centered = z.z - model.loadings * fit.w_hat;
    for (Index i = 0; i < 10; ++i) {
        CHECK(std::abs(adjusted.adjusted_z[i]) >= std::abs(centered[i]) - 1e-15);
    }
}

TEST_SUITE("slow") {

TEST_CASE("adjusted_pvalues: null adjusted_z is marginally standard normal") {
    const Index p = 50;
    const SpectralModel model =
        build_factor_model(CorrelationMatrix(equicorrelation(p, 0.5)), 0.01, 1);
    const Matrix root =
        model.eigenvectors * model.eigenvalues.array().sqrt().matrix().asDiagonal();

    const int reps = 2000;
    std::vector<double> draws;
    draws.reserve(reps);
    Vector xi(p);
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(555, static_cast<std::uint64_t>(r)));
        for (Index i = 0; i < p; ++i) xi[i] = rng.normal();
        ZStatistics z;
        z.z = root * xi;
        RealizedFactors truth;
        truth.w_hat = xi.head(1);  // the realized factor
        const AdjustedResult adjusted = adjusted_pvalues(z, model, truth);
        draws.push_back(adjusted.adjusted_z[7]);
    }
    const double d = oracles::ks_statistic(draws, [](double x) { return normal_cdf(x); });
    CHECK(d < 0.03642);  // 1% critical value at n = 2000
}

}  // TEST_SUITE("slow")
