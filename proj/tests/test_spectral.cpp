#include "pfa/spectral.hpp"

#include "pfa/errors.hpp"
#include "pfa/rng.hpp"
#include "pfa/screening.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace pfa;

namespace {

Matrix equicorrelation(Index p, double rho) {
    Matrix m = Matrix::Constant(p, p, rho);
    m.diagonal().setOnes();
    return m;
}

Matrix random_gaussian(Index n, Index p, std::uint64_t seed) {
    Rng rng(seed);
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

}  // namespace

TEST_CASE("eigendecompose: 2x2 identity") {
    const CorrelationMatrix sigma(Matrix::Identity(2, 2));
    const Eigendecomposition decomp = eigendecompose(sigma);
    CHECK(decomp.values[0] == 1.0);
    CHECK(decomp.values[1] == 1.0);
    // The eigenspace is fully degenerate, so the basis is the identity up to
    // column order; the sign convention makes every pivot +1.
    for (Index j = 0; j < 2; ++j) {
        Index peak;
        CHECK(decomp.vectors.col(j).cwiseAbs().maxCoeff(&peak) == 1.0);
        CHECK(decomp.vectors(peak, j) == 1.0);
        CHECK(decomp.vectors.col(j).cwiseAbs().sum() == 1.0);
    }
    CHECK((decomp.vectors * decomp.vectors.transpose() - Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
}

TEST_CASE("eigendecompose: 2x2 equicorrelation") {
    const CorrelationMatrix sigma(equicorrelation(2, 0.5));
    const Eigendecomposition decomp = eigendecompose(sigma);
    CHECK(decomp.values[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(decomp.values[1] == doctest::Approx(0.5).epsilon(1e-14));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(decomp.vectors(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
    CHECK(decomp.vectors(1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
    // Tie on magnitudes: the lower index gets the positive sign.
    CHECK(decomp.vectors(0, 1) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
    CHECK(decomp.vectors(1, 1) == doctest::Approx(-inv_sqrt2).epsilon(1e-14));
}

TEST_CASE("eigendecompose: centering-induced rank loss matches elimination oracle") {
    const Matrix X = random_gaussian(3, 5, 42);
    const CorrelationMatrix sigma(sample_correlation(X));
    const Eigendecomposition decomp = eigendecompose(sigma);

    Matrix centered = X.rowwise() - X.colwise().mean();
    const int rank = oracles::rank_by_elimination(centered);
    CHECK(rank == 2);
    int nonzero = 0;
    for (Index i = 0; i < 5; ++i) {
        if (decomp.values[i] > 1e-8) ++nonzero;
    }
    CHECK(nonzero == rank);
}

TEST_CASE("eigendecompose: input validation") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(0, 1) = 0.2;  // not symmetric
    CHECK_THROWS_AS(CorrelationMatrix{bad}, NotSymmetricError);

    Matrix diag = Matrix::Identity(3, 3);
    diag(1, 1) = 1.5;
    CHECK_THROWS_AS(CorrelationMatrix{diag}, NotUnitDiagonalError);

    // Symmetric, unit diagonal, but eigenvalue 1 + 2*(-0.9) = -0.8.
    const CorrelationMatrix indefinite(equicorrelation(3, -0.9));
    CHECK_THROWS_AS(eigendecompose(indefinite), IndefiniteError);
}

TEST_CASE("select_num_factors: worked examples") {
    Vector lambda1(4);
    lambda1 << 4, 0, 0, 0;
    CHECK(select_num_factors(lambda1, 0.01) == 1);

    Vector lambda2(4);
    lambda2 << 2.5, 0.5, 0.5, 0.5;
    // k=0: sqrt(6.25+0.75)/4 = 0.6614 >= 0.25; k=1: sqrt(0.75)/4 = 0.2165 < 0.25.
    CHECK(select_num_factors(lambda2, 0.25) == 1);

    const Vector identity_spectrum = Vector::Ones(4);
    CHECK(select_num_factors(identity_spectrum, 0.01) == 4);

    CHECK_THROWS_AS(select_num_factors(lambda1, 0.0), InvalidEpsilonError);
    CHECK_THROWS_AS(select_num_factors(lambda1, 1.0), InvalidEpsilonError);
}

TEST_CASE("select_num_factors is nonincreasing in epsilon") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Vector lambda(12);
        for (Index i = 0; i < 12; ++i) lambda[i] = std::abs(rng.normal()) + 0.01;
        std::sort(lambda.data(), lambda.data() + 12, std::greater<double>());
        int prev = 13;
        for (double eps : {0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
            const int k = select_num_factors(lambda, eps);
            CHECK(k <= prev);
            prev = k;
        }
    }
}

TEST_CASE("build_factor_model: 2x2 equicorrelation closed form") {
    const CorrelationMatrix sigma(equicorrelation(2, 0.5));
    const SpectralModel model = build_factor_model(sigma, 0.01, 1);
    CHECK(model.k == 1);
    for (Index i = 0; i < 2; ++i) {
        CHECK(model.loadings(i, 0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-13));
        CHECK(model.standardizers[i] == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("build_factor_model: k = 0 leaves unit standardizers") {
    const CorrelationMatrix sigma(equicorrelation(4, 0.3));
    const SpectralModel model = build_factor_model(sigma, 0.01, 0);
    CHECK(model.k == 0);
    CHECK(model.loadings.cols() == 0);
    for (Index i = 0; i < 4; ++i) {
        CHECK(model.standardizers[i] == 1.0);
    }
}

TEST_CASE("build_factor_model: p = 500 equicorrelation approaches the closed form") {
    const Index p = 500;
    const CorrelationMatrix sigma(equicorrelation(p, 0.5));
    const SpectralModel model = build_factor_model(sigma, 0.01, 1);

    const double lambda1 = 1.0 + 499.0 * 0.5;
    const double b_expected = std::sqrt(lambda1 / 500.0);
    const double a_expected = std::sqrt(500.0 / (499.0 * 0.5));
    for (Index i = 0; i < p; ++i) {
        CHECK(model.loadings(i, 0) == doctest::Approx(b_expected).epsilon(1e-10));
        CHECK(model.standardizers[i] == doctest::Approx(a_expected).epsilon(1e-10));
    }
    // Example-1 limits: b -> sqrt(rho), a -> (1-rho)^(-1/2); the finite-p gap
    // at p = 500 is just over 1e-3 for a and just under for b.
    CHECK(std::abs(model.loadings(0, 0) - std::sqrt(0.5)) / std::sqrt(0.5) < 1.1e-3);
    CHECK(std::abs(model.standardizers[0] - std::sqrt(2.0)) / std::sqrt(2.0) < 1.1e-3);
}

TEST_CASE("spectral invariants on random PSD correlation inputs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Matrix X = random_gaussian(60, 20, seed);
        const CorrelationMatrix sigma(sample_correlation(X));
        const Index p = sigma.dim();
        const SpectralModel model = build_factor_model(sigma, 0.01, 5);

        // Trace preservation.
        CHECK(std::abs(model.eigenvalues.sum() - static_cast<double>(p)) <=
              1e-6 * static_cast<double>(p));

        // Orthonormality.
        const Matrix gram = model.eigenvectors.transpose() * model.eigenvectors;
        CHECK((gram - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() <= 1e-8);

        // Full reconstruction and the split Sigma = B B^T + A.
        Matrix reconstructed = Matrix::Zero(p, p);
        for (Index i = 0; i < p; ++i) {
            reconstructed += model.eigenvalues[i] * model.eigenvectors.col(i) *
                             model.eigenvectors.col(i).transpose();
        }
        CHECK((sigma.matrix() - reconstructed).cwiseAbs().maxCoeff() <= 1e-8);

        Matrix tail = Matrix::Zero(p, p);
        double tail_sq = 0.0;
        for (Index i = model.k; i < p; ++i) {
            tail += model.eigenvalues[i] * model.eigenvectors.col(i) *
                    model.eigenvectors.col(i).transpose();
            tail_sq += model.eigenvalues[i] * model.eigenvalues[i];
        }
        const Matrix split = model.loadings * model.loadings.transpose() + tail;
        CHECK((sigma.matrix() - split).cwiseAbs().maxCoeff() <= 1e-8);

        // Frobenius identity for the residual.
        CHECK(tail.squaredNorm() == doctest::Approx(tail_sq).epsilon(1e-6));

        // Loadings never exceed unit variance; standardizers never dip below 1.
        for (Index i = 0; i < p; ++i) {
            CHECK(model.loadings.row(i).squaredNorm() <= 1.0 + 1e-10);
            CHECK(model.standardizers[i] >= 1.0 - 1e-10);
        }
    }
}

TEST_CASE("build_factor_model is bitwise deterministic") {
    const Matrix X = random_gaussian(40, 15, 99);
    const CorrelationMatrix sigma(sample_correlation(X));
    const SpectralModel first = build_factor_model(sigma, 0.01);
    const SpectralModel second = build_factor_model(sigma, 0.01);
    CHECK(first.k == second.k);
    CHECK(std::memcmp(first.eigenvalues.data(), second.eigenvalues.data(),
                      sizeof(double) * static_cast<std::size_t>(first.eigenvalues.size())) == 0);
    CHECK(std::memcmp(first.eigenvectors.data(), second.eigenvectors.data(),
                      sizeof(double) * static_cast<std::size_t>(first.eigenvectors.size())) == 0);
    CHECK(std::memcmp(first.standardizers.data(), second.standardizers.data(),
                      sizeof(double) * static_cast<std::size_t>(first.standardizers.size())) == 0);
}
