#include "pfa/normal.hpp"

#include "pfa/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfa;

namespace {

// 40-digit reference values (mpmath).
struct Ref {
    double x;
    double phi;
};
constexpr Ref kRefs[] = {
    {0.25, 0.5987063256829237242},   {1.0, 0.8413447460685429486},
    {2.0, 0.9772498680518207928},    {-1.0, 0.1586552539314570514},
    {-2.0, 0.02275013194817920720},  {-3.0, 1.349898031630094527e-3},
    {-5.0, 2.866515718791939117e-7}, {-8.0, 6.220960574271784124e-16},
    {-12.0, 1.776482112077678998e-33}, {-20.0, 2.753624118606233695e-89},
    {-37.0, 5.725571222524576823e-300},
};

}  // namespace

TEST_CASE("normal_cdf matches published references") {
    CHECK(normal_cdf(0.0) == 0.5);
    for (const Ref& ref : kRefs) {
        CHECK(std::abs(normal_cdf(ref.x) - ref.phi) <= 1e-13 * ref.phi);
    }
}

TEST_CASE("series/continued-fraction oracle agrees with references") {
    for (const Ref& ref : kRefs) {
        const long double value = oracles::normal_cdf_oracle(ref.x);
        CHECK(std::abs(static_cast<double>(value) - ref.phi) <= 1e-15 * ref.phi);
    }
}

TEST_CASE("normal_cdf vs independent oracle across [-8, 8]") {
    for (double x = -8.0; x <= 8.0 + 1e-9; x += 0.25) {
        const long double expected = oracles::normal_cdf_oracle(x);
        const double got = normal_cdf(x);
        CHECK(std::abs(got - static_cast<double>(expected)) <=
              1e-13 * static_cast<double>(expected));
    }
    // The op example pins Phi(1) explicitly.
    CHECK(std::abs(normal_cdf(1.0) - static_cast<double>(oracles::normal_cdf_oracle(1.0))) <=
          1e-13);
}

TEST_CASE("normal_quantile round-trips through the CDF") {
    CHECK(normal_quantile(0.5) == 0.0);
    const double qs[] = {1e-300, 1e-100, 1e-12, 1e-4, 0.0025, 0.025,
                         0.3,    0.5,    0.7,   0.975, 0.999, 1.0 - 1e-12};
    for (double q : qs) {
        const double z = normal_quantile(q);
        CHECK(std::abs(normal_cdf(z) - q) <= 1e-10 * std::max(q, 1e-6));
    }
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054236).epsilon(1e-13));
    // Round trip from the quantile side.
    CHECK(std::abs(normal_cdf(normal_quantile(0.025)) - 0.025) <= 1e-12);
}

TEST_CASE("normal_quantile rejects arguments outside (0,1)") {
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(-0.3), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.7), DomainError);
}

TEST_CASE("normal_pdf basics") {
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014326779).epsilon(1e-15));
    CHECK(normal_pdf(2.807033768343804117) ==
          doctest::Approx(0.007760893408008994716).epsilon(1e-12));
}
