#include "pfa/adjust.hpp"
#include "pfa/comparators.hpp"
#include "pfa/control.hpp"
#include "pfa/errors.hpp"
#include "pfa/factors.hpp"
#include "pfa/fdp.hpp"
#include "pfa/normal.hpp"
#include "pfa/screening.hpp"
#include "pfa/sim.hpp"
#include "pfa/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace pfa;

namespace {

RealizedFactors fit_from_arrays(const Vector& z_sub, const Matrix& B_sub, bool lad) {
    return lad ? lad_fit(z_sub, B_sub) : ls_fit(z_sub, B_sub);
}

}  // namespace

PYBIND11_MODULE(pfa, m) {
    m.doc() = "Factor-adjusted false discovery proportion estimation for correlated z-tests";

    py::register_exception<Error>(m, "PfaError");

    py::class_<SpectralModel>(m, "SpectralModel")
        .def_readonly("eigenvalues", &SpectralModel::eigenvalues)
        .def_readonly("eigenvectors", &SpectralModel::eigenvectors)
        .def_readonly("k", &SpectralModel::k)
        .def_readonly("loadings", &SpectralModel::loadings)
        .def_readonly("standardizers", &SpectralModel::standardizers)
        .def("factor_variances", &SpectralModel::factor_variances);

    py::class_<RealizedFactors>(m, "RealizedFactors")
        .def_readonly("w_hat", &RealizedFactors::w_hat)
        .def_readonly("m_used", &RealizedFactors::m_used)
        .def_readonly("objective", &RealizedFactors::objective)
        .def_property_readonly("method", [](const RealizedFactors& f) {
            return f.method == FactorFitMethod::LAD ? "LAD" : "LS";
        });

    py::class_<FdpReport>(m, "FdpReport")
        .def_readonly("t", &FdpReport::t)
        .def_readonly("R", &FdpReport::rejections)
        .def_readonly("V_hat", &FdpReport::v_hat)
        .def_readonly("fdp_hat", &FdpReport::fdp_hat)
        .def_readonly("method", &FdpReport::method)
        .def_readonly("k_used", &FdpReport::k_used)
        .def_readonly("m_used", &FdpReport::m_used);

    py::class_<AdjustedResult>(m, "AdjustedResult")
        .def_readonly("adjusted_z", &AdjustedResult::adjusted_z)
        .def_readonly("adjusted_p", &AdjustedResult::adjusted_p)
        .def_readonly("ranking", &AdjustedResult::ranking);

    py::class_<ThresholdResult>(m, "ThresholdResult")
        .def_readonly("t_star", &ThresholdResult::t_star)
        .def_readonly("fdr_at_t", &ThresholdResult::fdr_at_t)
        .def_readonly("mc_se", &ThresholdResult::mc_se)
        .def_readonly("n_draws", &ThresholdResult::n_draws)
        .def_readonly("seed", &ThresholdResult::seed)
        .def_readonly("clamped", &ThresholdResult::clamped);

    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("normal_quantile", &normal_quantile, py::arg("q"));

    m.def(
        "build_factor_model",
        [](const Matrix& sigma, double epsilon, std::optional<int> k_override) {
            return build_factor_model(CorrelationMatrix(sigma), epsilon, k_override);
        },
        py::arg("sigma"), py::arg("epsilon") = 0.01, py::arg("k_override") = std::nullopt);

    m.def(
        "marginal_z",
        [](const Matrix& X, const Vector& y, double sigma) {
            const auto [z, corr] = marginal_z(Design{X, y, sigma});
            return py::make_tuple(z.z, corr.matrix());
        },
        py::arg("X"), py::arg("y"), py::arg("sigma"));

    m.def(
        "select_calibration_set",
        [](const Vector& z, double fraction) {
            return select_calibration_set(ZStatistics{z, std::nullopt}, fraction);
        },
        py::arg("z"), py::arg("fraction") = 0.90);

    m.def(
        "lad_fit",
        [](const Vector& z_sub, const Matrix& B_sub) { return fit_from_arrays(z_sub, B_sub, true); },
        py::arg("z_sub"), py::arg("B_sub"));
    m.def(
        "ls_fit",
        [](const Vector& z_sub, const Matrix& B_sub) { return fit_from_arrays(z_sub, B_sub, false); },
        py::arg("z_sub"), py::arg("B_sub"));

    m.def(
        "pvalues", [](const Vector& z) { return pvalues(ZStatistics{z, std::nullopt}); },
        py::arg("z"));
    m.def("count_rejections", &count_rejections, py::arg("pvals"), py::arg("t"));
    m.def(
        "limit_sum",
        [](const SpectralModel& model, const Vector& eta, double t,
           std::optional<IndexSet> subset) {
            return subset ? limit_sum(model, eta, t, *subset) : limit_sum(model, eta, t);
        },
        py::arg("model"), py::arg("eta"), py::arg("t"), py::arg("subset") = std::nullopt);

    m.def(
        "estimate_fdp",
        [](const Vector& z, const SpectralModel& model, const RealizedFactors& w_hat, double t) {
            return estimate_fdp(ZStatistics{z, std::nullopt}, model, w_hat, t);
        },
        py::arg("z"), py::arg("model"), py::arg("w_hat"), py::arg("t"));

    m.def(
        "true_fdp",
        [](const Vector& pvals, const std::vector<bool>& null_mask, double t) {
            const TrueFdp res = true_fdp(pvals, null_mask, t);
            return py::make_tuple(res.v, res.s, res.r, res.fdp);
        },
        py::arg("pvals"), py::arg("null_mask"), py::arg("t"));

    m.def(
        "adjusted_pvalues",
        [](const Vector& z, const SpectralModel& model, const RealizedFactors& w_hat) {
            return adjusted_pvalues(ZStatistics{z, std::nullopt}, model, w_hat);
        },
        py::arg("z"), py::arg("model"), py::arg("w_hat"));

    m.def("bh_rejections", &bh_rejections, py::arg("pvals"), py::arg("alpha"));
    m.def("storey_fdp", &storey_fdp, py::arg("pvals"), py::arg("t"), py::arg("p0_hat"));
    m.def("storey_p0_lambda", &storey_p0_lambda, py::arg("pvals"), py::arg("lambda") = 0.5);
    m.def("efron_a_hat", &efron_A_hat, py::arg("eta_hat"), py::arg("eta2_mean"), py::arg("p0"));
    m.def(
        "efron_fdp",
        [](double t, long rejections, double p0, double a_hat) {
            const EfronEstimate est = efron_fdp(t, rejections, p0, a_hat);
            return py::make_tuple(est.fdp, est.raw);
        },
        py::arg("t"), py::arg("rejections"), py::arg("p0"), py::arg("a_hat"));

    m.def(
        "fdr_expectation",
        [](const SpectralModel& model, long p1, double t, long n_draws, std::uint64_t seed) {
            return fdr_expectation(model, p1, t, McConfig{n_draws, seed, 1e-6});
        },
        py::arg("model"), py::arg("p1"), py::arg("t"), py::arg("n_draws") = 10000,
        py::arg("seed") = 0);
    m.def(
        "find_threshold",
        [](const SpectralModel& model, long p1, double alpha, long n_draws, std::uint64_t seed,
           double tolerance) {
            return find_threshold(model, p1, alpha, McConfig{n_draws, seed, tolerance});
        },
        py::arg("model"), py::arg("p1"), py::arg("alpha"), py::arg("n_draws") = 10000,
        py::arg("seed") = 0, py::arg("tolerance") = 1e-6);
    m.def(
        "variance_of_v",
        [](const SpectralModel& model, double t, long n_draws, std::uint64_t seed,
           std::optional<IndexSet> subset) {
            const McConfig mc{n_draws, seed, 1e-6};
            return subset ? variance_of_v(model, *subset, t, mc) : variance_of_v(model, t, mc);
        },
        py::arg("model"), py::arg("t"), py::arg("n_draws") = 10000, py::arg("seed") = 0,
        py::arg("subset") = std::nullopt);

    py::enum_<DgpStructure>(m, "DgpStructure")
        .value("EqualCorrelation", DgpStructure::EqualCorrelation)
        .value("FanSong", DgpStructure::FanSong)
        .value("IndependentCauchy", DgpStructure::IndependentCauchy)
        .value("ThreeFactor", DgpStructure::ThreeFactor)
        .value("TwoFactor", DgpStructure::TwoFactor)
        .value("NonlinearFactor", DgpStructure::NonlinearFactor);

    py::class_<DgpSpec>(m, "DgpSpec")
        .def(py::init<>())
        .def_readwrite("structure", &DgpSpec::structure)
        .def_readwrite("n", &DgpSpec::n)
        .def_readwrite("p", &DgpSpec::p)
        .def_readwrite("p1", &DgpSpec::p1)
        .def_readwrite("beta_lo", &DgpSpec::beta_lo)
        .def_readwrite("beta_hi", &DgpSpec::beta_hi)
        .def_readwrite("sigma", &DgpSpec::sigma)
        .def_readwrite("seed", &DgpSpec::seed);

    m.def("generate_design", &generate_design, py::arg("spec"));
    m.def(
        "build_mu",
        [](const DgpSpec& spec, const Matrix& X) {
            const auto [mu, mask] = build_mu(spec, X);
            return py::make_tuple(mu, mask);
        },
        py::arg("spec"), py::arg("X"));
    m.def(
        "sample_z",
        [](const Vector& mu, const Matrix& sigma, std::uint64_t seed) {
            return sample_z(mu, CorrelationMatrix(sigma), seed).z;
        },
        py::arg("mu"), py::arg("sigma"), py::arg("seed"));
    m.def("sample_correlation", &sample_correlation, py::arg("X"));
}
