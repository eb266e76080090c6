#include "pfa/cli.hpp"

#include "pfa/adjust.hpp"
#include "pfa/comparators.hpp"
#include "pfa/control.hpp"
#include "pfa/errors.hpp"
#include "pfa/factors.hpp"
#include "pfa/fdp.hpp"
#include "pfa/io.hpp"
#include "pfa/screening.hpp"
#include "pfa/sim.hpp"
#include "pfa/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pfa::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct ModelFlags {
    double epsilon = 0.01;
    int k_override = -1;  // -1 means "use the epsilon rule"
    double fraction = 0.90;
    bool header = false;

    std::optional<int> k() const {
        return k_override >= 0 ? std::optional<int>(k_override) : std::nullopt;
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--epsilon", flags.epsilon,
                    "Factor-count rule threshold on the eigenvalue tail (default 0.01)");
    cmd->add_option("--k-override", flags.k_override,
                    "Use exactly k factors instead of the epsilon rule");
    cmd->add_option("--fraction", flags.fraction,
                    "Calibration fraction of smallest |z| used for the factor fit (default 0.90)");
    cmd->add_flag("--header", flags.header, "Input CSV files carry a header row");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        if (content.empty() || content.back() != '\n') std::cout << '\n';
    } else {
        io::write_text_atomic(out_path, content);
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    for (const std::string& part : split(text, ',')) {
        if (part.empty()) continue;
        out.push_back(std::stod(part));
    }
    if (out.empty()) {
        throw InvalidSpecError("no thresholds given");
    }
    return out;
}

MethodSet parse_methods(const std::string& text) {
    MethodSet set;
    set.pfa = false;
    for (const std::string& part : split(text, ',')) {
        if (part.empty()) continue;
        if (part == "pfa") set.pfa = true;
        else if (part == "storey") set.storey = true;
        else if (part == "efron") set.efron = true;
        else if (part == "bh") set.bh = true;
        else throw InvalidSpecError("unknown method: " + part);
    }
    return set;
}

void parse_beta(const std::string& text, double& lo, double& hi) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) {
        lo = hi = std::stod(parts[0]);
    } else if (parts.size() == 2) {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
    } else {
        throw InvalidSpecError("beta must be a value or lo:hi range, got " + text);
    }
}

// The pipeline from (z, Sigma) to a fitted factor realization; k = 0 skips
// the fit and leaves w_hat empty.
RealizedFactors fit_factors(const ZStatistics& z, const SpectralModel& model, double fraction) {
    RealizedFactors fit;
    fit.w_hat = Vector::Zero(model.k);
    if (model.k == 0) return fit;
    const IndexSet calib = select_calibration_set(z, fraction);
    Vector z_sub(static_cast<Index>(calib.size()));
    Matrix B_sub(static_cast<Index>(calib.size()), model.k);
    for (Index row = 0; row < static_cast<Index>(calib.size()); ++row) {
        z_sub[row] = z.z[calib[static_cast<std::size_t>(row)]];
        B_sub.row(row) = model.loadings.row(calib[static_cast<std::size_t>(row)]);
    }
    return lad_fit(z_sub, B_sub);
}

// ---------------------------------------------------------------------------
// Subcommand payloads
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string z_path, sigma_path, out_path, per_hypothesis_path;
    double t = 0.0;
    double storey_lambda = 0.5;
    ModelFlags model;
};

int run_estimate(const EstimateArgs& args) {
    ZStatistics z;
    z.z = io::read_vector_csv(args.z_path, args.model.header);
    const CorrelationMatrix sigma(io::read_matrix_csv(args.sigma_path, args.model.header));
    if (sigma.dim() != z.z.size()) {
        throw DimensionMismatchError("z and correlation matrix dimensions differ");
    }
    const SpectralModel model = build_factor_model(sigma, args.model.epsilon, args.model.k());
    const RealizedFactors fit = fit_factors(z, model, args.model.fraction);
    const FdpReport report = estimate_fdp(z, model, fit, args.t);
    const Vector pvals = pvalues(z);

    const double p0_lambda = storey_p0_lambda(pvals, args.storey_lambda);
    const EfronEstimate efron = efron_fdp(
        args.t, report.rejections, static_cast<double>(model.dim()),
        efron_A_hat(model.loadings * fit.w_hat, model.factor_variances(),
                    static_cast<long>(model.dim())));

    json out{
        {"t", report.t},
        {"R", report.rejections},
        {"V_hat", report.v_hat},
        {"fdp_hat", report.fdp_hat},
        {"method", report.method},
        {"k_used", report.k_used},
        {"m_used", report.m_used},
        {"comparators",
         {{"storey",
           {{"tag", "Storey(lambda)"},
            {"lambda", args.storey_lambda},
            {"p0_hat", p0_lambda},
            {"fdp_hat", storey_fdp(pvals, args.t, p0_lambda)}}},
          {"efron",
           {{"tag", "Efron-via-PFA"},
            {"fdp_hat", efron.fdp},
            {"raw", efron.raw}}}}},
    };
    emit(args.out_path, out.dump(2));

    if (!args.per_hypothesis_path.empty()) {
        const Vector eta = model.loadings * fit.w_hat;
        std::ostringstream csv;
        csv << "index,z,p,eta_hat,rejected\n";
        for (Index i = 0; i < z.z.size(); ++i) {
            csv << (i + 1) << ',' << io::format_double(z.z[i]) << ','
                << io::format_double(pvals[i]) << ',' << io::format_double(eta[i]) << ','
                << (pvals[i] <= args.t ? 1 : 0) << '\n';
        }
        io::write_text_atomic(args.per_hypothesis_path, csv.str());
    }
    return 0;
}

struct AdjustArgs {
    std::string z_path, sigma_path, out_path;
    ModelFlags model;
};

int run_adjust(const AdjustArgs& args) {
    ZStatistics z;
    z.z = io::read_vector_csv(args.z_path, args.model.header);
    const CorrelationMatrix sigma(io::read_matrix_csv(args.sigma_path, args.model.header));
    if (sigma.dim() != z.z.size()) {
        throw DimensionMismatchError("z and correlation matrix dimensions differ");
    }
    const SpectralModel model = build_factor_model(sigma, args.model.epsilon, args.model.k());
    const RealizedFactors fit = fit_factors(z, model, args.model.fraction);
    const AdjustedResult adjusted = adjusted_pvalues(z, model, fit);
    const Vector pvals = pvalues(z);

    std::vector<Index> rank(static_cast<std::size_t>(z.z.size()));
    for (Index r = 0; r < static_cast<Index>(adjusted.ranking.size()); ++r) {
        rank[static_cast<std::size_t>(adjusted.ranking[static_cast<std::size_t>(r)])] = r + 1;
    }
    std::ostringstream csv;
    csv << "index,z,adjusted_z,p,adjusted_p,rank\n";
    for (Index i = 0; i < z.z.size(); ++i) {
        csv << (i + 1) << ',' << io::format_double(z.z[i]) << ','
            << io::format_double(adjusted.adjusted_z[i]) << ',' << io::format_double(pvals[i])
            << ',' << io::format_double(adjusted.adjusted_p[i]) << ','
            << rank[static_cast<std::size_t>(i)] << '\n';
    }
    emit(args.out_path, csv.str());
    return 0;
}

struct ControlArgs {
    std::string sigma_path, out_path;
    double alpha = 0.0;
    long p1 = 0;
    McConfig mc;
    ModelFlags model;
};

int run_control(const ControlArgs& args) {
    const CorrelationMatrix sigma(io::read_matrix_csv(args.sigma_path, args.model.header));
    const SpectralModel model = build_factor_model(sigma, args.model.epsilon, args.model.k());
    const ThresholdResult res = find_threshold(model, args.p1, args.alpha, args.mc);
    json out{
        {"t_star", res.t_star},   {"fdr_at_t", res.fdr_at_t}, {"mc_se", res.mc_se},
        {"n_draws", res.n_draws}, {"seed", res.seed},         {"clamped", res.clamped},
    };
    emit(args.out_path, out.dump(2));
    return 0;
}

struct VarianceArgs {
    std::string sigma_path, out_path;
    double t = 0.0;
    McConfig mc;
    ModelFlags model;
};

int run_variance(const VarianceArgs& args) {
    const CorrelationMatrix sigma(io::read_matrix_csv(args.sigma_path, args.model.header));
    const SpectralModel model = build_factor_model(sigma, args.model.epsilon, args.model.k());
    const double variance = variance_of_v(model, args.t, args.mc);
    json out{
        {"variance", variance},
        {"t", args.t},
        {"n_draws", args.mc.n_draws},
        {"seed", args.mc.seed},
    };
    emit(args.out_path, out.dump(2));
    return 0;
}

struct ScreenArgs {
    std::string x_path, y_path, out_z_path, out_sigma_path;
    double sigma = 0.0;
    bool header = false;
};

int run_screen(const ScreenArgs& args) {
    Design design;
    design.X = io::read_matrix_csv(args.x_path, args.header);
    design.y = io::read_vector_csv(args.y_path, args.header);
    design.sigma = args.sigma;
    const auto [z, corr] = marginal_z(design);
    io::write_vector_csv(args.out_z_path, z.z);
    io::write_matrix_csv(args.out_sigma_path, corr.matrix());
    return 0;
}

struct SimulateArgs {
    std::string structure = "TwoFactor";
    int n = 100;
    int p = 2000;
    int p1 = 10;
    std::string beta = "1";
    double sigma = 2.0;
    std::uint64_t seed = 0;
    int replicates = 100;
    std::string thresholds = "0.01";
    std::string methods = "pfa";
    double bh_alpha = 0.05;
    std::string out_csv, out_summary;
    ModelFlags model;
};

int run_simulate(const SimulateArgs& args) {
    DgpSpec spec;
    spec.structure = dgp_structure_from_name(args.structure);
    spec.n = args.n;
    spec.p = args.p;
    spec.p1 = args.p1;
    parse_beta(args.beta, spec.beta_lo, spec.beta_hi);
    spec.sigma = args.sigma;
    spec.seed = args.seed;

    ExperimentOptions options;
    options.epsilon = args.model.epsilon;
    options.k_override = args.model.k();
    options.fraction = args.model.fraction;
    options.methods = parse_methods(args.methods);
    options.bh_alpha = args.bh_alpha;

    const std::vector<double> thresholds = parse_thresholds(args.thresholds);
    const ExperimentResult result = run_experiment(spec, thresholds, options, args.replicates);

    if (!args.out_csv.empty()) {
        std::ostringstream csv;
        csv << "replicate,seed,t,method,estimate,true_fdp,V,S,R,w_err\n";
        for (std::size_t rep = 0; rep < result.replicates.size(); ++rep) {
            const SimReplicate& record = result.replicates[rep];
            for (const ThresholdRecord& row : record.records) {
                auto line = [&](const std::string& method, double estimate) {
                    csv << rep << ',' << record.seed << ',' << io::format_double(row.t) << ','
                        << method << ',' << io::format_double(estimate) << ','
                        << io::format_double(row.true_fdp) << ',' << row.v << ',' << row.s << ','
                        << row.r << ',' << io::format_double(record.w_err) << '\n';
                };
                line("fdp_a", row.fdp_a);
                for (const auto& [name, value] : row.estimates) line(name, value);
            }
        }
        io::write_text_atomic(args.out_csv, csv.str());
    }

    json summary{
        {"structure", dgp_structure_name(spec.structure)},
        {"n", spec.n},
        {"p", spec.p},
        {"p1", spec.p1},
        {"beta_lo", spec.beta_lo},
        {"beta_hi", spec.beta_hi},
        {"sigma", spec.sigma},
        {"seed", spec.seed},
        {"replicates", args.replicates},
        {"k_used", result.k_used},
        {"thresholds", json::array()},
    };
    for (const ThresholdSummary& ts : summarize(result)) {
        json methods = json::object();
        for (const auto& [name, ms] : ts.methods) {
            methods[name] = {{"mean", ms.mean}, {"sd", ms.sd}, {"mean_abs_re", ms.mean_abs_re}};
        }
        summary["thresholds"].push_back({
            {"t", ts.t},
            {"true_mean", ts.true_mean},
            {"true_sd", ts.true_sd},
            {"var_v", ts.var_v},
            {"fdp_a_mean", ts.fdp_a_mean},
            {"fdp_a_sd", ts.fdp_a_sd},
            {"tv_fdp_vs_a", ts.tv_fdp_vs_a},
            {"mean_abs_diff_a", ts.mean_abs_diff_a},
            {"methods", methods},
        });
    }
    emit(args.out_summary, summary.dump(2));
    return 0;
}

// ---------------------------------------------------------------------------
// Argument plumbing
// ---------------------------------------------------------------------------

// Config files are key=value lines whose keys match the long option names.
// Values from the file override anything given on the command line.
std::vector<std::string> config_overrides(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    std::vector<std::string> extra;
    if (config_path.empty()) return extra;

    std::ifstream in(config_path);
    if (!in) {
        throw IoError("cannot open config file " + config_path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        trim(key);
        trim(value);
        if (key.empty() || key == "config") continue;
        extra.push_back("--" + key + "=" + value);
    }
    return extra;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Factor-adjusted false discovery proportion estimation for correlated z-tests"};
    app.set_version_flag("--version", std::string("pfa ") + kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_placeholder;

    EstimateArgs estimate;
    CLI::App* cmd_estimate =
        app.add_subcommand("estimate", "Estimate realized FDP at a p-value threshold");
    cmd_estimate->add_option("--z", estimate.z_path, "z statistics CSV (one per row)")->required();
    cmd_estimate->add_option("--sigma-matrix", estimate.sigma_path, "correlation matrix CSV")
        ->required();
    cmd_estimate->add_option("--t", estimate.t, "p-value threshold in (0,1)")->required();
    cmd_estimate->add_option("--storey-lambda", estimate.storey_lambda,
                             "lambda for the Storey comparator (default 0.5)");
    cmd_estimate->add_option("--out", estimate.out_path, "report JSON path (default stdout)");
    cmd_estimate->add_option("--per-hypothesis", estimate.per_hypothesis_path,
                             "per-hypothesis CSV path");
    add_model_flags(cmd_estimate, estimate.model);
    cmd_estimate->add_option("--config", config_placeholder, "key=value overrides");

    AdjustArgs adjust;
    CLI::App* cmd_adjust =
        app.add_subcommand("adjust", "Dependence-adjusted p-values and ranking");
    cmd_adjust->add_option("--z", adjust.z_path, "z statistics CSV")->required();
    cmd_adjust->add_option("--sigma-matrix", adjust.sigma_path, "correlation matrix CSV")
        ->required();
    cmd_adjust->add_option("--out", adjust.out_path, "per-hypothesis CSV path (default stdout)");
    add_model_flags(cmd_adjust, adjust.model);
    cmd_adjust->add_option("--config", config_placeholder, "key=value overrides");

    ControlArgs control;
    CLI::App* cmd_control =
        app.add_subcommand("control", "Solve for the threshold meeting a target FDR");
    cmd_control->add_option("--sigma-matrix", control.sigma_path, "correlation matrix CSV")
        ->required();
    cmd_control->add_option("--alpha", control.alpha, "target FDR in (0,1)")->required();
    cmd_control->add_option("--p1", control.p1, "number of false nulls")->required();
    cmd_control->add_option("--n-draws", control.mc.n_draws, "Monte-Carlo draws (default 10000)");
    cmd_control->add_option("--seed", control.mc.seed, "RNG seed")->required();
    cmd_control->add_option("--tolerance", control.mc.tolerance,
                            "bisection resolution on t (default 1e-6)");
    cmd_control->add_option("--out", control.out_path, "result JSON path (default stdout)");
    add_model_flags(cmd_control, control.model);
    cmd_control->add_option("--config", config_placeholder, "key=value overrides");

    VarianceArgs variance;
    CLI::App* cmd_variance = app.add_subcommand(
        "variance", "Monte-Carlo variance of the false-discovery count expression");
    cmd_variance->add_option("--sigma-matrix", variance.sigma_path, "correlation matrix CSV")
        ->required();
    cmd_variance->add_option("--t", variance.t, "p-value threshold in (0,1)")->required();
    cmd_variance->add_option("--n-draws", variance.mc.n_draws, "Monte-Carlo draws");
    cmd_variance->add_option("--seed", variance.mc.seed, "RNG seed")->required();
    cmd_variance->add_option("--out", variance.out_path, "result JSON path (default stdout)");
    add_model_flags(cmd_variance, variance.model);
    cmd_variance->add_option("--config", config_placeholder, "key=value overrides");

    SimulateArgs simulate;
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Replicated experiments over a dependence structure");
    cmd_simulate->add_option("--structure", simulate.structure,
                             "EqualCorrelation|FanSong|IndependentCauchy|ThreeFactor|TwoFactor|"
                             "NonlinearFactor");
    cmd_simulate->add_option("--n", simulate.n, "sample count (default 100)");
    cmd_simulate->add_option("--p", simulate.p, "test count (default 2000)");
    cmd_simulate->add_option("--p1", simulate.p1, "false-null count (default 10)");
    cmd_simulate->add_option("--beta", simulate.beta, "signal magnitude, or lo:hi for uniform");
    cmd_simulate->add_option("--sigma", simulate.sigma, "noise standard deviation (default 2)");
    cmd_simulate->add_option("--seed", simulate.seed, "RNG seed")->required();
    cmd_simulate->add_option("--replicates", simulate.replicates, "replicate count (default 100)");
    cmd_simulate->add_option("--thresholds", simulate.thresholds, "comma-separated thresholds");
    cmd_simulate->add_option("--methods", simulate.methods,
                             "comma-separated subset of pfa,storey,efron,bh");
    cmd_simulate->add_option("--bh-alpha", simulate.bh_alpha, "BH level (default 0.05)");
    cmd_simulate->add_option("--out-csv", simulate.out_csv, "replicate CSV path");
    cmd_simulate->add_option("--out-summary", simulate.out_summary,
                             "summary JSON path (default stdout)");
    add_model_flags(cmd_simulate, simulate.model);
    cmd_simulate->add_option("--config", config_placeholder, "key=value overrides");

    ScreenArgs screen;
    CLI::App* cmd_screen = app.add_subcommand(
        "screen", "Marginal-regression z statistics and correlation matrix from raw data");
    cmd_screen->add_option("--x", screen.x_path, "design matrix CSV (n rows, p columns)")
        ->required();
    cmd_screen->add_option("--y", screen.y_path, "response CSV (n rows)")->required();
    cmd_screen->add_option("--sigma", screen.sigma, "known noise standard deviation")->required();
    cmd_screen->add_option("--out-z", screen.out_z_path, "output z CSV path")->required();
    cmd_screen->add_option("--out-sigma", screen.out_sigma_path, "output correlation CSV path")
        ->required();
    cmd_screen->add_flag("--header", screen.header, "input CSV files carry a header row");
    cmd_screen->add_option("--config", config_placeholder, "key=value overrides");

    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    try {
        for (const std::string& extra : config_overrides(args)) args.push_back(extra);
        // CLI11 consumes reversed arguments.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << '\n';
        return 2;
    }

    try {
        if (cmd_estimate->parsed()) return run_estimate(estimate);
        if (cmd_adjust->parsed()) return run_adjust(adjust);
        if (cmd_control->parsed()) return run_control(control);
        if (cmd_variance->parsed()) return run_variance(variance);
        if (cmd_simulate->parsed()) return run_simulate(simulate);
        if (cmd_screen->parsed()) return run_screen(screen);
    } catch (const Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace pfa::cli
