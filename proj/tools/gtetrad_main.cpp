#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gtetrad/classical.hpp"
#include "gtetrad/dataset.hpp"
#include "gtetrad/errors.hpp"
#include "gtetrad/gt_test.hpp"
#include "gtetrad/report.hpp"
#include "gtetrad/simlab.hpp"

namespace {

using namespace gtetrad;

struct BridgeFlags {
    std::string basis_h;
    std::string basis_g;
    std::string instrument_basis;
    std::optional<double> lambda;

    void apply(GtConfig& config) const {
        if (!basis_h.empty()) {
            config.gmm_h.basis = BasisSpec::parse(basis_h);
            config.psmd_h.basis = BasisSpec::parse(basis_h);
        }
        if (!basis_g.empty()) {
            config.gmm_g.basis = BasisSpec::parse(basis_g);
            config.psmd_g.basis = BasisSpec::parse(basis_g);
        }
        if (!instrument_basis.empty()) {
            const BasisSpec spec = BasisSpec::parse(instrument_basis);
            config.gmm_h.instrument_basis = spec;
            config.gmm_g.instrument_basis = spec;
            config.psmd_h.instrument_basis = spec;
            config.psmd_g.instrument_basis = spec;
        }
        if (lambda.has_value()) {
            config.psmd_h.lambda = *lambda;
            config.psmd_g.lambda = *lambda;
        }
    }
};

struct TestArgs {
    std::string input;
    RoleSpec roles;
    std::string method = "all";
    double alpha = 0.05;
    BridgeFlags bridges;
    bool permutations = false;
    bool standardize_columns = false;
    std::string out = "-";
    std::string format = "json";
};

struct SimArgs {
    std::string setting;
    std::int64_t n = 1000;
    int reps = 1000;
    std::uint64_t seed = 20260814;
    std::string method = "all";
    double alpha = 0.05;
    int workers = 0;  // 0: use GTETRAD_WORKERS or 1
    BridgeFlags bridges;
    std::string out = "-";
    std::string format = "csv";
};

int workers_from_env() {
    const char* env = std::getenv("GTETRAD_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == nullptr || *end != '\0' || value < 1 || value > 4096) {
        throw ConfigError(
            "GTETRAD_WORKERS must be a positive integer, got '" +
            std::string(env) + "'");
    }
    return static_cast<int>(value);
}

void write_output(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + out + "'");
    file << text;
    if (!file) throw ConfigError("failed writing output file '" + out + "'");
}

std::string check_format(const std::string& format) {
    if (format != "json" && format != "csv") {
        throw ConfigError("unknown format '" + format +
                          "' (expected json or csv)");
    }
    return format;
}

std::vector<TestMethod> select_methods(const std::string& method) {
    if (method == "all") {
        return {TestMethod::ct, TestMethod::gt_gmm, TestMethod::gt_psmd};
    }
    return {parse_test_method(method)};
}

void require_gt_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > kGtAlphaMax) {
        throw ConfigError(
            "alpha must lie in (0, 0.215] for the generalized test; the "
            "chi-square-type threshold guarantees level control only there");
    }
}

void csv_report_row(std::string& out, const std::string& method,
                    const std::string& permutation, double statistic,
                    double p_value, bool reject, const std::string& error) {
    out += method;
    out += ',';
    out += permutation;
    out += ',';
    if (error.empty()) {
        out += format_number(statistic);
        out += ',';
        out += format_number(p_value);
        out += ',';
        out += reject ? "true" : "false";
    } else {
        out += ",,";
    }
    out += ',';
    // Errors may contain commas; quote the field.
    if (!error.empty()) {
        std::string quoted = "\"";
        for (char c : error) {
            quoted += c;
            if (c == '"') quoted += '"';
        }
        quoted += '"';
        out += quoted;
    }
    out += '\n';
}

int run_test(const TestArgs& args, bool sweep_only) {
    check_format(args.format);
    const std::vector<TestMethod> methods = select_methods(args.method);
    for (TestMethod method : methods) {
        if (method != TestMethod::ct) require_gt_alpha(args.alpha);
        if (sweep_only && method == TestMethod::ct && args.method != "all") {
            throw ConfigError(
                "the permutation sweep applies to the generalized tests "
                "(gt-gmm, gt-psmd), not ct");
        }
    }

    ObservationTable table = load_csv(args.input, args.roles);
    if (args.standardize_columns) table = standardize(table);

    Json bundle;
    bundle["kind"] = sweep_only ? "permutation-sweep" : "tetrad-test-report";
    bundle["input"] = args.input;
    bundle["n"] = static_cast<std::int64_t>(table.n());
    bundle["alpha"] = args.alpha;
    Json roles;
    roles["x"] = args.roles.x;
    roles["y"] = args.roles.y;
    roles["z"] = args.roles.z;
    roles["w"] = args.roles.w;
    roles["covariates"] = args.roles.covariates;
    bundle["roles"] = std::move(roles);

    std::string csv = "method,permutation,statistic,p_value,reject,error\n";
    Json results = Json::array();
    Json sweeps = Json::array();
    for (TestMethod method : methods) {
        if (method == TestMethod::ct) {
            if (sweep_only) continue;
            const CtReport report = classical_test(table, args.alpha);
            results.push_back(ct_report_json(report));
            csv_report_row(csv, "ct", "", report.statistic, report.p_value,
                           report.reject, "");
            continue;
        }
        const GtMethod gt_method = method == TestMethod::gt_gmm
                                       ? GtMethod::gmm
                                       : GtMethod::psmd;
        GtConfig config = GtConfig::analysis_default(gt_method);
        config.alpha = args.alpha;
        args.bridges.apply(config);
        if (!sweep_only) {
            const GtReport report = gt_test(table, config);
            results.push_back(gt_report_json(report));
            csv_report_row(csv, report.method, report.permutation, report.t_n,
                           report.p_value, report.reject, "");
        }
        if (args.permutations || sweep_only) {
            const std::vector<SweepEntry> entries =
                permutation_sweep(table, config);
            sweeps.push_back(sweep_json(gt_method_name(gt_method), entries));
            for (const SweepEntry& entry : entries) {
                if (entry.report.has_value()) {
                    csv_report_row(csv, gt_method_name(gt_method),
                                   entry.permutation.label(),
                                   entry.report->t_n, entry.report->p_value,
                                   entry.report->reject, "");
                } else {
                    csv_report_row(csv, gt_method_name(gt_method),
                                   entry.permutation.label(), 0.0, 0.0, false,
                                   entry.error);
                }
            }
        }
    }
    if (!sweep_only) bundle["results"] = std::move(results);
    if (!sweeps.empty()) bundle["sweeps"] = std::move(sweeps);

    write_output(args.format == "json" ? bundle.dump(2) + "\n" : csv,
                 args.out);
    return 0;
}

int run_simulate(const SimArgs& args) {
    check_format(args.format);
    if (args.n < 1) throw ConfigError("sample size must be at least 1");
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    const int workers = args.workers > 0 ? args.workers : workers_from_env();

    StudyOptions options;
    options.alpha = args.alpha;
    options.workers = workers;
    args.bridges.apply(options.gmm_config);
    args.bridges.apply(options.psmd_config);

    std::vector<std::string> settings;
    std::vector<TestMethod> methods;
    std::vector<Eigen::Index> sizes;
    if (args.setting == "table2") {
        settings = {"I", "II.a", "II.b", "III.a", "III.b"};
        methods = {TestMethod::ct, TestMethod::gt_gmm, TestMethod::gt_psmd};
        sizes = {500, 1000};
    } else {
        settings = {args.setting};
        methods = select_methods(args.method);
        sizes = {static_cast<Eigen::Index>(args.n)};
    }
    for (TestMethod method : methods) {
        if (method != TestMethod::ct) require_gt_alpha(args.alpha);
    }

    std::vector<PowerEstimate> estimates;
    for (const std::string& name : settings) {
        const SimSetting setting = SimSetting::preset(name);
        for (TestMethod method : methods) {
            for (Eigen::Index n : sizes) {
                estimates.push_back(power_study(setting, method, n, args.reps,
                                                args.seed, options));
            }
        }
    }

    write_output(args.format == "csv"
                     ? study_csv(estimates)
                     : study_json(estimates, args.alpha).dump(2) + "\n",
                 args.out);
    return 0;
}

void add_bridge_flags(CLI::App* cmd, BridgeFlags& flags, double& lambda_slot) {
    cmd->add_option("--basis-h", flags.basis_h,
                    "Basis for the W-argument bridge, e.g. poly:2 or pol:4");
    cmd->add_option("--basis-g", flags.basis_g,
                    "Basis for the Z-argument bridge");
    cmd->add_option("--instrument-basis", flags.instrument_basis,
                    "Instrument-side basis for both bridges");
    cmd->add_option("--lambda", lambda_slot,
                    "Penalty weight for the sieve estimator");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Tests of mutual independence of four observed variables given one "
        "latent factor: classical vanishing-tetrad test and generalized "
        "bridge-based tests, plus a Monte Carlo power lab"};
    app.require_subcommand(1);

    TestArgs test_args;
    SimArgs sim_args;
    double test_lambda = 0.0, sweep_lambda = 0.0, sim_lambda = 0.0;
    TestArgs sweep_args;
    sweep_args.method = "all";

    CLI::App* test_cmd =
        app.add_subcommand("test", "Run the tests on a CSV dataset");
    test_cmd->add_option("--input", test_args.input, "Input CSV path")
        ->required();
    test_cmd->add_option("--x", test_args.roles.x, "Column playing role X");
    test_cmd->add_option("--y", test_args.roles.y, "Column playing role Y");
    test_cmd->add_option("--z", test_args.roles.z, "Column playing role Z");
    test_cmd->add_option("--w", test_args.roles.w, "Column playing role W");
    test_cmd
        ->add_option("--covariates", test_args.roles.covariates,
                     "Covariate columns (comma separated)")
        ->delimiter(',');
    test_cmd->add_option("--method", test_args.method,
                         "ct, gt-gmm, gt-psmd, or all");
    test_cmd->add_option("--alpha", test_args.alpha, "Significance level");
    add_bridge_flags(test_cmd, test_args.bridges, test_lambda);
    test_cmd->add_flag("--permutations", test_args.permutations,
                       "Also run the 12-permutation sweep for gt methods");
    test_cmd->add_flag("--standardize", test_args.standardize_columns,
                       "Z-score all columns before testing");
    test_cmd->add_option("--out", test_args.out, "Output path ('-': stdout)");
    test_cmd->add_option("--format", test_args.format, "json or csv");

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Run the generalized test under all 12 role permutations");
    sweep_cmd->add_option("--input", sweep_args.input, "Input CSV path")
        ->required();
    sweep_cmd->add_option("--x", sweep_args.roles.x, "Column playing role X");
    sweep_cmd->add_option("--y", sweep_args.roles.y, "Column playing role Y");
    sweep_cmd->add_option("--z", sweep_args.roles.z, "Column playing role Z");
    sweep_cmd->add_option("--w", sweep_args.roles.w, "Column playing role W");
    sweep_cmd
        ->add_option("--covariates", sweep_args.roles.covariates,
                     "Covariate columns (comma separated)")
        ->delimiter(',');
    sweep_cmd->add_option("--method", sweep_args.method,
                          "gt-gmm, gt-psmd, or all");
    sweep_cmd->add_option("--alpha", sweep_args.alpha, "Significance level");
    add_bridge_flags(sweep_cmd, sweep_args.bridges, sweep_lambda);
    sweep_cmd->add_flag("--standardize", sweep_args.standardize_columns,
                        "Z-score all columns before testing");
    sweep_cmd->add_option("--out", sweep_args.out, "Output path ('-': stdout)");
    sweep_cmd->add_option("--format", sweep_args.format, "json or csv");

    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Monte Carlo rejection-rate study on a named setting");
    sim_cmd
        ->add_option("--setting", sim_args.setting,
                     "Preset (I, II.a, II.b, III.a, III.b, cov:*, "
                     "interaction[:b]) or the table2 macro")
        ->required();
    sim_cmd->add_option("--n", sim_args.n, "Sample size per replication");
    sim_cmd->add_option("--reps", sim_args.reps, "Replication count");
    sim_cmd->add_option("--seed", sim_args.seed, "Base seed");
    sim_cmd->add_option("--method", sim_args.method,
                        "ct, gt-gmm, gt-psmd, or all");
    sim_cmd->add_option("--alpha", sim_args.alpha, "Significance level");
    sim_cmd->add_option("--workers", sim_args.workers,
                        "Worker threads (default: GTETRAD_WORKERS or 1)");
    add_bridge_flags(sim_cmd, sim_args.bridges, sim_lambda);
    sim_cmd->add_option("--out", sim_args.out, "Output path ('-': stdout)");
    sim_cmd->add_option("--format", sim_args.format, "csv or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (test_cmd->count("--lambda") > 0) test_args.bridges.lambda = test_lambda;
    if (sweep_cmd->count("--lambda") > 0) {
        sweep_args.bridges.lambda = sweep_lambda;
    }
    if (sim_cmd->count("--lambda") > 0) sim_args.bridges.lambda = sim_lambda;

    try {
        if (test_cmd->parsed()) return run_test(test_args, false);
        if (sweep_cmd->parsed()) return run_test(sweep_args, true);
        if (sim_cmd->parsed()) return run_simulate(sim_args);
        throw ConfigError("no command given");
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return error.exit_code();
    } catch (const std::exception& error) {
        std::cerr << "internal error: " << error.what() << "\n";
        return kExitNumerical;
    }
}
