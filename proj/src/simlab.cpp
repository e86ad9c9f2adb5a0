#include "gtetrad/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "gtetrad/classical.hpp"
#include "gtetrad/errors.hpp"
#include "gtetrad/rng.hpp"

namespace gtetrad {

namespace {

// Shared structural constants: intercepts (alpha0, beta0, gamma0, eta0)
// and latent-factor loadings (alpha1, beta1, gamma1, eta1).
constexpr double kAlpha0 = 0.5, kBeta0 = -1.0, kGamma0 = 0.5, kEta0 = 1.0;
constexpr double kAlpha1 = 0.5, kBeta1 = 0.5, kGamma1 = 1.5, kEta1 = 1.0;

SimSetting make_main(const std::string& name, double alpha2, double beta2,
                     double delta) {
    SimSetting setting;
    setting.family = SimFamily::main_quadratic;
    setting.name = name;
    setting.alpha2 = alpha2;
    setting.beta2 = beta2;
    setting.delta = delta;
    return setting;
}

SimSetting make_covariate(const std::string& name, double alpha2, double beta2,
                          double delta) {
    SimSetting setting;
    setting.family = SimFamily::covariate;
    setting.name = name;
    setting.alpha2 = alpha2;
    setting.beta2 = beta2;
    setting.delta = delta;
    return setting;
}

}  // namespace

SimSetting SimSetting::preset(const std::string& name) {
    if (name == "I") return make_main(name, 0.0, 0.0, 0.0);
    if (name == "II.a") return make_main(name, 0.1, 0.2, 0.0);
    if (name == "II.b") return make_main(name, 0.3, 0.4, 0.0);
    if (name == "III.a") return make_main(name, 0.0, 0.0, 0.15);
    if (name == "III.b") return make_main(name, 0.0, 0.0, 0.3);
    if (name == "cov:I") return make_covariate(name, 0.0, 0.0, 0.0);
    if (name == "cov:II.a") return make_covariate(name, 0.1, 0.2, 0.0);
    if (name == "cov:II.b") return make_covariate(name, 0.3, 0.4, 0.0);
    if (name == "cov:III.a") return make_covariate(name, 0.0, 0.0, 0.3);
    if (name == "cov:III.b") return make_covariate(name, 0.0, 0.0, 0.5);
    if (name == "interaction" || name.rfind("interaction:", 0) == 0) {
        SimSetting setting;
        setting.family = SimFamily::interaction;
        setting.name = name;
        setting.beta12 = 0.5;
        if (name.size() >= 12 && name[11] == ':') {
            try {
                setting.beta12 = std::stod(name.substr(12));
            } catch (const std::exception&) {
                throw ConfigError("could not parse the interaction strength in '" +
                                  name + "'");
            }
        }
        return setting;
    }
    throw ConfigError(
        "unknown setting preset '" + name +
        "' (expected I, II.a, II.b, III.a, III.b, a cov: variant, or "
        "interaction[:strength])");
}

std::vector<std::string> SimSetting::preset_names() {
    return {"I",        "II.a",      "II.b",      "III.a",      "III.b",
            "cov:I",    "cov:II.a",  "cov:II.b",  "cov:III.a",  "cov:III.b",
            "interaction"};
}

bool SimSetting::null_holds() const {
    switch (family) {
        case SimFamily::main_quadratic:
        case SimFamily::covariate:
            return delta == 0.0;
        case SimFamily::interaction:
            return beta12 == 0.0;
    }
    return false;
}

ObservationTable generate(const SimSetting& setting, Eigen::Index n,
                          std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample size must be at least 1");
    RandomStream stream(seed);
    Eigen::VectorXd x(n), y(n), z(n), w(n);
    Eigen::VectorXd v;
    const bool with_v = setting.has_covariate();
    if (with_v) v.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double u = stream.normal();
        const double vj = with_v ? stream.normal() : 0.0;
        if (with_v) v(j) = vj;
        const double e1 = stream.normal();
        const double e2 = stream.normal();
        const double e3 = stream.normal();
        const double e4 = stream.normal();
        switch (setting.family) {
            case SimFamily::main_quadratic:
                x(j) = kAlpha0 + kAlpha1 * u + setting.alpha2 * u * u + e1;
                y(j) = kBeta0 + kBeta1 * u + setting.beta2 * u * u +
                       setting.delta * x(j) + e2;
                z(j) = kGamma0 + kGamma1 * u + e3;
                w(j) = kEta0 + kEta1 * u + e4;
                break;
            case SimFamily::covariate:
                x(j) = 0.5 + u + setting.alpha2 * u * u + 0.5 * vj + e1;
                y(j) = -1.0 + u + setting.beta2 * u * u + vj +
                       setting.delta * x(j) + e2;
                z(j) = 0.5 + u + vj + e3;
                w(j) = 1.0 + u + 0.5 * vj + e4;
                break;
            case SimFamily::interaction:
                x(j) = kAlpha0 + kAlpha1 * u + e1;
                y(j) = kBeta0 + kBeta1 * u + setting.beta12 * u * x(j) + e2;
                z(j) = kGamma0 + kGamma1 * u + e3;
                w(j) = kEta0 + kEta1 * u + e4;
                break;
        }
    }
    std::vector<std::string> covariate_names;
    std::vector<Eigen::VectorXd> covariates;
    if (with_v) {
        covariate_names.emplace_back("v");
        covariates.push_back(std::move(v));
    }
    return ObservationTable({"x", "y", "z", "w"},
                            {std::move(x), std::move(y), std::move(z),
                             std::move(w)},
                            covariate_names, covariates);
}

Eigen::VectorXd QuadraticBridge::evaluate(const Eigen::VectorXd& t) const {
    return (intercept + slope * t.array() + curvature * t.array().square())
        .matrix();
}

std::optional<AnalyticBridges> analytic_bridge(const SimSetting& setting) {
    const double mean_w = kEta0;
    const double mean_w2 = kEta0 * kEta0 + kEta1 * kEta1 + 1.0;
    const double mean_z = kGamma0;
    const double mean_z2 = kGamma0 * kGamma0 + kGamma1 * kGamma1 + 1.0;
    AnalyticBridges bridges;
    double mean_y = 0.0;
    switch (setting.family) {
        case SimFamily::main_quadratic: {
            if (setting.delta != 0.0) return std::nullopt;
            mean_y = kBeta0 + setting.beta2;
            bridges.h.slope =
                kBeta1 / kEta1 - 2.0 * setting.beta2 * kEta0 / (kEta1 * kEta1);
            bridges.h.curvature = setting.beta2 / (kEta1 * kEta1);
            bridges.g.slope = kBeta1 / kGamma1 -
                              2.0 * setting.beta2 * kGamma0 / (kGamma1 * kGamma1);
            bridges.g.curvature = setting.beta2 / (kGamma1 * kGamma1);
            break;
        }
        case SimFamily::interaction: {
            const double lead = kBeta1 + kAlpha0 * setting.beta12;
            mean_y = kBeta0 + kAlpha1 * setting.beta12;
            bridges.h.slope =
                (lead - 2.0 * kAlpha1 * setting.beta12 * kEta0 / kEta1) / kEta1;
            bridges.h.curvature = kAlpha1 * setting.beta12 / (kEta1 * kEta1);
            bridges.g.slope =
                (lead - 2.0 * kAlpha1 * setting.beta12 * kGamma0 / kGamma1) /
                kGamma1;
            bridges.g.curvature =
                kAlpha1 * setting.beta12 / (kGamma1 * kGamma1);
            break;
        }
        case SimFamily::covariate:
            return std::nullopt;
    }
    bridges.h.intercept =
        mean_y - bridges.h.slope * mean_w - bridges.h.curvature * mean_w2;
    bridges.g.intercept =
        mean_y - bridges.g.slope * mean_z - bridges.g.curvature * mean_z2;
    return bridges;
}

TestMethod parse_test_method(const std::string& text) {
    if (text == "ct") return TestMethod::ct;
    if (text == "gt-gmm") return TestMethod::gt_gmm;
    if (text == "gt-psmd") return TestMethod::gt_psmd;
    throw ConfigError("unknown test method '" + text +
                      "' (expected ct, gt-gmm, or gt-psmd)");
}

std::string test_method_name(TestMethod method) {
    switch (method) {
        case TestMethod::ct: return "ct";
        case TestMethod::gt_gmm: return "gt-gmm";
        case TestMethod::gt_psmd: return "gt-psmd";
    }
    return "ct";
}

PowerEstimate power_study(const SimSetting& setting, TestMethod method,
                          Eigen::Index n, int reps, std::uint64_t seed,
                          const StudyOptions& options) {
    if (reps < 1) throw ConfigError("replication count must be at least 1");
    if (options.workers < 1) {
        throw ConfigError("worker count must be at least 1");
    }

    // 0 = accept, 1 = reject, 2 = failed; indexed by replication so the
    // aggregate is identical for any worker count.
    std::vector<signed char> outcome(static_cast<std::size_t>(reps), 0);
    std::vector<std::string> message(static_cast<std::size_t>(reps));
    const auto run_replication = [&](int r) {
        try {
            const ObservationTable table =
                generate(setting, n, derive_seed(seed, static_cast<std::uint64_t>(r)));
            bool reject = false;
            switch (method) {
                case TestMethod::ct:
                    reject = classical_test(table, options.alpha).reject;
                    break;
                case TestMethod::gt_gmm: {
                    GtConfig config = options.gmm_config;
                    config.alpha = options.alpha;
                    reject = gt_test(table, config).reject;
                    break;
                }
                case TestMethod::gt_psmd: {
                    GtConfig config = options.psmd_config;
                    config.alpha = options.alpha;
                    reject = gt_test(table, config).reject;
                    break;
                }
            }
            outcome[static_cast<std::size_t>(r)] = reject ? 1 : 0;
        } catch (const std::exception& error) {
            outcome[static_cast<std::size_t>(r)] = 2;
            message[static_cast<std::size_t>(r)] = error.what();
        }
    };

    const int workers = std::min(options.workers, reps);
    if (workers == 1) {
        for (int r = 0; r < reps; ++r) run_replication(r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t]() {
                for (int r = t; r < reps; r += workers) run_replication(r);
            });
        }
        for (std::thread& thread : pool) thread.join();
    }

    int rejections = 0;
    int failures = 0;
    std::vector<std::string> distinct_failures;
    for (int r = 0; r < reps; ++r) {
        const auto idx = static_cast<std::size_t>(r);
        if (outcome[idx] == 1) ++rejections;
        if (outcome[idx] == 2) {
            ++failures;
            if (distinct_failures.size() < 3 &&
                std::find(distinct_failures.begin(), distinct_failures.end(),
                          message[idx]) == distinct_failures.end()) {
                distinct_failures.push_back(message[idx]);
            }
        }
    }
    // Failures are tolerable noise only below 1% of replications.
    if (failures > 0 && failures * 100 >= reps) {
        std::string detail;
        for (const std::string& text : distinct_failures) {
            detail += "\n  - " + text;
        }
        throw NumericalError(
            std::to_string(failures) + " of " + std::to_string(reps) +
            " replications failed (>= 1%); study aborted. Distinct errors:" +
            detail);
    }

    PowerEstimate estimate;
    estimate.setting = setting.name;
    estimate.method = test_method_name(method);
    estimate.n = n;
    estimate.replications = reps;
    estimate.seed = seed;
    estimate.failures = failures;
    estimate.failure_messages = std::move(distinct_failures);
    const int denominator = reps - failures;
    estimate.rejection_rate =
        static_cast<double>(rejections) / static_cast<double>(denominator);
    estimate.mc_se = std::sqrt(estimate.rejection_rate *
                               (1.0 - estimate.rejection_rate) /
                               static_cast<double>(denominator));
    return estimate;
}

}  // namespace gtetrad
