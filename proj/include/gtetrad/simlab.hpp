#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtetrad/dataset.hpp"
#include "gtetrad/gt_test.hpp"

namespace gtetrad {

enum class SimFamily { main_quadratic, covariate, interaction };

// A named data-generating process. The three families share Gaussian
// exogenous inputs and differ in the structural equations:
//   main:        X = 0.5 + 0.5U + a2*U^2 + e1,  Y = -1 + 0.5U + b2*U^2 + dX + e2,
//                Z = 0.5 + 1.5U + e3,           W = 1 + U + e4
//   covariate:   X = 0.5 + U + a2*U^2 + 0.5V + e1, Y = -1 + U + b2*U^2 + V + dX + e2,
//                Z = 0.5 + U + V + e3,             W = 1 + U + 0.5V + e4
//   interaction: X = 0.5 + 0.5U + e1,  Y = -1 + 0.5U + b12*U*X + e2,
//                Z = 0.5 + 1.5U + e3,  W = 1 + U + e4
struct SimSetting {
    SimFamily family = SimFamily::main_quadratic;
    std::string name = "I";
    double alpha2 = 0.0;
    double beta2 = 0.0;
    double delta = 0.0;
    double beta12 = 0.0;

    // Presets: "I", "II.a", "II.b", "III.a", "III.b" (main family),
    // "cov:<same>" (covariate family), "interaction" or
    // "interaction:<beta12>".
    static SimSetting preset(const std::string& name);
    static std::vector<std::string> preset_names();

    bool has_covariate() const { return family == SimFamily::covariate; }
    // True when the four observed variables are mutually independent given
    // the latent factor: delta == 0 in the quadratic families, beta12 == 0
    // in the interaction family. (A nonzero interaction leaves every
    // tetrad product at zero, so only the generalized test can see it.)
    bool null_holds() const;
};

// Draws an observation table from the setting: per observation, U (and V
// when used) then the four noise terms come from one seeded stream, so a
// longer run extends a shorter one row-for-row.
ObservationTable generate(const SimSetting& setting, Eigen::Index n,
                          std::uint64_t seed);

struct QuadraticBridge {
    double intercept = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
    double operator()(double t) const {
        return intercept + slope * t + curvature * t * t;
    }
    Eigen::VectorXd evaluate(const Eigen::VectorXd& t) const;
};

struct AnalyticBridges {
    QuadraticBridge h;  // argument W
    QuadraticBridge g;  // argument Z
};

// Closed-form bridges where they exist: the main family with delta = 0
// and the interaction family. Intercepts solve E{Y - h(W)} = 0 and
// E{Y - g(Z)} = 0 under the family's Gaussian moments.
std::optional<AnalyticBridges> analytic_bridge(const SimSetting& setting);

enum class TestMethod { ct, gt_gmm, gt_psmd };

TestMethod parse_test_method(const std::string& text);
std::string test_method_name(TestMethod method);

struct PowerEstimate {
    std::string setting;
    std::string method;
    Eigen::Index n = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    double rejection_rate = 0.0;
    double mc_se = 0.0;
    int failures = 0;
    std::vector<std::string> failure_messages;  // at most a handful, deduplicated
};

struct StudyOptions {
    double alpha = 0.05;
    int workers = 1;
    // Bridge configurations used by the generalized tests; defaults are
    // the simulation-study configurations.
    GtConfig gmm_config = GtConfig::simulation_default(GtMethod::gmm);
    GtConfig psmd_config = GtConfig::simulation_default(GtMethod::psmd);
};

// Monte Carlo rejection rate over `reps` replications; replication r uses
// the sub-seed derived from (seed, r), so results are identical for any
// worker count. Replications that fail with a library error are excluded
// from the denominator when they stay under 1% of reps; otherwise the
// study itself fails.
PowerEstimate power_study(const SimSetting& setting, TestMethod method,
                          Eigen::Index n, int reps, std::uint64_t seed,
                          const StudyOptions& options = {});

}  // namespace gtetrad
