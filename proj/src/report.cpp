#include "gtetrad/report.hpp"

#include <charconv>
#include <system_error>

#include "gtetrad/errors.hpp"

namespace gtetrad {

std::string format_number(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw NumericalError("failed to format a number");
    }
    return std::string(buffer, ptr);
}

namespace {

Json vector_json(const Eigen::VectorXd& values) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < values.size(); ++i) out.push_back(values(i));
    return out;
}

Json matrix_json(const Eigen::MatrixXd& values) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            row.push_back(values(r, c));
        }
        out.push_back(row);
    }
    return out;
}

Json bridge_summary_json(const BridgeSummary& summary) {
    Json out;
    out["estimator"] = summary.estimator;
    out["basis"] = summary.basis;
    out["instrument_basis"] = summary.instrument_basis;
    out["coefficients"] = vector_json(summary.coefficients);
    if (summary.lambda.has_value()) out["lambda"] = *summary.lambda;
    return out;
}

}  // namespace

Json ct_report_json(const CtReport& report) {
    Json out;
    out["method"] = "ct";
    out["statistic"] = report.statistic;
    out["df"] = report.df;
    out["p_value"] = report.p_value;
    out["reject"] = report.reject;
    out["alpha"] = report.alpha;
    out["n"] = static_cast<std::int64_t>(report.n);
    out["t_hat"] = vector_json(report.t_hat);
    out["t_cov"] = matrix_json(report.t_cov);
    out["warnings"] = report.warnings;
    return out;
}

Json gt_report_json(const GtReport& report) {
    Json out;
    out["method"] = report.method;
    out["mgt_h_sq"] = report.mgt_h_sq;
    out["mgt_g_sq"] = report.mgt_g_sq;
    out["amgt_sq"] = report.amgt_sq;
    out["s_n_h"] = report.s_n_h;
    out["s_n_g"] = report.s_n_g;
    out["s_n"] = report.s_n;
    out["t_n"] = report.t_n;
    out["p_value"] = report.p_value;
    out["reject"] = report.reject;
    out["alpha"] = report.alpha;
    out["n"] = static_cast<std::int64_t>(report.n);
    out["permutation"] = report.permutation;
    out["bridge_h"] = bridge_summary_json(report.bridge_h);
    out["bridge_g"] = bridge_summary_json(report.bridge_g);
    out["warnings"] = report.warnings;
    return out;
}

Json sweep_json(const std::string& method,
                const std::vector<SweepEntry>& entries) {
    Json out;
    out["method"] = method;
    Json list = Json::array();
    for (const SweepEntry& entry : entries) {
        Json item;
        item["permutation"] = entry.permutation.label();
        if (entry.report.has_value()) {
            item["report"] = gt_report_json(*entry.report);
        } else {
            item["error"] = entry.error;
        }
        list.push_back(std::move(item));
    }
    out["entries"] = std::move(list);
    return out;
}

std::string study_csv(const std::vector<PowerEstimate>& estimates) {
    std::string out = "setting,method,n,reps,seed,rejection_rate,mc_se\n";
    for (const PowerEstimate& estimate : estimates) {
        out += estimate.setting;
        out += ',';
        out += estimate.method;
        out += ',';
        out += std::to_string(estimate.n);
        out += ',';
        out += std::to_string(estimate.replications);
        out += ',';
        out += std::to_string(estimate.seed);
        out += ',';
        out += format_number(estimate.rejection_rate);
        out += ',';
        out += format_number(estimate.mc_se);
        out += '\n';
    }
    return out;
}

Json study_json(const std::vector<PowerEstimate>& estimates, double alpha) {
    Json out;
    out["kind"] = "power-study";
    out["alpha"] = alpha;
    Json entries = Json::array();
    for (const PowerEstimate& estimate : estimates) {
        Json item;
        item["setting"] = estimate.setting;
        item["method"] = estimate.method;
        item["n"] = static_cast<std::int64_t>(estimate.n);
        item["reps"] = estimate.replications;
        item["seed"] = estimate.seed;
        item["rejection_rate"] = estimate.rejection_rate;
        item["mc_se"] = estimate.mc_se;
        item["failures"] = estimate.failures;
        if (!estimate.failure_messages.empty()) {
            item["failure_messages"] = estimate.failure_messages;
        }
        entries.push_back(std::move(item));
    }
    out["entries"] = std::move(entries);
    Json table = Json::object();
    for (const PowerEstimate& estimate : estimates) {
        table[estimate.setting][estimate.method]
             [std::to_string(estimate.n)] = estimate.rejection_rate;
    }
    out["table"] = std::move(table);
    return out;
}

}  // namespace gtetrad
