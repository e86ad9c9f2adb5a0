#include "gtetrad/basis.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <sstream>

#include "gtetrad/errors.hpp"

namespace gtetrad {

namespace {

int parse_int(const std::string& text, const std::string& what) {
    int value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("invalid integer '" + text + "' in " + what);
    }
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

void enumerate_exponents(int n_vars, int max_total,
                         std::vector<int>& current, int used,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == n_vars) {
        out.push_back(current);
        return;
    }
    for (int e = 0; e + used <= max_total; ++e) {
        current.push_back(e);
        enumerate_exponents(n_vars, max_total, current, used + e, out);
        current.pop_back();
    }
}

}  // namespace

BasisSpec BasisSpec::parse(const std::string& text) {
    if (text.empty()) throw ConfigError("empty basis specification");
    const std::vector<std::string> tokens = split(text, '+');
    BasisSpec spec;
    const std::vector<std::string> head = split(tokens[0], ':');
    const std::string& name = head[0];
    if (name == "pol") {
        if (head.size() != 2) {
            throw ConfigError("basis 'pol' expects one parameter, e.g. pol:4");
        }
        spec.kind = BasisKind::power_series;
        spec.order = parse_int(head[1], "basis '" + text + "'");
        if (spec.order < 1) throw ConfigError("pol dimension must be >= 1");
    } else if (name == "poly") {
        if (head.size() != 2) {
            throw ConfigError("basis 'poly' expects one parameter, e.g. poly:2");
        }
        spec.kind = BasisKind::power_series;
        spec.order = parse_int(head[1], "basis '" + text + "'") + 1;
        if (spec.order < 1) throw ConfigError("poly degree must be >= 0");
    } else if (name == "pspline") {
        if (head.size() != 3) {
            throw ConfigError(
                "basis 'pspline' expects degree and knot count, e.g. pspline:3:2");
        }
        spec.kind = BasisKind::pspline;
        spec.order = parse_int(head[1], "basis '" + text + "'");
        spec.knots = parse_int(head[2], "basis '" + text + "'");
        if (spec.order < 1) throw ConfigError("pspline degree must be >= 1");
        if (spec.knots < 0) throw ConfigError("pspline knot count must be >= 0");
    } else {
        throw ConfigError("unknown basis family '" + name +
                          "' (expected pol, poly, or pspline)");
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "linear-covariates") {
            spec.covariates = CovariateMode::additive_linear;
        } else if (tokens[i] == "joint-covariates") {
            spec.covariates = CovariateMode::joint_total_degree;
        } else {
            throw ConfigError("unknown basis suffix '+" + tokens[i] + "'");
        }
    }
    if (spec.kind == BasisKind::pspline &&
        spec.covariates == CovariateMode::joint_total_degree) {
        throw ConfigError(
            "joint covariate expansion is only available for power-series bases");
    }
    return spec;
}

std::string BasisSpec::to_string() const {
    std::ostringstream out;
    if (kind == BasisKind::power_series) {
        out << "pol:" << order;
    } else {
        out << "pspline:" << order << ":" << knots;
    }
    if (covariates == CovariateMode::additive_linear) out << "+linear-covariates";
    if (covariates == CovariateMode::joint_total_degree) out << "+joint-covariates";
    return out.str();
}

FittedBasis FittedBasis::build(const BasisSpec& spec,
                               const Eigen::MatrixXd& block, bool rescale) {
    if (block.rows() < 1 || block.cols() < 1) {
        throw ValidationError("basis build requires a non-empty input block");
    }
    if (!block.allFinite()) {
        throw ValidationError("basis build input contains non-finite values");
    }
    FittedBasis basis;
    basis.spec_ = spec;
    basis.n_inputs_ = static_cast<int>(block.cols());
    // Splines need a bounded domain for their knots, so they always map
    // the build sample onto [0,1].
    basis.rescale_ = rescale || spec.kind == BasisKind::pspline;
    basis.offset_ = Eigen::VectorXd::Zero(basis.n_inputs_);
    basis.scale_ = Eigen::VectorXd::Ones(basis.n_inputs_);
    if (basis.rescale_) {
        for (int j = 0; j < basis.n_inputs_; ++j) {
            const double lo = block.col(j).minCoeff();
            const double hi = block.col(j).maxCoeff();
            if (!(hi > lo)) {
                throw ValidationError(
                    "basis input column " + std::to_string(j) +
                    " is constant and cannot be rescaled to [0,1]");
            }
            basis.offset_(j) = lo;
            basis.scale_(j) = hi - lo;
        }
    }
    switch (spec.kind) {
        case BasisKind::power_series:
            if (spec.covariates == CovariateMode::joint_total_degree) {
                std::vector<int> current;
                enumerate_exponents(basis.n_inputs_, spec.order - 1, current, 0,
                                    basis.exponents_);
                std::sort(basis.exponents_.begin(), basis.exponents_.end(),
                          [](const std::vector<int>& a, const std::vector<int>& b) {
                              int ta = 0, tb = 0;
                              for (int e : a) ta += e;
                              for (int e : b) tb += e;
                              if (ta != tb) return ta < tb;
                              return a > b;  // main-variable powers first
                          });
                basis.dim_ = static_cast<int>(basis.exponents_.size());
            } else {
                basis.dim_ = spec.order;
                if (spec.covariates == CovariateMode::additive_linear) {
                    basis.dim_ += basis.n_inputs_ - 1;
                }
            }
            break;
        case BasisKind::pspline: {
            std::vector<double> main(block.rows());
            for (Eigen::Index r = 0; r < block.rows(); ++r) {
                main[static_cast<std::size_t>(r)] =
                    (block(r, 0) - basis.offset_(0)) / basis.scale_(0);
            }
            std::sort(main.begin(), main.end());
            auto& knots = basis.knot_vector_;
            knots.assign(static_cast<std::size_t>(spec.order + 1), 0.0);
            for (int i = 1; i <= spec.knots; ++i) {
                knots.push_back(quantile(
                    main, static_cast<double>(i) / (spec.knots + 1)));
            }
            std::sort(knots.begin() + spec.order + 1, knots.end());
            knots.insert(knots.end(), static_cast<std::size_t>(spec.order + 1),
                         1.0);
            basis.dim_ = spec.order + 1 + spec.knots;
            if (spec.covariates == CovariateMode::additive_linear) {
                basis.dim_ += basis.n_inputs_ - 1;
            }
            break;
        }
    }
    if (basis.dim_ < 1) throw ValidationError("basis has no features");
    return basis;
}

void FittedBasis::spline_values(double t, double* out) const {
    const auto& u = knot_vector_;
    const int p = spec_.order;
    const int nb = p + 1 + spec_.knots;
    const int n0 = static_cast<int>(u.size()) - 1;  // order-0 functions
    t = std::clamp(t, 0.0, 1.0);
    std::vector<double> level(static_cast<std::size_t>(n0), 0.0);
    for (int i = 0; i < n0; ++i) {
        const bool inside = u[i] <= t && t < u[i + 1];
        const bool at_end = t >= 1.0 && u[i] < u[i + 1] && u[i + 1] >= 1.0;
        level[static_cast<std::size_t>(i)] = (inside || at_end) ? 1.0 : 0.0;
    }
    for (int q = 1; q <= p; ++q) {
        for (int i = 0; i + q < n0; ++i) {
            double value = 0.0;
            const double den_l = u[i + q] - u[i];
            const double den_r = u[i + q + 1] - u[i + 1];
            if (den_l > 0.0) value += (t - u[i]) / den_l * level[i];
            if (den_r > 0.0) value += (u[i + q + 1] - t) / den_r * level[i + 1];
            level[static_cast<std::size_t>(i)] = value;
        }
    }
    std::copy(level.begin(), level.begin() + nb, out);
}

void FittedBasis::spline_derivatives(double t, double* out) const {
    const auto& u = knot_vector_;
    const int p = spec_.order;
    const int nb = p + 1 + spec_.knots;
    const int n0 = static_cast<int>(u.size()) - 1;
    t = std::clamp(t, 0.0, 1.0);
    std::vector<double> level(static_cast<std::size_t>(n0), 0.0);
    for (int i = 0; i < n0; ++i) {
        const bool inside = u[i] <= t && t < u[i + 1];
        const bool at_end = t >= 1.0 && u[i] < u[i + 1] && u[i + 1] >= 1.0;
        level[static_cast<std::size_t>(i)] = (inside || at_end) ? 1.0 : 0.0;
    }
    for (int q = 1; q < p; ++q) {
        for (int i = 0; i + q < n0; ++i) {
            double value = 0.0;
            const double den_l = u[i + q] - u[i];
            const double den_r = u[i + q + 1] - u[i + 1];
            if (den_l > 0.0) value += (t - u[i]) / den_l * level[i];
            if (den_r > 0.0) value += (u[i + q + 1] - t) / den_r * level[i + 1];
            level[static_cast<std::size_t>(i)] = value;
        }
    }
    // d/dt B_{i,p} = p [ B_{i,p-1}/(u_{i+p}-u_i) - B_{i+1,p-1}/(u_{i+p+1}-u_{i+1}) ]
    for (int i = 0; i < nb; ++i) {
        double value = 0.0;
        const double den_l = u[i + p] - u[i];
        const double den_r = u[i + p + 1] - u[i + 1];
        if (den_l > 0.0) value += level[i] / den_l;
        if (den_r > 0.0) value -= level[i + 1] / den_r;
        out[i] = static_cast<double>(p) * value;
    }
}

void FittedBasis::feature_row(const Eigen::RowVectorXd& t, double* out) const {
    switch (spec_.kind) {
        case BasisKind::power_series:
            if (spec_.covariates == CovariateMode::joint_total_degree) {
                for (int f = 0; f < dim_; ++f) {
                    double value = 1.0;
                    for (int j = 0; j < n_inputs_; ++j) {
                        for (int e = 0; e < exponents_[f][j]; ++e) value *= t(j);
                    }
                    out[f] = value;
                }
            } else {
                double power = 1.0;
                for (int l = 0; l < spec_.order; ++l) {
                    out[l] = power;
                    power *= t(0);
                }
                if (spec_.covariates == CovariateMode::additive_linear) {
                    for (int j = 1; j < n_inputs_; ++j) {
                        out[spec_.order + j - 1] = t(j);
                    }
                }
            }
            break;
        case BasisKind::pspline:
            spline_values(t(0), out);
            if (spec_.covariates == CovariateMode::additive_linear) {
                const int base = spec_.order + 1 + spec_.knots;
                for (int j = 1; j < n_inputs_; ++j) out[base + j - 1] = t(j);
            }
            break;
    }
}

Eigen::MatrixXd FittedBasis::design(const Eigen::MatrixXd& block) const {
    if (block.cols() != n_inputs_) {
        throw ValidationError("basis expects " + std::to_string(n_inputs_) +
                              " input column(s), got " +
                              std::to_string(block.cols()));
    }
    Eigen::MatrixXd features(block.rows(), dim_);
    Eigen::RowVectorXd t(n_inputs_);
    Eigen::RowVectorXd row(dim_);
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
        t = (block.row(r) - offset_.transpose()).cwiseQuotient(
            scale_.transpose());
        feature_row(t, row.data());
        features.row(r) = row;
    }
    return features;
}

std::vector<Eigen::MatrixXd> FittedBasis::grad_design(
    const Eigen::MatrixXd& block) const {
    if (block.cols() != n_inputs_) {
        throw ValidationError("basis expects " + std::to_string(n_inputs_) +
                              " input column(s), got " +
                              std::to_string(block.cols()));
    }
    std::vector<Eigen::MatrixXd> grads(
        static_cast<std::size_t>(n_inputs_),
        Eigen::MatrixXd::Zero(block.rows(), dim_));
    Eigen::RowVectorXd t(n_inputs_);
    std::vector<double> spline_buffer;
    if (spec_.kind == BasisKind::pspline) {
        spline_buffer.resize(static_cast<std::size_t>(spec_.order + 1 +
                                                      spec_.knots));
    }
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
        t = (block.row(r) - offset_.transpose()).cwiseQuotient(
            scale_.transpose());
        switch (spec_.kind) {
            case BasisKind::power_series:
                if (spec_.covariates == CovariateMode::joint_total_degree) {
                    for (int d = 0; d < n_inputs_; ++d) {
                        const double chain = 1.0 / scale_(d);
                        for (int f = 0; f < dim_; ++f) {
                            const int ed = exponents_[f][d];
                            if (ed == 0) continue;
                            double value = static_cast<double>(ed);
                            for (int j = 0; j < n_inputs_; ++j) {
                                const int rep = j == d ? exponents_[f][j] - 1
                                                       : exponents_[f][j];
                                for (int e = 0; e < rep; ++e) value *= t(j);
                            }
                            grads[d](r, f) = value * chain;
                        }
                    }
                } else {
                    const double chain = 1.0 / scale_(0);
                    double power = 1.0;
                    for (int l = 1; l < spec_.order; ++l) {
                        grads[0](r, l) = static_cast<double>(l) * power * chain;
                        power *= t(0);
                    }
                    if (spec_.covariates == CovariateMode::additive_linear) {
                        for (int j = 1; j < n_inputs_; ++j) {
                            grads[j](r, spec_.order + j - 1) = 1.0 / scale_(j);
                        }
                    }
                }
                break;
            case BasisKind::pspline: {
                spline_derivatives(t(0), spline_buffer.data());
                const double chain = 1.0 / scale_(0);
                for (std::size_t f = 0; f < spline_buffer.size(); ++f) {
                    grads[0](r, static_cast<Eigen::Index>(f)) =
                        spline_buffer[f] * chain;
                }
                if (spec_.covariates == CovariateMode::additive_linear) {
                    const int base = spec_.order + 1 + spec_.knots;
                    for (int j = 1; j < n_inputs_; ++j) {
                        grads[j](r, base + j - 1) = 1.0 / scale_(j);
                    }
                }
                break;
            }
        }
    }
    return grads;
}

Eigen::VectorXd FittedBasis::raw_univariate_coeffs(
    const Eigen::VectorXd& coef) const {
    if (spec_.kind != BasisKind::power_series ||
        spec_.covariates != CovariateMode::none || n_inputs_ != 1) {
        throw ValidationError(
            "raw coefficient conversion requires a univariate power series");
    }
    if (coef.size() != dim_) {
        throw ValidationError("coefficient vector length does not match basis");
    }
    // p(t) with t = (x - a) / s, expanded back into powers of x by
    // repeatedly multiplying the running polynomial by (x - a) / s.
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(dim_);
    Eigen::VectorXd t_power = Eigen::VectorXd::Zero(dim_);
    t_power(0) = 1.0;
    const double a = offset_(0);
    const double s = scale_(0);
    raw += coef(0) * t_power;
    for (int l = 1; l < dim_; ++l) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(dim_);
        for (int k = 0; k < l; ++k) {
            next(k) += t_power(k) * (-a / s);
            next(k + 1) += t_power(k) / s;
        }
        t_power = next;
        raw += coef(l) * t_power;
    }
    return raw;
}

std::string FittedBasis::describe() const {
    std::ostringstream out;
    out << spec_.to_string() << " (dim " << dim_;
    if (rescale_) out << ", inputs rescaled to [0,1]";
    out << ")";
    return out.str();
}

}  // namespace gtetrad
