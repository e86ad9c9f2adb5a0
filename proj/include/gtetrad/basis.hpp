#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gtetrad {

enum class BasisKind { power_series, pspline };

// How covariate columns (block columns beyond the first) enter a basis:
// appended as linear terms, or jointly through a total-degree polynomial
// expansion over (main variable, covariates).
enum class CovariateMode { none, additive_linear, joint_total_degree };

// Parsed textual basis specification.
//   "pol:r"        power series of dimension r (degree r-1)
//   "poly:k"       power series with monomials up to degree k (dimension k+1)
//   "pspline:r:k"  B-splines of degree r with k interior quantile knots
// Suffixes: "+linear-covariates", "+joint-covariates".
struct BasisSpec {
    BasisKind kind = BasisKind::power_series;
    int order = 2;  // power series: dimension; pspline: spline degree
    int knots = 0;  // pspline interior knots
    CovariateMode covariates = CovariateMode::none;

    static BasisSpec parse(const std::string& text);
    std::string to_string() const;
};

// A basis bound to a training block: input rescaling to [0,1] (when
// enabled) and quantile knots are frozen from the build sample, so the
// basis evaluates identically on new points.
class FittedBasis {
public:
    // An empty basis; usable only after assignment from build().
    FittedBasis() = default;

    static FittedBasis build(const BasisSpec& spec,
                             const Eigen::MatrixXd& block, bool rescale);

    int dim() const { return dim_; }
    int n_inputs() const { return n_inputs_; }
    bool rescaled() const { return rescale_; }
    const BasisSpec& spec() const { return spec_; }

    // n x dim feature matrix for a block with matching column count.
    Eigen::MatrixXd design(const Eigen::MatrixXd& block) const;

    // Partial-derivative designs, one n x dim matrix per raw input
    // dimension (chain rule through the [0,1] rescaling applied).
    std::vector<Eigen::MatrixXd> grad_design(
        const Eigen::MatrixXd& block) const;

    // For a univariate power series: converts coefficients over the
    // (possibly rescaled) monomials into raw-unit polynomial coefficients
    // (constant term first).
    Eigen::VectorXd raw_univariate_coeffs(const Eigen::VectorXd& coef) const;

    std::string describe() const;

private:
    void feature_row(const Eigen::RowVectorXd& t, double* out) const;
    void spline_values(double t, double* out) const;          // order_+1+knots_
    void spline_derivatives(double t, double* out) const;

    BasisSpec spec_;
    bool rescale_ = true;
    int n_inputs_ = 1;
    int dim_ = 0;
    Eigen::VectorXd offset_;  // per input: t = (x - offset) / scale
    Eigen::VectorXd scale_;
    std::vector<double> knot_vector_;
    std::vector<std::vector<int>> exponents_;  // joint mode monomials
};

}  // namespace gtetrad
