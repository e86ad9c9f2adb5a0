#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <vector>

namespace gtetrad {

// Pairwise Euclidean distances of the conditioning-block anchor points,
// with cached row means and grand mean. Immutable after construction.
class DistanceMatrix {
public:
    // anchors: n points of dimension d, one per row.
    static std::shared_ptr<const DistanceMatrix> build(
        const Eigen::MatrixXd& anchors);

    std::size_t n() const { return n_; }
    std::size_t dim() const {
        return static_cast<std::size_t>(anchors_.cols());
    }
    const Eigen::MatrixXd& anchors() const { return anchors_; }

    double operator()(std::size_t j, std::size_t k) const {
        return dist_[j * n_ + k];
    }
    const double* data() const { return dist_.data(); }
    double row_mean(std::size_t j) const { return row_means_[j]; }
    const Eigen::VectorXd& row_means() const { return row_means_; }
    double grand_mean() const { return grand_mean_; }
    double max_distance() const { return max_distance_; }

    // y = D * x over the dispatched kernels.
    void matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

private:
    explicit DistanceMatrix(const Eigen::MatrixXd& anchors);

    Eigen::MatrixXd anchors_;
    std::size_t n_ = 0;
    std::vector<double> dist_;
    Eigen::VectorXd row_means_;
    double grand_mean_ = 0.0;
    double max_distance_ = 0.0;
};

// Delta_jk = D_jk - row mean_j - column mean_k + grand mean.
Eigen::MatrixXd double_center(const DistanceMatrix& D);

// An s-free representation of the characteristic-function combination
// sum_k c_k exp(i s . A_k) over the anchor set of a DistanceMatrix. The
// zero-sum constraint on c is what makes the defining s-integral finite.
class CfCombination {
public:
    CfCombination(std::shared_ptr<const DistanceMatrix> anchors,
                  Eigen::VectorXd coefficients);

    const Eigen::VectorXd& coefficients() const { return coeffs_; }
    const std::shared_ptr<const DistanceMatrix>& anchors() const {
        return anchors_;
    }

private:
    std::shared_ptr<const DistanceMatrix> anchors_;
    Eigen::VectorXd coeffs_;
};

// Weight constant c_d = pi^{(d+1)/2} / Gamma((d+1)/2) of the
// ||s||^{-(d+1)} integral identity (pi for d = 1).
double cf_weight_constant(std::size_t d);

// Exact evaluation of the weighted characteristic-function inner product
// via the integral identity for zero-sum combinations: returns -c' D d.
// For c fed twice (the quadratic form) small negative roundoff is clamped
// to zero, since the population quantity is a squared norm.
double cf_energy(const CfCombination& c, const CfCombination& d);

// Test-only independent evaluation of the same quantity by adaptive-panel
// numerical integration over |s| in [s_min, s_max] (scalar anchors only):
//   (2 / c_1) * int Re[(sum_j c_j e^{isA_j})(sum_k d_k e^{-isA_k})] s^-2 ds.
// Truncation error is O(s_min) + O(1/s_max) for zero-sum combinations.
double quadrature_oracle(const CfCombination& c, const CfCombination& d,
                         double s_min, double s_max, std::size_t panels);

}  // namespace gtetrad
