#pragma once

#include <Eigen/Dense>
#include <memory>

#include "gtetrad/basis.hpp"
#include "gtetrad/dataset.hpp"
#include "gtetrad/influence.hpp"

namespace gtetrad {

// Which of the two outcome bridges is being estimated: h regresses the
// outcome information onto the W block with Z-block instruments, g swaps
// the two blocks.
enum class BridgeSide { h_on_w, g_on_z };

struct GmmSpec {
    BasisSpec basis;             // features of the bridge argument
    BasisSpec instrument_basis;  // instrument features
    Eigen::MatrixXd omega;       // weight matrix; empty means identity

    // Intercept + linear term on each side.
    static GmmSpec linear();
    // Intercept + linear + quadratic on each side.
    static GmmSpec quadratic();
};

// Linear-in-coefficients bridge fitted by method of moments: the
// instrument-weighted residual moments n^-1 sum_j B_j (Y_j - theta' phi_j)
// are driven to zero (just-identified) or minimized in the Omega-weighted
// quadratic form (over-identified), both in closed form.
class ParametricBridge {
public:
    BridgeSide side() const { return side_; }
    const FittedBasis& basis() const { return basis_; }
    const FittedBasis& instrument_basis() const { return instrument_basis_; }
    const Eigen::VectorXd& theta() const { return theta_; }
    // M-hat = -A-hat, the derivative of the moment vector in the
    // coefficients (instrument dim x coefficient dim).
    const Eigen::MatrixXd& jacobian() const { return jacobian_; }
    // Sigma1-hat = (M' Omega M)^-1 M' Omega, mapping moment space to
    // coefficient space.
    const Eigen::MatrixXd& sigma1() const { return sigma1_; }

    // Bridge values at the rows of an argument block with the training
    // column layout.
    Eigen::VectorXd evaluate(const Eigen::MatrixXd& argument_block) const;
    // Y minus the bridge evaluated at this table's argument block.
    Eigen::VectorXd residuals(const ObservationTable& table) const;

    Eigen::MatrixXd argument_block(const ObservationTable& table) const;
    Eigen::MatrixXd instrument_block(const ObservationTable& table) const;

private:
    friend ParametricBridge fit_gmm(const ObservationTable&, BridgeSide,
                                    const GmmSpec&);
    ParametricBridge() = default;

    BridgeSide side_ = BridgeSide::h_on_w;
    FittedBasis basis_;
    FittedBasis instrument_basis_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd jacobian_;
    Eigen::MatrixXd sigma1_;
};

ParametricBridge fit_gmm(const ObservationTable& table, BridgeSide side,
                         const GmmSpec& spec);

// Factorizes the estimation correction for a fitted bridge: common
// combination p carries coefficients n^-1 (phi_p(argument_k) - mean),
// loading row j is Sigma1-hat applied to the moment contribution of
// observation j. The anchors must be the conditioning-block distance
// matrix shared with the test statistic.
InfluenceRep influence_rep(const ParametricBridge& bridge,
                           const ObservationTable& table,
                           std::shared_ptr<const DistanceMatrix> anchors);

}  // namespace gtetrad
