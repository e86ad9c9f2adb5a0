#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "gtetrad/basis.hpp"
#include "gtetrad/bridge_gmm.hpp"  // BridgeSide
#include "gtetrad/dataset.hpp"
#include "gtetrad/influence.hpp"

namespace gtetrad {

enum class PenaltyKind { l2, l2_grad };

PenaltyKind parse_penalty(const std::string& text);
std::string penalty_name(PenaltyKind kind);

struct PsmdSpec {
    BasisSpec basis;             // sieve for the bridge argument
    BasisSpec instrument_basis;  // sieve spanning the projection space
    PenaltyKind penalty = PenaltyKind::l2_grad;
    double lambda = 4e-5;

    // Power series of dimension 4 / 7, squared-norm + gradient penalty,
    // lambda 4e-5: the simulation-study configuration.
    static PsmdSpec simulation_default();
    // Power series of dimension 6 / 9, squared-norm penalty, lambda 1e-5:
    // the data-analysis configuration.
    static PsmdSpec analysis_default();
};

// Bridge estimated by penalized sieve minimum distance: the residual
// Y - Xi*gamma is projected onto the instrument design span (projection H)
// and gamma minimizes n^-1 (Y-Xi g)' H (Y-Xi g) + lambda g'G g, which the
// fit solves in closed form.
class SieveBridge {
public:
    BridgeSide side() const { return side_; }
    const FittedBasis& basis() const { return basis_; }
    const FittedBasis& instrument_basis() const { return instrument_basis_; }
    const Eigen::VectorXd& gamma() const { return gamma_; }
    double lambda() const { return lambda_; }
    PenaltyKind penalty() const { return penalty_; }
    const Eigen::MatrixXd& penalty_gram() const { return penalty_gram_; }
    // F = H*Xi: per-observation instrument regressions of each sieve
    // feature (row j estimates E{xi(argument) | instrument_j}).
    const Eigen::MatrixXd& projected_design() const { return projected_design_; }
    const Eigen::MatrixXd& dn() const { return dn_; }
    const Eigen::MatrixXd& dn_pinv() const { return dn_pinv_; }

    Eigen::VectorXd evaluate(const Eigen::MatrixXd& argument_block) const;
    Eigen::VectorXd residuals(const ObservationTable& table) const;
    Eigen::MatrixXd argument_block(const ObservationTable& table) const;
    Eigen::MatrixXd instrument_block(const ObservationTable& table) const;

    // Penalized criterion at an arbitrary coefficient vector, using the
    // training-sample projection. The fitted gamma minimizes this.
    double criterion(const Eigen::VectorXd& gamma_candidate) const;

    // Dense projection matrix H = Q Q'; O(n^2) memory, intended for
    // small-sample diagnostics only.
    Eigen::MatrixXd hat_matrix() const;

private:
    friend SieveBridge fit_psmd(const ObservationTable&, BridgeSide,
                                const PsmdSpec&);
    SieveBridge() = default;

    BridgeSide side_ = BridgeSide::h_on_w;
    FittedBasis basis_;
    FittedBasis instrument_basis_;
    Eigen::VectorXd gamma_;
    PenaltyKind penalty_ = PenaltyKind::l2_grad;
    double lambda_ = 0.0;
    Eigen::MatrixXd thin_q_;            // orthonormal basis of the span
    Eigen::MatrixXd projected_design_;  // F = H*Xi
    Eigen::VectorXd projected_y_;       // H*Y
    Eigen::MatrixXd penalty_gram_;
    Eigen::MatrixXd dn_;
    Eigen::MatrixXd dn_pinv_;
};

SieveBridge fit_psmd(const ObservationTable& table, BridgeSide side,
                     const PsmdSpec& spec);

// Factorization of the estimation correction: combination l carries
// coefficients -n^-1 (xi_l(argument_k) - mean) (the Gateaux derivative of
// the weighted-residual functional in the direction of sieve feature l),
// loading row j is R_j * Dn-pinv * F_j.
InfluenceRep influence_rep_psmd(const SieveBridge& bridge,
                                const ObservationTable& table,
                                std::shared_ptr<const DistanceMatrix> anchors);

}  // namespace gtetrad
