#include "gtetrad/bridge_psmd.hpp"

#include <utility>

#include "gtetrad/errors.hpp"
#include "gtetrad/linalg.hpp"

namespace gtetrad {

PenaltyKind parse_penalty(const std::string& text) {
    if (text == "l2") return PenaltyKind::l2;
    if (text == "l2+grad") return PenaltyKind::l2_grad;
    throw ConfigError("unknown penalty '" + text + "' (expected l2 or l2+grad)");
}

std::string penalty_name(PenaltyKind kind) {
    return kind == PenaltyKind::l2 ? "l2" : "l2+grad";
}

PsmdSpec PsmdSpec::simulation_default() {
    PsmdSpec spec;
    spec.basis = BasisSpec::parse("pol:4");
    spec.instrument_basis = BasisSpec::parse("pol:7");
    spec.penalty = PenaltyKind::l2_grad;
    spec.lambda = 4e-5;
    return spec;
}

PsmdSpec PsmdSpec::analysis_default() {
    PsmdSpec spec;
    spec.basis = BasisSpec::parse("pol:6");
    spec.instrument_basis = BasisSpec::parse("pol:9");
    spec.penalty = PenaltyKind::l2;
    spec.lambda = 1e-5;
    return spec;
}

namespace {

// Covariates join the sieve automatically: power series expand jointly
// over (argument, covariates), splines take additive linear terms.
BasisSpec with_covariates(BasisSpec spec, const ObservationTable& table) {
    if (table.n_covariates() > 0 && spec.covariates == CovariateMode::none) {
        spec.covariates = spec.kind == BasisKind::power_series
                              ? CovariateMode::joint_total_degree
                              : CovariateMode::additive_linear;
    }
    return spec;
}

}  // namespace

Eigen::MatrixXd SieveBridge::argument_block(
    const ObservationTable& table) const {
    return side_ == BridgeSide::h_on_w ? table.w_block() : table.z_block();
}

Eigen::MatrixXd SieveBridge::instrument_block(
    const ObservationTable& table) const {
    return side_ == BridgeSide::h_on_w ? table.z_block() : table.w_block();
}

Eigen::VectorXd SieveBridge::evaluate(
    const Eigen::MatrixXd& argument_block) const {
    return basis_.design(argument_block) * gamma_;
}

Eigen::VectorXd SieveBridge::residuals(const ObservationTable& table) const {
    return table.y() - evaluate(argument_block(table));
}

double SieveBridge::criterion(const Eigen::VectorXd& gamma_candidate) const {
    if (gamma_candidate.size() != gamma_.size()) {
        throw ValidationError("coefficient vector length does not match sieve");
    }
    const auto n = static_cast<double>(projected_design_.rows());
    const Eigen::VectorXd projected_residual =
        projected_y_ - projected_design_ * gamma_candidate;
    return projected_residual.squaredNorm() / n +
           lambda_ * gamma_candidate.dot(penalty_gram_ * gamma_candidate);
}

Eigen::MatrixXd SieveBridge::hat_matrix() const {
    return thin_q_ * thin_q_.transpose();
}

SieveBridge fit_psmd(const ObservationTable& table, BridgeSide side,
                     const PsmdSpec& spec) {
    if (!(spec.lambda >= 0.0)) {
        throw ConfigError("penalty weight lambda must be >= 0");
    }
    SieveBridge bridge;
    bridge.side_ = side;
    bridge.penalty_ = spec.penalty;
    bridge.lambda_ = spec.lambda;
    const Eigen::MatrixXd arg_block = bridge.argument_block(table);
    const Eigen::MatrixXd inst_block = bridge.instrument_block(table);
    bridge.basis_ = FittedBasis::build(with_covariates(spec.basis, table),
                                       arg_block, /*rescale=*/true);
    bridge.instrument_basis_ =
        FittedBasis::build(with_covariates(spec.instrument_basis, table),
                           inst_block, /*rescale=*/true);
    const int q = bridge.basis_.dim();
    const int k = bridge.instrument_basis_.dim();
    if (q < 2) {
        throw ConfigError("sieve dimension must be at least 2, got " +
                          std::to_string(q));
    }
    if (k < q) {
        throw ConfigError("instrument sieve dimension " + std::to_string(k) +
                          " must be at least the argument sieve dimension " +
                          std::to_string(q));
    }
    if (table.n() <= static_cast<std::size_t>(k)) {
        throw ValidationError(
            "sample size must exceed the instrument sieve dimension " +
            std::to_string(k));
    }
    const auto n = static_cast<double>(table.n());

    const Eigen::MatrixXd design = bridge.basis_.design(arg_block);
    const Eigen::MatrixXd inst_design =
        bridge.instrument_basis_.design(inst_block);

    // Orthonormal basis of the instrument design span; the projection is
    // applied as Q(Q'x) without ever forming the n x n matrix.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(inst_design);
    const auto rank = static_cast<Eigen::Index>(qr.rank());
    if (rank == 0) {
        throw IdentificationError(
            "instrument design has rank zero; nothing to project on");
    }
    bridge.thin_q_ =
        qr.householderQ().setLength(rank) *
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(table.n()), rank);
    bridge.projected_design_ =
        bridge.thin_q_ * (bridge.thin_q_.transpose() * design);
    bridge.projected_y_ =
        bridge.thin_q_ * (bridge.thin_q_.transpose() * table.y());

    bridge.penalty_gram_ = design.transpose() * design / n;
    if (spec.penalty == PenaltyKind::l2_grad) {
        const std::vector<Eigen::MatrixXd> grads =
            bridge.basis_.grad_design(arg_block);
        for (const Eigen::MatrixXd& grad : grads) {
            bridge.penalty_gram_ += grad.transpose() * grad / n;
        }
    }

    const Eigen::MatrixXd lhs =
        bridge.projected_design_.transpose() * bridge.projected_design_ +
        n * spec.lambda * bridge.penalty_gram_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lhs);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the sieve system failed");
    }
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 0.0) || max_eig / min_eig > 1e12) {
        throw NumericalError(
            "penalized sieve system is ill-conditioned (condition number > "
            "1e12); increase lambda or reduce the sieve dimension");
    }
    const Eigen::VectorXd rhs =
        bridge.projected_design_.transpose() * table.y();
    bridge.gamma_ = eig.eigenvectors() *
                    (eig.eigenvalues().cwiseInverse().asDiagonal() *
                     (eig.eigenvectors().transpose() * rhs));
    if (!bridge.gamma_.allFinite() || !(design * bridge.gamma_).allFinite()) {
        throw NumericalError("fitted sieve bridge is non-finite on the sample");
    }

    bridge.dn_ = bridge.projected_design_.transpose() *
                 bridge.projected_design_ / n;
    try {
        bridge.dn_pinv_ = pinv_psd(bridge.dn_, 1e-10);
    } catch (const IdentificationError&) {
        throw IdentificationError(
            "projected sieve design has rank zero - the instrument carries "
            "no information about the basis (completeness failure signal)");
    }
    return bridge;
}

InfluenceRep influence_rep_psmd(
    const SieveBridge& bridge, const ObservationTable& table,
    std::shared_ptr<const DistanceMatrix> anchors) {
    if (anchors == nullptr) {
        throw ValidationError("influence representation requires anchors");
    }
    if (anchors->n() != table.n()) {
        throw ValidationError(
            "anchor count does not match the observation table");
    }
    const Eigen::MatrixXd design =
        bridge.basis().design(bridge.argument_block(table));
    const Eigen::VectorXd residuals = bridge.residuals(table);
    const auto n = static_cast<double>(table.n());

    InfluenceRep rep;
    rep.common.reserve(static_cast<std::size_t>(design.cols()));
    for (Eigen::Index l = 0; l < design.cols(); ++l) {
        Eigen::VectorXd coef =
            (-(design.col(l).array() - design.col(l).mean()) / n).matrix();
        coef.array() -= coef.mean();  // absorb rounding residue exactly
        rep.common.emplace_back(anchors, std::move(coef));
    }
    // Loading row j = R_j * Dn-pinv * F_j.
    rep.loadings = (bridge.projected_design().array().colwise() *
                    residuals.array())
                       .matrix() *
                   bridge.dn_pinv();
    return rep;
}

}  // namespace gtetrad
