#include "gtetrad/bridge_gmm.hpp"

#include <string>

#include "gtetrad/errors.hpp"

namespace gtetrad {

namespace {

// Tables with covariates fold them into both feature sets as additive
// linear terms unless the caller asked for a joint expansion.
BasisSpec with_covariates(BasisSpec spec, const ObservationTable& table) {
    if (table.n_covariates() > 0 && spec.covariates == CovariateMode::none) {
        spec.covariates = CovariateMode::additive_linear;
    }
    return spec;
}

}  // namespace

GmmSpec GmmSpec::linear() {
    GmmSpec spec;
    spec.basis = BasisSpec::parse("poly:1");
    spec.instrument_basis = BasisSpec::parse("poly:1");
    return spec;
}

GmmSpec GmmSpec::quadratic() {
    GmmSpec spec;
    spec.basis = BasisSpec::parse("poly:2");
    spec.instrument_basis = BasisSpec::parse("poly:2");
    return spec;
}

Eigen::MatrixXd ParametricBridge::argument_block(
    const ObservationTable& table) const {
    return side_ == BridgeSide::h_on_w ? table.w_block() : table.z_block();
}

Eigen::MatrixXd ParametricBridge::instrument_block(
    const ObservationTable& table) const {
    return side_ == BridgeSide::h_on_w ? table.z_block() : table.w_block();
}

Eigen::VectorXd ParametricBridge::evaluate(
    const Eigen::MatrixXd& argument_block) const {
    return basis_.design(argument_block) * theta_;
}

Eigen::VectorXd ParametricBridge::residuals(
    const ObservationTable& table) const {
    return table.y() - evaluate(argument_block(table));
}

ParametricBridge fit_gmm(const ObservationTable& table, BridgeSide side,
                         const GmmSpec& spec) {
    ParametricBridge bridge;
    bridge.side_ = side;
    const Eigen::MatrixXd arg_block = bridge.argument_block(table);
    const Eigen::MatrixXd inst_block = bridge.instrument_block(table);
    // Raw (unrescaled) features keep fitted coefficients directly
    // comparable to closed-form bridge expressions in original units.
    bridge.basis_ = FittedBasis::build(with_covariates(spec.basis, table),
                                       arg_block, /*rescale=*/false);
    bridge.instrument_basis_ =
        FittedBasis::build(with_covariates(spec.instrument_basis, table),
                           inst_block, /*rescale=*/false);
    const int p = bridge.basis_.dim();
    const int b = bridge.instrument_basis_.dim();
    if (b < p) {
        throw ConfigError(
            "instrument dimension " + std::to_string(b) +
            " is smaller than the coefficient dimension " + std::to_string(p) +
            "; the moment system is under-identified");
    }
    const auto n = static_cast<double>(table.n());
    if (table.n() <= static_cast<std::size_t>(b)) {
        throw ValidationError(
            "sample size must exceed the instrument dimension " +
            std::to_string(b));
    }

    const Eigen::MatrixXd phi = bridge.basis_.design(arg_block);
    const Eigen::MatrixXd instruments =
        bridge.instrument_basis_.design(inst_block);
    const Eigen::MatrixXd a_hat = instruments.transpose() * phi / n;
    const Eigen::VectorXd moment_y = instruments.transpose() * table.y() / n;

    Eigen::MatrixXd omega = spec.omega;
    if (omega.size() == 0) {
        omega = Eigen::MatrixXd::Identity(b, b);
    } else if (omega.rows() != b || omega.cols() != b) {
        throw ConfigError("weight matrix must be " + std::to_string(b) + "x" +
                          std::to_string(b) + " to match the instruments");
    }

    const Eigen::MatrixXd gram = a_hat.transpose() * omega * a_hat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the moment Gram failed");
    }
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * max_eig) || !(max_eig > 0.0)) {
        throw IdentificationError(
            "instrument and basis nearly orthogonal - completeness plausibly "
            "violated (moment Jacobian is numerically singular)");
    }
    const Eigen::MatrixXd gram_inv =
        eig.eigenvectors() *
        eig.eigenvalues().cwiseInverse().asDiagonal() *
        eig.eigenvectors().transpose();

    bridge.theta_ = gram_inv * (a_hat.transpose() * omega * moment_y);
    bridge.jacobian_ = -a_hat;
    bridge.sigma1_ = -gram_inv * a_hat.transpose() * omega;
    if (!bridge.theta_.allFinite() || !(phi * bridge.theta_).allFinite()) {
        throw NumericalError("fitted bridge is non-finite on the sample");
    }
    return bridge;
}

InfluenceRep influence_rep(const ParametricBridge& bridge,
                           const ObservationTable& table,
                           std::shared_ptr<const DistanceMatrix> anchors) {
    if (anchors == nullptr) {
        throw ValidationError("influence representation requires anchors");
    }
    if (anchors->n() != table.n()) {
        throw ValidationError(
            "anchor count does not match the observation table");
    }
    const Eigen::MatrixXd phi =
        bridge.basis().design(bridge.argument_block(table));
    const Eigen::MatrixXd instruments =
        bridge.instrument_basis().design(bridge.instrument_block(table));
    const Eigen::VectorXd residuals = bridge.residuals(table);
    const auto n = static_cast<double>(table.n());

    InfluenceRep rep;
    rep.common.reserve(static_cast<std::size_t>(phi.cols()));
    for (Eigen::Index p = 0; p < phi.cols(); ++p) {
        Eigen::VectorXd coef =
            ((phi.col(p).array() - phi.col(p).mean()) / n).matrix();
        coef.array() -= coef.mean();  // absorb rounding residue exactly
        rep.common.emplace_back(anchors, std::move(coef));
    }
    // Loading row j = Sigma1-hat * B(Z_j) * R_j.
    rep.loadings =
        (instruments.array().colwise() * residuals.array()).matrix() *
        bridge.sigma1().transpose();
    return rep;
}

}  // namespace gtetrad
