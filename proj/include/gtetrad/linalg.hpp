#pragma once

#include <Eigen/Dense>

#include "gtetrad/errors.hpp"

namespace gtetrad {

// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix
// via self-adjoint eigendecomposition. Eigenvalues below rel_tol times the
// largest eigenvalue count as zero; a matrix with no usable direction at
// all raises IdentificationError.
inline Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& m,
                                double rel_tol = 1e-10,
                                int* rank_out = nullptr) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("pseudoinverse requires a non-empty square matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed in pseudoinverse");
    }
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double cutoff = rel_tol * std::max(values.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inverted = Eigen::VectorXd::Zero(values.size());
    int rank = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > cutoff && values(i) > 0.0) {
            inverted(i) = 1.0 / values(i);
            ++rank;
        }
    }
    if (rank == 0) {
        throw IdentificationError(
            "matrix has rank zero after thresholding; the projected design "
            "carries no information");
    }
    if (rank_out != nullptr) *rank_out = rank;
    return eig.eigenvectors() * inverted.asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace gtetrad
