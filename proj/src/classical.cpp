#include "gtetrad/classical.hpp"

#include <cmath>

#include "gtetrad/errors.hpp"
#include "gtetrad/stats.hpp"

namespace gtetrad {

Eigen::Vector3d tetrad_differences(const Eigen::Matrix4d& sigma) {
    const double s12 = sigma(0, 1), s13 = sigma(0, 2), s14 = sigma(0, 3);
    const double s23 = sigma(1, 2), s24 = sigma(1, 3), s34 = sigma(2, 3);
    return {s12 * s34 - s13 * s24, s12 * s34 - s14 * s23,
            s13 * s24 - s14 * s23};
}

CtReport classical_test(const ObservationTable& table, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("classical test requires alpha in (0, 1)");
    }
    if (table.n_covariates() > 0) {
        CtReport report = classical_test(residualize(table), alpha);
        report.warnings.push_back(
            "role columns were residualized on the covariates");
        return report;
    }

    const auto n_idx = static_cast<Eigen::Index>(table.n());
    const double n = static_cast<double>(table.n());
    CtReport report;
    report.alpha = alpha;
    report.n = table.n();
    if (table.n() < 20) {
        report.warnings.push_back(
            "n < 20: the asymptotic chi-square calibration is unreliable");
    }

    // Centered data, covariances with denominator n.
    Eigen::MatrixXd centered(n_idx, 4);
    for (int r = 0; r < 4; ++r) {
        centered.col(r) = table.role(r).array() - table.role(r).mean();
    }
    report.sigma = (centered.transpose() * centered) / n;

    const Eigen::Vector3d diffs = tetrad_differences(report.sigma);
    report.t_hat = {diffs(1), diffs(0)};  // (sXY sZW - sXW sYZ, ... - sXZ sYW)

    // Delta method: Jacobian of the two tetrads with respect to the six
    // distinct covariances (s12, s13, s14, s23, s24, s34) ...
    const double s12 = report.sigma(0, 1), s13 = report.sigma(0, 2);
    const double s14 = report.sigma(0, 3), s23 = report.sigma(1, 2);
    const double s24 = report.sigma(1, 3), s34 = report.sigma(2, 3);
    Eigen::Matrix<double, 2, 6> jac;
    jac << s34, 0.0, -s23, -s14, 0.0, s12,   // d(s12 s34 - s14 s23)
           s34, -s24, 0.0, 0.0, -s13, s12;   // d(s12 s34 - s13 s24)

    // ... composed with the distribution-free covariance of the sample
    // covariances: Gamma[(ij),(kl)] = mean(m_ij m_kl) - sij skl, where
    // m_ij,r = centered_i(r) * centered_j(r).
    constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                  {1, 2}, {1, 3}, {2, 3}};
    Eigen::MatrixXd m(n_idx, 6);
    for (int p = 0; p < 6; ++p) {
        m.col(p) = centered.col(kPairs[p][0]).cwiseProduct(
            centered.col(kPairs[p][1]));
    }
    Eigen::Matrix<double, 6, 6> gamma =
        (m.transpose() * m) / n;
    for (int p = 0; p < 6; ++p) {
        for (int q = 0; q < 6; ++q) {
            gamma(p, q) -= report.sigma(kPairs[p][0], kPairs[p][1]) *
                           report.sigma(kPairs[q][0], kPairs[q][1]);
        }
    }
    report.t_cov = jac * gamma * jac.transpose();

    const double a = report.t_cov(0, 0);
    const double b = report.t_cov(0, 1);
    const double d = report.t_cov(1, 1);
    const double det = a * d - b * b;
    if (!(a > 0.0) || !(d > 0.0) || !(det > 1e-12 * a * d)) {
        throw NumericalError(
            "classical test: estimated tetrad covariance is numerically "
            "singular (degenerate fourth moments); a larger sample is "
            "needed");
    }
    const Eigen::Vector2d t = report.t_hat;
    const double quad =
        (d * t(0) * t(0) - 2.0 * b * t(0) * t(1) + a * t(1) * t(1)) / det;
    report.statistic = n * quad;
    if (report.statistic < 0.0) report.statistic = 0.0;
    report.p_value = chi2_survival_df2(report.statistic);
    report.reject = report.p_value < alpha;
    return report;
}

}  // namespace gtetrad
