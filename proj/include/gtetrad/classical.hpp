#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gtetrad/dataset.hpp"

namespace gtetrad {

// Result of the classical vanishing-tetrad test (asymptotically
// distribution-free chi-square form, two tetrad differences).
struct CtReport {
    Eigen::Matrix4d sigma;        // sample covariance, denominator n
    Eigen::Vector2d t_hat;        // (sXY*sZW - sXW*sYZ, sXY*sZW - sXZ*sYW)
    Eigen::Matrix2d t_cov;        // asymptotic covariance of sqrt(n)*t_hat
    double statistic = 0.0;       // n * t' tcov^-1 t
    int df = 2;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    std::size_t n = 0;
    std::vector<std::string> warnings;
};

// The three products-of-covariances differences for variables ordered
// (1,2,3,4) = (X,Y,Z,W):
//   (s12*s34 - s13*s24, s12*s34 - s14*s23, s13*s24 - s14*s23).
// The third equals the second minus the first, so only two are free.
Eigen::Vector3d tetrad_differences(const Eigen::Matrix4d& sigma);

// Runs the test at level alpha. Covariates, when present, are removed
// first by OLS residualization of the four role columns.
CtReport classical_test(const ObservationTable& table, double alpha);

}  // namespace gtetrad
