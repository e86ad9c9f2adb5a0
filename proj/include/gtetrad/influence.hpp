#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gtetrad/energy.hpp"

namespace gtetrad {

// s-free factorization of the nuisance-estimation correction to the
// weighted residual process: m zero-sum characteristic-function
// combinations over the conditioning-block anchors that are common to all
// observations, plus an n x m matrix of per-observation loadings. m = 0
// means no correction (an oracle bridge with known coefficients).
struct InfluenceRep {
    std::vector<CfCombination> common;
    Eigen::MatrixXd loadings;

    int n() const { return static_cast<int>(loadings.rows()); }
    int m() const { return static_cast<int>(loadings.cols()); }
};

}  // namespace gtetrad
