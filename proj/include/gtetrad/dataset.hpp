#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace gtetrad {

// Which CSV columns play the four observed roles, plus optional covariates.
struct RoleSpec {
    std::string x = "x";
    std::string y = "y";
    std::string z = "z";
    std::string w = "w";
    std::vector<std::string> covariates;
};

// Immutable n-row numeric dataset with role assignments. The "block" of a
// role is its column concatenated with all covariate columns; bridges take
// the Z/W blocks as arguments and the conditioning anchors are the X block.
class ObservationTable {
public:
    ObservationTable(std::array<std::string, 4> role_names,
                     std::array<Eigen::VectorXd, 4> role_columns,
                     std::vector<std::string> covariate_names,
                     std::vector<Eigen::VectorXd> covariate_columns);

    std::size_t n() const { return static_cast<std::size_t>(roles_[0].size()); }

    const Eigen::VectorXd& x() const { return roles_[0]; }
    const Eigen::VectorXd& y() const { return roles_[1]; }
    const Eigen::VectorXd& z() const { return roles_[2]; }
    const Eigen::VectorXd& w() const { return roles_[3]; }
    const Eigen::VectorXd& role(int i) const { return roles_.at(i); }
    const std::string& role_name(int i) const { return role_names_.at(i); }

    std::size_t n_covariates() const { return covariates_.size(); }
    const Eigen::VectorXd& covariate(std::size_t i) const {
        return covariates_.at(i);
    }
    const std::string& covariate_name(std::size_t i) const {
        return covariate_names_.at(i);
    }

    // n x (1 + #covariates) matrices: role column first, covariates after.
    Eigen::MatrixXd x_block() const { return block(0); }
    Eigen::MatrixXd z_block() const { return block(2); }
    Eigen::MatrixXd w_block() const { return block(3); }

private:
    Eigen::MatrixXd block(int role) const;

    std::array<std::string, 4> role_names_;
    std::array<Eigen::VectorXd, 4> roles_;
    std::vector<std::string> covariate_names_;
    std::vector<Eigen::VectorXd> covariates_;
};

// RFC-4180-style CSV ingestion: first row header, UTF-8, '.' decimal point.
// Only columns referenced by the role spec are retained.
ObservationTable load_csv(const std::string& path, const RoleSpec& roles);

// 17-significant-digit serialization; loading the written file reproduces
// the table bit-for-bit.
void write_csv(const ObservationTable& table, const std::string& path);
std::string to_csv(const ObservationTable& table);

// Replaces each role column by its residual from an OLS regression on an
// intercept plus all covariates; covariates are dropped from the result.
ObservationTable residualize(const ObservationTable& table);

// Z-scores every role and covariate column (denominator-n standard
// deviation); optional preprocessing exposed by the CLI.
ObservationTable standardize(const ObservationTable& table);

// One of the 12 role reassignments: order[r] is the index (0..3, in the
// current X,Y,Z,W order) of the variable taking role r. The Z and W roles
// are unordered, which cuts the 24 permutations down to 12.
struct RolePermutation {
    std::array<int, 4> order{0, 1, 2, 3};
    std::string label() const;  // e.g. "(1,2,3,4)"
};

// Deterministic enumeration: X-role variable ascending, then Y-role
// ascending, with the remaining pair taking Z/W in ascending order.
std::vector<RolePermutation> enumerate_permutations();

ObservationTable apply_permutation(const ObservationTable& table,
                                   const RolePermutation& perm);

}  // namespace gtetrad
