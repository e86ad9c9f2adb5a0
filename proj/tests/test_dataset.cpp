#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gtetrad/dataset.hpp"
#include "gtetrad/errors.hpp"
#include "gtetrad/rng.hpp"

using namespace gtetrad;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/gtetrad_dataset_" + name + ".csv";
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

Eigen::VectorXd noisy_column(RandomStream& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

ObservationTable random_table(std::uint64_t seed, int n, int covariates) {
    RandomStream rng(seed);
    std::array<Eigen::VectorXd, 4> roles;
    for (auto& col : roles) col = noisy_column(rng, n);
    std::vector<std::string> cov_names;
    std::vector<Eigen::VectorXd> cov_cols;
    for (int c = 0; c < covariates; ++c) {
        cov_names.push_back("v" + std::to_string(c + 1));
        cov_cols.push_back(noisy_column(rng, n));
    }
    return ObservationTable({"x", "y", "z", "w"}, std::move(roles),
                            std::move(cov_names), std::move(cov_cols));
}

}  // namespace

TEST_CASE("basic accessors and blocks") {
    const auto table = random_table(1, 9, 2);
    CHECK(table.n() == 9);
    CHECK(table.n_covariates() == 2);
    CHECK(table.role_name(0) == "x");
    CHECK(table.role_name(3) == "w");
    CHECK(table.covariate_name(1) == "v2");
    const Eigen::MatrixXd xb = table.x_block();
    REQUIRE(xb.rows() == 9);
    REQUIRE(xb.cols() == 3);
    CHECK(xb.col(0) == table.x());
    CHECK(xb.col(1) == table.covariate(0));
    CHECK(xb.col(2) == table.covariate(1));
    CHECK(table.z_block().col(0) == table.z());
    CHECK(table.w_block().col(0) == table.w());
}

TEST_CASE("constructor validates columns") {
    RandomStream rng(2);
    const Eigen::VectorXd good = noisy_column(rng, 5);
    const Eigen::VectorXd good2 = noisy_column(rng, 5);
    const Eigen::VectorXd good3 = noisy_column(rng, 5);
    const Eigen::VectorXd good4 = noisy_column(rng, 5);

    SUBCASE("duplicate role names") {
        CHECK_THROWS_AS(ObservationTable({"x", "x", "z", "w"},
                                         {good, good2, good3, good4}, {}, {}),
                        ValidationError);
    }
    SUBCASE("mismatched length") {
        CHECK_THROWS_AS(ObservationTable({"x", "y", "z", "w"},
                                         {good, good2, good3,
                                          noisy_column(rng, 4)},
                                         {}, {}),
                        ValidationError);
    }
    SUBCASE("non-finite values") {
        Eigen::VectorXd bad = good;
        bad(2) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(ObservationTable({"x", "y", "z", "w"},
                                         {bad, good2, good3, good4}, {}, {}),
                        ValidationError);
    }
    SUBCASE("constant column") {
        CHECK_THROWS_AS(ObservationTable({"x", "y", "z", "w"},
                                         {Eigen::VectorXd::Constant(5, 2.0),
                                          good2, good3, good4},
                                         {}, {}),
                        ValidationError);
    }
    SUBCASE("covariate name collides with a role") {
        CHECK_THROWS_AS(ObservationTable({"x", "y", "z", "w"},
                                         {good, good2, good3, good4}, {"x"},
                                         {noisy_column(rng, 5)}),
                        ValidationError);
    }
    SUBCASE("empty table") {
        Eigen::VectorXd empty(0);
        CHECK_THROWS_AS(ObservationTable({"x", "y", "z", "w"},
                                         {empty, empty, empty, empty}, {}, {}),
                        ValidationError);
    }
}

TEST_CASE("CSV loading handles RFC-4180 edge cases") {
    SUBCASE("quoted headers, commas and doubled quotes inside quotes") {
        const auto path = write_temp(
            "quoted",
            "\"the, x\",y,\"q\"\"z\",w\n1,2,3,4\n5.5,6.5,7.5,8.5\n");
        RoleSpec roles;
        roles.x = "the, x";
        roles.z = "q\"z";
        const auto table = load_csv(path, roles);
        CHECK(table.n() == 2);
        CHECK(table.x()(0) == 1.0);
        CHECK(table.z()(1) == 7.5);
    }
    SUBCASE("CRLF endings, BOM, surrounding spaces, exponents") {
        const auto path = write_temp(
            "crlf",
            "\xEF\xBB\xBFx,y,z,w\r\n 1 ,2e0,-3.5,4\r\n1e1,0.25,+7,-8\r\n");
        const auto table = load_csv(path, {});
        CHECK(table.n() == 2);
        CHECK(table.x()(0) == 1.0);
        CHECK(table.y()(0) == 2.0);
        CHECK(table.z()(0) == -3.5);
        CHECK(table.x()(1) == 10.0);
        CHECK(table.z()(1) == 7.0);
        CHECK(table.w()(1) == -8.0);
    }
    SUBCASE("newline inside a quoted field is part of the value") {
        // Only referenced columns are parsed as numbers; a free-text note
        // column may contain embedded newlines.
        const auto path = write_temp(
            "embedded",
            "x,y,z,w,note\n1,2,3,4,\"line one\nline two\"\n5,6,7,8,plain\n");
        const auto table = load_csv(path, {});
        CHECK(table.n() == 2);
        CHECK(table.w()(1) == 8.0);
    }
    SUBCASE("missing trailing newline") {
        const auto path =
            write_temp("notrail", "x,y,z,w\n1,2,3,4\n5,6,7,8");
        const auto table = load_csv(path, {});
        CHECK(table.n() == 2);
        CHECK(table.w()(1) == 8.0);
    }
    SUBCASE("extra columns are ignored") {
        const auto path = write_temp(
            "extra", "id,x,y,z,w,label\na,1,2,3,4,u\nb,5,6,7,8,v\n");
        const auto table = load_csv(path, {});
        CHECK(table.n() == 2);
        CHECK(table.y()(1) == 6.0);
    }
}

TEST_CASE("CSV loading rejects malformed input") {
    SUBCASE("missing role column") {
        const auto path = write_temp("missing", "x,y,z\n1,2,3\n");
        CHECK_THROWS_WITH_AS(load_csv(path, {}),
                             doctest::Contains("absent from the CSV header"),
                             ConfigError);
    }
    SUBCASE("duplicate header name") {
        const auto path = write_temp("dup", "x,y,z,w,x\n1,2,3,4,5\n");
        CHECK_THROWS_WITH_AS(load_csv(path, {}),
                             doctest::Contains("more than once"), ConfigError);
    }
    SUBCASE("ragged data row") {
        const auto path = write_temp("ragged", "x,y,z,w\n1,2,3\n");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("non-numeric cell") {
        const auto path = write_temp("alpha", "x,y,z,w\n1,two,3,4\n5,6,7,8\n");
        CHECK_THROWS_WITH_AS(load_csv(path, {}),
                             doctest::Contains("not a finite number"),
                             ParseError);
    }
    SUBCASE("infinite cell") {
        const auto path = write_temp("inf", "x,y,z,w\n1,inf,3,4\n5,6,7,8\n");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("empty file") {
        const auto path = write_temp("empty", "");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("header only") {
        const auto path = write_temp("headonly", "x,y,z,w\n");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("unterminated quote") {
        const auto path = write_temp("unterm", "x,y,z,w\n\"1,2,3,4\n");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("quote inside unquoted field") {
        const auto path = write_temp("midquote", "x,y,z,w\n1\"2,3,4,5\n");
        CHECK_THROWS_AS(load_csv(path, {}), ParseError);
    }
    SUBCASE("nonexistent file") {
        CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv", {}), ConfigError);
    }
}

TEST_CASE("CSV round trip is bit-for-bit") {
    const auto table = random_table(77, 23, 2);
    const std::string path = "/tmp/gtetrad_dataset_roundtrip.csv";
    write_csv(table, path);
    RoleSpec roles;
    roles.covariates = {"v1", "v2"};
    const auto loaded = load_csv(path, roles);
    REQUIRE(loaded.n() == table.n());
    for (int r = 0; r < 4; ++r) {
        CHECK(loaded.role(r) == table.role(r));
    }
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(loaded.covariate(c) == table.covariate(c));
    }
    // And the serialized text is idempotent.
    CHECK(to_csv(loaded) == to_csv(table));
}

TEST_CASE("residualize removes the linear covariate signal") {
    RandomStream rng(5);
    const int n = 400;
    Eigen::VectorXd v1 = noisy_column(rng, n);
    Eigen::VectorXd v2 = noisy_column(rng, n);
    std::array<Eigen::VectorXd, 4> roles;
    for (auto& col : roles) {
        col = 1.5 + 2.0 * v1.array() - 0.5 * v2.array();
        col += 0.3 * noisy_column(rng, n);
    }
    const ObservationTable table({"x", "y", "z", "w"}, std::move(roles),
                                 {"v1", "v2"}, {v1, v2});
    const auto resid = residualize(table);
    CHECK(resid.n_covariates() == 0);
    CHECK(resid.n() == table.n());
    for (int r = 0; r < 4; ++r) {
        const auto& col = resid.role(r);
        // Exactly orthogonal to the regressors up to solver round-off.
        CHECK(std::abs(col.sum()) < 1e-8);
        CHECK(std::abs(col.dot(v1)) < 1e-8);
        CHECK(std::abs(col.dot(v2)) < 1e-8);
        // The linear signal is gone: what remains is the 0.3-scale noise.
        CHECK(col.norm() < 0.5 * std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("residualize reports collinear covariates") {
    RandomStream rng(6);
    const int n = 50;
    Eigen::VectorXd v1 = noisy_column(rng, n);
    Eigen::VectorXd v2 = 2.0 * v1;
    std::array<Eigen::VectorXd, 4> roles;
    for (auto& col : roles) col = noisy_column(rng, n);
    const ObservationTable table({"x", "y", "z", "w"}, std::move(roles),
                                 {"v1", "v2"}, {v1, v2});
    CHECK_THROWS_WITH_AS(residualize(table), doctest::Contains("collinear"),
                         NumericalError);
}

TEST_CASE("residualize requires covariates and enough rows") {
    CHECK_THROWS_AS(residualize(random_table(8, 20, 0)), ValidationError);
    CHECK_THROWS_AS(residualize(random_table(9, 3, 2)), ValidationError);
}

TEST_CASE("standardize produces zero mean and unit denominator-n sd") {
    const auto table = random_table(11, 64, 1);
    const auto standardized = standardize(table);
    for (int r = 0; r < 4; ++r) {
        const auto& col = standardized.role(r);
        CHECK(std::abs(col.mean()) < 1e-12);
        CHECK(col.squaredNorm() / static_cast<double>(col.size()) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto& cov = standardized.covariate(0);
    CHECK(std::abs(cov.mean()) < 1e-12);
    CHECK(cov.squaredNorm() / static_cast<double>(cov.size()) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("role permutations enumerate in the documented order") {
    const auto perms = enumerate_permutations();
    REQUIRE(perms.size() == 12);
    const std::vector<std::string> expect = {
        "(1,2,3,4)", "(1,3,2,4)", "(1,4,2,3)", "(2,1,3,4)",
        "(2,3,1,4)", "(2,4,1,3)", "(3,1,2,4)", "(3,2,1,4)",
        "(3,4,1,2)", "(4,1,2,3)", "(4,2,1,3)", "(4,3,1,2)",
    };
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(perms[i].label() == expect[i]);
    }
    // Z/W order is always ascending, which is what removes the double
    // counting: each unordered {Z,W} pair appears exactly once per (X,Y).
    for (const auto& p : perms) {
        CHECK(p.order[2] < p.order[3]);
    }
}

TEST_CASE("apply_permutation reassigns columns and keeps covariates") {
    const auto table = random_table(13, 8, 1);
    RolePermutation perm{{2, 0, 1, 3}};
    CHECK(perm.label() == "(3,1,2,4)");
    const auto permuted = apply_permutation(table, perm);
    CHECK(permuted.x() == table.z());
    CHECK(permuted.y() == table.x());
    CHECK(permuted.z() == table.y());
    CHECK(permuted.w() == table.w());
    CHECK(permuted.role_name(0) == "z");
    CHECK(permuted.role_name(1) == "x");
    CHECK(permuted.n_covariates() == 1);
    CHECK(permuted.covariate(0) == table.covariate(0));
}
