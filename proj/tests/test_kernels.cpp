#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "gtetrad/kernels.hpp"
#include "gtetrad/rng.hpp"

using namespace gtetrad;

namespace {

std::vector<double> random_vector(RandomStream& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return out;
}

}  // namespace

TEST_CASE("scalar sum and dot match hand values") {
    const double x[] = {1.0, 2.0, 3.0, -0.5};
    const double y[] = {2.0, -1.0, 0.5, 4.0};
    CHECK(kernels::scalar::sum(x, 4) == doctest::Approx(5.5).epsilon(1e-15));
    CHECK(kernels::scalar::dot(x, y, 4) ==
          doctest::Approx(2.0 - 2.0 + 1.5 - 2.0).epsilon(1e-15));
    CHECK(kernels::scalar::sum(x, 0) == 0.0);
    CHECK(kernels::scalar::dot(x, y, 0) == 0.0);
}

TEST_CASE("scalar pairwise distances match hand values") {
    // Three points in the plane: (0,0), (3,4), (0,4).
    const double pts[] = {0.0, 0.0, 3.0, 4.0, 0.0, 4.0};
    double D[9];
    kernels::scalar::pairwise_distances(pts, 3, 2, D);
    CHECK(D[0] == 0.0);
    CHECK(D[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(D[2] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(D[3] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(D[4] == 0.0);
    CHECK(D[5] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(D[7] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(D[8] == 0.0);
}

TEST_CASE("scalar symm_matvec matches hand value") {
    // Symmetric 3x3 matrix times (1, -1, 2).
    const double D[] = {2.0, 1.0, 0.5, 1.0, 3.0, -1.0, 0.5, -1.0, 4.0};
    const double x[] = {1.0, -1.0, 2.0};
    double y[3];
    kernels::scalar::symm_matvec(D, 3, x, y);
    CHECK(y[0] == doctest::Approx(2.0 - 1.0 + 1.0).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(1.0 - 3.0 - 2.0).epsilon(1e-15));
    CHECK(y[2] == doctest::Approx(0.5 + 1.0 + 8.0).epsilon(1e-15));
}

TEST_CASE("dispatched kernels agree with scalar reference") {
    INFO("active variant: "
         << kernels::variant_name(kernels::active_variant()));
    RandomStream rng(2026);
    // Sizes straddle the SIMD width, including empty and sub-width tails.
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                          std::size_t{3}, std::size_t{4}, std::size_t{5},
                          std::size_t{7}, std::size_t{8}, std::size_t{13},
                          std::size_t{64}, std::size_t{101}}) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        const double ref_sum = kernels::scalar::sum(a.data(), n);
        const double ref_dot = kernels::scalar::dot(a.data(), b.data(), n);
        CHECK(kernels::sum(a.data(), n) ==
              doctest::Approx(ref_sum).epsilon(1e-12));
        CHECK(kernels::dot(a.data(), b.data(), n) ==
              doctest::Approx(ref_dot).epsilon(1e-12));
    }
}

TEST_CASE("dispatched symm_matvec agrees with scalar reference") {
    RandomStream rng(99);
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4},
                          std::size_t{9}, std::size_t{31}, std::size_t{64}}) {
        std::vector<double> D(n * n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k <= j; ++k) {
                const double v = rng.normal();
                D[j * n + k] = v;
                D[k * n + j] = v;
            }
        }
        const auto x = random_vector(rng, n);
        std::vector<double> expect(n), got(n);
        kernels::scalar::symm_matvec(D.data(), n, x.data(), expect.data());
        kernels::symm_matvec(D.data(), n, x.data(), got.data());
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("dispatched pairwise distances agree with scalar reference") {
    RandomStream rng(7);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{5},
                          std::size_t{8}, std::size_t{17}, std::size_t{33}}) {
        for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                              std::size_t{5}}) {
            const auto pts = random_vector(rng, n * d);
            std::vector<double> expect(n * n), got(n * n);
            kernels::scalar::pairwise_distances(pts.data(), n, d,
                                                expect.data());
            kernels::pairwise_distances(pts.data(), n, d, got.data());
            for (std::size_t i = 0; i < n * n; ++i) {
                CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("pairwise distance output is symmetric with zero diagonal") {
    RandomStream rng(31);
    const std::size_t n = 23;
    const std::size_t d = 2;
    const auto pts = random_vector(rng, n * d);
    std::vector<double> D(n * n);
    kernels::pairwise_distances(pts.data(), n, d, D.data());
    int asym = 0;
    int negative = 0;
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(D[j * n + j] == 0.0);
        for (std::size_t k = 0; k < j; ++k) {
            // Bitwise symmetry: every entry is computed by the same
            // operation sequence regardless of which row produced it.
            if (D[j * n + k] != D[k * n + j]) ++asym;
            if (D[j * n + k] < 0.0) ++negative;
        }
    }
    CHECK(asym == 0);
    CHECK(negative == 0);
}

TEST_CASE("variant names are stable strings") {
    CHECK(std::string(kernels::variant_name(kernels::Variant::scalar)) ==
          "scalar");
    CHECK(std::string(kernels::variant_name(kernels::Variant::avx2)) ==
          "avx2");
    CHECK(std::string(kernels::variant_name(kernels::Variant::neon)) ==
          "neon");
    // The resolved variant must be one of the known names.
    const std::string active =
        kernels::variant_name(kernels::active_variant());
    CHECK((active == "scalar" || active == "avx2" || active == "neon"));
}
