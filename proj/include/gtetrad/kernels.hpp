#pragma once

#include <cstddef>

// Low-level numeric kernels for the O(n^2) distance/energy inner loops.
// Each kernel has a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected once at runtime from CPU
// capabilities. The environment variable GTETRAD_SIMD overrides selection
// with one of: auto (default), scalar, avx2, neon; requesting a variant the
// CPU cannot run falls back to scalar.
namespace gtetrad::kernels {

enum class Variant { scalar, avx2, neon };

// The variant all dispatched kernels are using (resolved on first use).
Variant active_variant();
const char* variant_name(Variant v);

double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// y = D * x for a dense symmetric row-major n-by-n matrix D.
void symm_matvec(const double* D, std::size_t n, const double* x, double* y);

// Pairwise Euclidean distances between n points of dimension d (row-major
// pts, n*d) written into row-major D (n*n). Full matrix, zero diagonal.
void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D);

// Reference implementations, exposed so equivalence tests can compare the
// dispatched kernels against them regardless of the active variant.
namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void symm_matvec(const double* D, std::size_t n, const double* x, double* y);
void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D);
}  // namespace scalar

}  // namespace gtetrad::kernels
