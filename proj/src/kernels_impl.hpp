#pragma once

#include <cstddef>

// Internal: per-ISA kernel entry points. Only the translation units compiled
// for the matching architecture define these symbols; dispatch references
// them under the same compile-time guards.
namespace gtetrad::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
bool supported();
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void symm_matvec(const double* D, std::size_t n, const double* x, double* y);
void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
namespace neon {
bool supported();
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void symm_matvec(const double* D, std::size_t n, const double* x, double* y);
void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D);
}  // namespace neon
#endif

}  // namespace gtetrad::kernels
