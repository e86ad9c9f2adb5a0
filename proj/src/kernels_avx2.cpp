// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64 only; callers confirm supported() before use.
#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

namespace gtetrad::kernels::avx2 {

bool supported() {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

const __m256d kAbsMask =
    _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));

}  // namespace

double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                               acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                               acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void symm_matvec(const double* D, std::size_t n, const double* x, double* y) {
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = dot(D + j * n, x, n);
    }
}

void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D) {
    if (d == 1) {
        for (std::size_t j = 0; j < n; ++j) {
            const __m256d pj = _mm256_set1_pd(pts[j]);
            double* row = D + j * n;
            std::size_t k = 0;
            for (; k + 4 <= n; k += 4) {
                const __m256d diff =
                    _mm256_sub_pd(_mm256_loadu_pd(pts + k), pj);
                _mm256_storeu_pd(row + k, _mm256_and_pd(diff, kAbsMask));
            }
            for (; k < n; ++k) row[k] = std::fabs(pts[k] - pts[j]);
        }
        return;
    }
    // General d: accumulate squared coordinate differences column by column
    // over a vectorized k loop, then take one vectorized sqrt pass per row.
    for (std::size_t j = 0; j < n; ++j) {
        const double* pj = pts + j * d;
        double* row = D + j * n;
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t c = 0; c < d; ++c) {
                const __m256d pjc = _mm256_set1_pd(pj[c]);
                const __m256d pk = _mm256_set_pd(
                    pts[(k + 3) * d + c], pts[(k + 2) * d + c],
                    pts[(k + 1) * d + c], pts[k * d + c]);
                const __m256d diff = _mm256_sub_pd(pjc, pk);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
            }
            _mm256_storeu_pd(row + k, _mm256_sqrt_pd(acc));
        }
        for (; k < n; ++k) {
            const double* pk = pts + k * d;
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = pj[c] - pk[c];
                acc += diff * diff;
            }
            row[k] = std::sqrt(acc);
        }
    }
}

}  // namespace gtetrad::kernels::avx2
