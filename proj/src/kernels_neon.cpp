// NEON kernel variants, compiled on aarch64 only (baseline feature there).
#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

namespace gtetrad::kernels::neon {

bool supported() { return true; }

double sum(const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
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
            const float64x2_t pj = vdupq_n_f64(pts[j]);
            double* row = D + j * n;
            std::size_t k = 0;
            for (; k + 2 <= n; k += 2) {
                vst1q_f64(row + k, vabdq_f64(vld1q_f64(pts + k), pj));
            }
            for (; k < n; ++k) row[k] = std::fabs(pts[k] - pj);
        }
        return;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double* pj = pts + j * d;
        double* row = D + j * n;
        for (std::size_t k = 0; k < n; ++k) {
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

}  // namespace gtetrad::kernels::neon
