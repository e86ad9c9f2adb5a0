#include "gtetrad/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>

#include "kernels_impl.hpp"

namespace gtetrad::kernels {

namespace scalar {

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
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
            const double pj = pts[j];
            double* row = D + j * n;
            for (std::size_t k = 0; k < n; ++k) row[k] = std::fabs(pts[k] - pj);
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

}  // namespace scalar

namespace {

struct KernelTable {
    Variant variant;
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*symm_matvec)(const double*, std::size_t, const double*, double*);
    void (*pairwise_distances)(const double*, std::size_t, std::size_t,
                               double*);
};

constexpr KernelTable kScalarTable = {
    Variant::scalar, &scalar::sum, &scalar::dot, &scalar::symm_matvec,
    &scalar::pairwise_distances};

KernelTable resolve() {
    const char* request = std::getenv("GTETRAD_SIMD");
    const bool force_scalar = request && std::strcmp(request, "scalar") == 0;
    const bool want_avx2 =
        !request || std::strcmp(request, "auto") == 0 ||
        std::strcmp(request, "avx2") == 0;
    const bool want_neon =
        !request || std::strcmp(request, "auto") == 0 ||
        std::strcmp(request, "neon") == 0;
    (void)want_avx2;
    (void)want_neon;
    if (!force_scalar) {
#if defined(__x86_64__) || defined(_M_X64)
        if (want_avx2 && avx2::supported()) {
            return {Variant::avx2, &avx2::sum, &avx2::dot, &avx2::symm_matvec,
                    &avx2::pairwise_distances};
        }
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
        if (want_neon && neon::supported()) {
            return {Variant::neon, &neon::sum, &neon::dot, &neon::symm_matvec,
                    &neon::pairwise_distances};
        }
#endif
    }
    return kScalarTable;
}

const KernelTable& table() {
    static const KernelTable t = resolve();
    return t;
}

}  // namespace

Variant active_variant() { return table().variant; }

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::scalar: return "scalar";
        case Variant::avx2: return "avx2";
        case Variant::neon: return "neon";
    }
    return "unknown";
}

double sum(const double* x, std::size_t n) { return table().sum(x, n); }

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}

void symm_matvec(const double* D, std::size_t n, const double* x, double* y) {
    table().symm_matvec(D, n, x, y);
}

void pairwise_distances(const double* pts, std::size_t n, std::size_t d,
                        double* D) {
    table().pairwise_distances(pts, n, d, D);
}

}  // namespace gtetrad::kernels
