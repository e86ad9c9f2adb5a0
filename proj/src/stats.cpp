#include "gtetrad/stats.hpp"

#include <cmath>
#include <limits>

#include "gtetrad/errors.hpp"
#include "gtetrad/kernels.hpp"

namespace gtetrad {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// AS241 PPND16 coefficient sets (central / middle / far-tail regions).
constexpr double kA[8] = {
    3.3871328727963666080e0,  1.3314166789178437745e2,
    1.9715909503065514427e3,  1.3731693765509461125e4,
    4.5921953931549871457e4,  6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double kB[8] = {
    1.0,                      4.2313330701600911252e1,
    6.8718700749205790830e2,  5.3941960214247511077e3,
    2.1213794301586595867e4,  3.9307895800092710610e4,
    2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double kC[8] = {
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {
    1.0,                      2.05319162663775882187e0,
    1.67638483018380384940e0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kE[8] = {
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {
    1.0,                      5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

double horner8(const double* c, double x) {
    double v = c[7];
    for (int i = 6; i >= 0; --i) v = v * x + c[i];
    return v;
}

}  // namespace

double normal_quantile(double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
        throw ValidationError("normal_quantile: p must lie in [0, 1]");
    }
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner8(kA, r) / horner8(kB, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = horner8(kC, r) / horner8(kD, r);
    } else {
        r -= 5.0;
        value = horner8(kE, r) / horner8(kF, r);
    }
    return (q < 0.0) ? -value : value;
}

double chi2_survival_df2(double t) {
    if (t < 0.0) return 1.0;
    return std::exp(-0.5 * t);
}

double gt_p_value(double t_n) {
    if (t_n < 0.0) return 1.0;
    return std::erfc(std::sqrt(0.5 * t_n));
}

double gt_threshold(double alpha) {
    const double z = normal_quantile(1.0 - 0.5 * alpha);
    return z * z;
}

double mean(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    return kernels::sum(x, n) / static_cast<double>(n);
}

double variance(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    const double m = mean(x, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - m;
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

}  // namespace gtetrad
