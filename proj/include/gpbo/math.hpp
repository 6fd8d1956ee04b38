#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpbo::math {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLog2Pi = 1.83787706640934548356;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double normal_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

/// Standard normal distribution function, tail-accurate via erfc.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

/// Standard normal quantile (Wichura's AS 241, double-precision branch).
/// Accurate to ~1e-15 over p in (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must be in (0, 1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -value : value;
}

/// Mean of a normal(mu, sd^2) truncated to [lo, hi].
inline double truncated_normal_mean(double mu, double sd, double lo, double hi) {
    const double a = (lo - mu) / sd;
    const double b = (hi - mu) / sd;
    const double z = normal_cdf(b) - normal_cdf(a);
    if (z <= 0.0) {
        // Degenerate truncation window; fall back to the nearest bound.
        return mu < lo ? lo : hi;
    }
    return mu + sd * (normal_pdf(a) - normal_pdf(b)) / z;
}

/// Inverse-CDF draw from normal(mu, sd^2) truncated to [lo, hi].
/// u is a uniform(0,1) variate; consumes nothing itself.
inline double truncated_normal_sample(double mu, double sd, double lo, double hi, double u) {
    const double fa = normal_cdf((lo - mu) / sd);
    const double fb = normal_cdf((hi - mu) / sd);
    double p = fa + u * (fb - fa);
    // Clamp away from {0,1}: quantile diverges there and the truncation
    // bounds are the correct limits.
    const double tiny = 1e-300;
    if (p <= tiny) return lo;
    if (p >= 1.0 - 1e-16) return hi;
    const double x = mu + sd * normal_quantile(p);
    return std::fmin(hi, std::fmax(lo, x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace gpbo::math
