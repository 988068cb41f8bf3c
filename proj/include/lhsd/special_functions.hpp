#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lhsd/errors.hpp"

namespace lhsd {

namespace detail {

// Lower regularized incomplete gamma by power series, x < a + 1.
inline double gamma_p_series(double a, double x, double lg) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - lg);
    }
    throw numerical_guard_error("gamma_p: series failed to converge");
}

// Upper regularized incomplete gamma by Lentz continued fraction, x >= a + 1.
inline double gamma_q_cf(double a, double x, double lg) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 4.0 * std::numeric_limits<double>::epsilon())
            return std::exp(-x + a * std::log(x) - lg) * h;
    }
    throw numerical_guard_error("gamma_q: continued fraction failed to converge");
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p: shape must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) return detail::gamma_p_series(a, x, lg);
    return 1.0 - detail::gamma_q_cf(a, x, lg);
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// Gamma(shape, scale) CDF.
inline double gamma_cdf(double shape, double scale, double x) {
    if (scale <= 0.0) throw std::invalid_argument("gamma_cdf: scale must be positive");
    if (x <= 0.0) return 0.0;
    return gamma_p(shape, x / scale);
}

// Inverse of P(a, .) at probability p by safeguarded Newton iteration on a
// maintained bracket; relative tolerance 1e-10. `guess` (if positive) seeds
// the iteration, which pays off when consecutive calls are at nearby
// quantile levels.
inline double inverse_gamma_p(double a, double p, double guess = -1.0) {
    if (a <= 0.0) throw std::invalid_argument("inverse_gamma_p: shape must be positive");
    if (p < 0.0 || p >= 1.0)
        throw numerical_guard_error("inverse_gamma_p: probability out of [0,1)");
    if (p == 0.0) return 0.0;

    const double lg = std::lgamma(a);
    double x;
    if (guess > 0.0) {
        x = guess;
    } else if (a > 1.0) {
        // Wilson-Hilferty
        double t = std::sqrt(-2.0 * std::log(p < 0.5 ? p : 1.0 - p));
        double z = t - (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481));
        if (p < 0.5) z = -z;
        double h = 2.0 / (9.0 * a);
        x = a * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
        if (x <= 0.0) x = 1e-8;
    } else {
        // small-shape start from P(a,x) ~ x^a / Gamma(a+1)
        double t = 1.0 - a * (0.253 + a * 0.12);
        if (p < t)
            x = std::pow(p / t, 1.0 / a);
        else
            x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double err = gamma_p(a, x) - p;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        double logpdf = -x + (a - 1.0) * std::log(x) - lg;
        double step = err * std::exp(-logpdf);
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = std::isinf(hi) ? (lo + 2.0 * x) : 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-12 * xn) return xn;
        x = xn;
    }
    throw numerical_guard_error("inverse_gamma_p: no convergence");
}

inline double inverse_gamma_cdf(double shape, double scale, double p) {
    return scale * inverse_gamma_p(shape, p);
}

// Inverts a whole column of probabilities. Processes levels in sorted order
// with the previous root as warm start, then scatters results back.
inline void inverse_gamma_cdf_batch(double shape, double scale,
                                    std::span<const double> p, std::span<double> out) {
    const std::size_t n = p.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t l, std::size_t r) { return p[l] < p[r]; });
    double prev = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        double x = inverse_gamma_p(shape, p[idx[k]], prev);
        prev = x > 0.0 ? x : -1.0;
        out[idx[k]] = scale * x;
    }
}

// Standard normal quantile (Acklam's rational approximation plus one
// Halley refinement step); absolute error well below 1e-12.
inline double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley step against erfc
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

}  // namespace lhsd
