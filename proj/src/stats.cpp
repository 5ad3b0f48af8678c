#include "labelrank/stats.hpp"

#include <cmath>
#include <string>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

constexpr double kBetaTolerance = 1e-12;

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kBetaTolerance)
            return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw UsageError("incomplete beta needs positive parameters");
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0))
        throw UsageError("student_t_cdf needs positive degrees of freedom");
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw UsageError("pearson_r: series differ in length");
    const std::size_t n = x.size();
    if (n < 3)
        throw UsageError("pearson_r needs at least 3 samples, got " + std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DataError("pearson_r undefined for a constant series");
    const double r = sxy / std::sqrt(sxx * syy);
    return r > 1.0 ? 1.0 : (r < -1.0 ? -1.0 : r);
}

double t_test_two_sided(double r, std::size_t n) {
    if (n < 3)
        throw UsageError("t_test_two_sided needs n >= 3, got " + std::to_string(n));
    if (!(r >= -1.0 && r <= 1.0))
        throw UsageError("correlation must lie in [-1, 1]");
    const double abs_r = std::fabs(r);
    if (abs_r == 1.0)
        return 0.0;  // degenerate limit
    const auto df = static_cast<double>(n - 2);
    const double t = abs_r * std::sqrt(df / (1.0 - r * r));
    // Two-sided tail: 2·(1 - CDF(t)) == I_{df/(df+t^2)}(df/2, 1/2).
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace labelrank
