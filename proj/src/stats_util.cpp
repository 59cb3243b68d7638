#include "slp/stats_util.hpp"

#include <algorithm>
#include <cmath>

#include "slp/common.hpp"

namespace slp {

double mean(std::span<const double> values) {
    if (values.empty()) throw NumericError("mean: empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_std(std::span<const double> values) {
    double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw NumericError("quantile: empty sample");
    if (p < 0.0 || p > 1.0) throw ConfigError("quantile: p outside [0, 1]");
    double h = static_cast<double>(sorted.size() - 1) * p;
    auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) throw NumericError("box_stats: empty sample");
    BoxStats s;
    s.mean = mean(values);
    s.std = population_std(values);
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    double iqr = s.q3 - s.q1;
    double fence_low = s.q1 - 1.5 * iqr;
    double fence_high = s.q3 + 1.5 * iqr;
    // Whiskers sit on the most extreme points inside the fences; with all
    // points outside (impossible since q1, q3 are inside) this cannot stay
    // unset.
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    for (double v : values) {
        if (v >= fence_low) {
            s.whisker_low = v;
            break;
        }
    }
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        if (*it <= fence_high) {
            s.whisker_high = *it;
            break;
        }
    }
    for (double v : values) {
        if (v < fence_low || v > fence_high) s.outliers.push_back(v);
    }
    return s;
}

namespace {

// Continued-fraction core of the incomplete beta function, evaluated with
// the modified Lentz method. Requires x < (a + 1) / (a + b + 2) for fast
// convergence; the wrapper handles the reflected case.
double incbeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double f = d;
    for (int m = 1; m <= 300; ++m) {
        double dm = static_cast<double>(m);
        // even step
        double numerator = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + numerator * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < tiny) c = tiny;
        f *= c * d;
        // odd step
        numerator = -(a + dm) * (a + b + dm) * x /
                    ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + numerator * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < tiny) c = tiny;
        double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) return f;
    }
    throw NumericError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConfigError("incomplete beta: a, b must be positive");
    if (x < 0.0 || x > 1.0)
        throw ConfigError("incomplete beta: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - reg_incomplete_beta(b, a, 1.0 - x);
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
    return std::exp(log_front) * incbeta_cf(a, b, x) / a;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ConfigError("t distribution: df must be positive");
    double x = df / (df + t * t);
    double tail = 0.5 * reg_incomplete_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw NumericError("welch_t_test: need at least 2 samples per group");
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double ma = mean(a);
    double mb = mean(b);
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;
    double se2 = va / na + vb / nb;
    if (se2 <= 0.0)
        throw NumericError("welch_t_test: zero variance in both groups");
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 /
           (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    r.p_greater = 1.0 - student_t_cdf(r.t, r.df);
    return r;
}

}  // namespace slp
