#pragma once

#include <span>
#include <vector>

namespace slp {

double mean(std::span<const double> values);

// Population standard deviation (divide by n). This is the convention used
// for every reported spread in this project; see README.
double population_std(std::span<const double> values);

// Quantile by linear interpolation between order statistics: rank
// h = (n - 1) * p, result = v[floor(h)] + frac(h) * (v[floor(h)+1] - v[floor(h)]).
// Input must be sorted ascending.
double quantile_sorted(std::span<const double> sorted, double p);

// Box-plot summary: quartiles, whiskers at the most extreme data points
// inside [q1 - 1.5*iqr, q3 + 1.5*iqr], everything outside listed as outliers.
struct BoxStats {
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

// Regularized incomplete beta function I_x(a, b), by continued fraction.
double reg_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with df degrees of freedom.
double student_t_cdf(double t, double df);

// Welch's unequal-variance t test. p_greater is the one-sided p-value for
// the alternative mean(a) > mean(b); variances are sample (n-1) variances.
struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_greater = 1.0;
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace slp
