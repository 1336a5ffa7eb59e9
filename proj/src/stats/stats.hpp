#pragma once

#include <span>
#include <string>
#include <vector>

namespace hynoma::stats {

struct AnovaResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  std::vector<double> group_means;
  std::vector<double> group_variances; // unbiased, n-1 denominator
  double ss_between = 0.0;
  double ss_within = 0.0;
};

// One-way fixed-effects ANOVA. Needs >= 2 groups with >= 2 samples each.
// The fully degenerate case (zero between AND zero within variance) is
// defined as F = 0, p = 1.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Standardized mean difference (mean_a - mean_b) / pooled SD. Zero pooled SD
// yields 0 for equal means and +/-infinity otherwise.
double cohens_d(std::span<const double> a, std::span<const double> b);

// Student-t confidence interval for the mean, level in (0, 1).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval confidence_interval(std::span<const double> samples, double level);

// Welch's unequal-variance t-test (neutral post-hoc substitute; the source
// methodology names no specific procedure).
struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

// --- special functions (implemented internally, documented tolerances) ---

// Regularized incomplete beta I_x(a, b), continued fraction (Lentz),
// absolute accuracy ~1e-12 for moderate a, b.
double regularized_incomplete_beta(double x, double a, double b);

// Survival function P(F > f) for the F distribution, accuracy 1e-6.
double f_distribution_sf(double f, int df1, int df2);

// Two-sided Student-t CDF/SF helpers.
double t_distribution_cdf(double t, double df);

// t quantile (inverse CDF), accuracy 1e-4, via bisection on the CDF.
double t_quantile(double p, double df);

// Survival function P(X > x) for chi-square with k degrees of freedom,
// via the regularized upper incomplete gamma, accuracy ~1e-10.
double chi_square_sf(double x, int k);

// Pearson chi-square goodness-of-fit p-value for observed counts vs expected
// proportions (used by the sampling-uniformity checks).
double chi_square_gof_p(std::span<const long long> observed, std::span<const double> expected_counts);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // unbiased

} // namespace hynoma::stats
