#include "stats/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hynoma::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova needs >= 2 groups");
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("anova needs >= 2 samples per group");
    total += g.size();
  }

  AnovaResult r;
  double grand = 0.0;
  for (const auto& g : groups)
    for (double x : g) grand += x;
  grand /= static_cast<double>(total);

  for (const auto& g : groups) {
    const double m = mean(g);
    r.group_means.push_back(m);
    r.group_variances.push_back(variance(g));
    r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) r.ss_within += (x - m) * (x - m);
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(total - groups.size());

  const double ms_between = r.ss_between / r.df_between;
  const double ms_within = r.ss_within / r.df_within;
  if (ms_within == 0.0) {
    if (ms_between == 0.0) {
      r.f = 0.0;
      r.p_value = 1.0;
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.f = ms_between / ms_within;
  r.p_value = f_distribution_sf(r.f, r.df_between, r.df_within);
  return r;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("cohens_d needs >= 2 samples per group");
  const double ma = mean(a), mb = mean(b);
  const double va = variance(a), vb = variance(b);
  const double pooled =
      ((a.size() - 1) * va + (b.size() - 1) * vb) / static_cast<double>(a.size() + b.size() - 2);
  if (pooled == 0.0) {
    if (ma == mb) return 0.0;
    return ma > mb ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
  }
  return (ma - mb) / std::sqrt(pooled);
}

Interval confidence_interval(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw std::invalid_argument("confidence interval needs >= 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
  const double m = mean(samples);
  const double sd = std::sqrt(variance(samples));
  const double n = static_cast<double>(samples.size());
  const double t = t_quantile(0.5 + level / 2.0, n - 1.0);
  const double half = t * sd / std::sqrt(n);
  return {m - half, m + half};
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t needs >= 2 samples per group");
  const double ma = mean(a), mb = mean(b);
  const double va = variance(a), vb = variance(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = va / na, sb = vb / nb;
  WelchResult r;
  if (sa + sb == 0.0) {
    r.t = (ma == mb) ? 0.0
                     : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.df = na + nb - 2.0;
    r.p_two_sided = (ma == mb) ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p_two_sided = 2.0 * (1.0 - t_distribution_cdf(std::abs(r.t), r.df));
  return r;
}

// ---- special functions ----

static double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a,b), modified Lentz algorithm.
static double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1) throw std::invalid_argument("f sf: degrees of freedom must be >= 1");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double d1 = df1, d2 = df2;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  return regularized_incomplete_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0);
}

double t_distribution_cdf(double t, double df) {
  if (df <= 0.0) throw std::invalid_argument("t cdf: df must be positive");
  const double x = df / (t * t + df);
  const double half_tail = 0.5 * regularized_incomplete_beta(x, df / 2.0, 0.5);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("t quantile: p must be in (0, 1)");
  if (df <= 0.0) throw std::invalid_argument("t quantile: df must be positive");
  if (p == 0.5) return 0.0;
  // symmetric, so solve for the upper half and mirror
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0, hi = 1.0;
  while (t_distribution_cdf(hi, df) < target) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (t_distribution_cdf(mid, df) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * std::max(1.0, hi)) break;
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
// continued fraction otherwise.
static double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Q(a,x) continued fraction (Lentz)
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_sf(double x, int k) {
  if (k < 1) throw std::invalid_argument("chi square: k must be >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(k / 2.0, x / 2.0);
}

double chi_square_gof_p(std::span<const long long> observed, std::span<const double> expected_counts) {
  if (observed.size() != expected_counts.size() || observed.size() < 2)
    throw std::invalid_argument("chi square gof: need matching bins (>= 2)");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_counts[i];
    if (e <= 0.0) throw std::invalid_argument("chi square gof: expected count must be positive");
    const double diff = static_cast<double>(observed[i]) - e;
    stat += diff * diff / e;
  }
  return chi_square_sf(stat, static_cast<int>(observed.size()) - 1);
}

} // namespace hynoma::stats
