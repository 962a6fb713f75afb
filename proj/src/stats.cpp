#include "lexgeo/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "lexgeo/error.hpp"
#include "lexgeo/numeric.hpp"
#include "lexgeo/parallel.hpp"
#include "lexgeo/rng.hpp"

namespace lexgeo {

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided:
      return "two_sided";
    case Alternative::greater:
      return "greater";
    case Alternative::less:
      return "less";
  }
  return "two_sided";
}

Alternative alternative_from_string(const std::string& s) {
  if (s == "two_sided" || s == "two-sided") return Alternative::two_sided;
  if (s == "greater") return Alternative::greater;
  if (s == "less") return Alternative::less;
  fail("unknown alternative '" + s + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

// Lentz's method for the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

void require_same_length(std::span<const double> x, std::span<const double> y, std::size_t min_n, const char* what) {
  require(x.size() == y.size(), std::string(what) + ": length mismatch");
  require(x.size() >= min_n, std::string(what) + ": needs at least " + std::to_string(min_n) + " observations");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  require(a > 0 && b > 0, "incomplete_beta: shape parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  require(df > 0, "student_t: df must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return std::clamp(incomplete_beta(df / 2.0, 0.5, df / (df + t * t)), 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 2, "pearson");
  const double mx = mean(x);
  const double my = mean(y);
  KahanSum sxy;
  KahanSum sxx;
  KahanSum syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) fail("constant input");
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 3, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  Correlation out;
  out.rho = pearson(rx, ry);
  const double n = static_cast<double>(x.size());
  const double denom = 1.0 - out.rho * out.rho;
  if (denom <= 0.0) {
    out.p_value = 0.0;
  } else {
    out.p_value = student_t_two_sided(out.rho * std::sqrt((n - 2.0) / denom), n - 2.0);
  }
  return out;
}

namespace {

// Mantel in "centered x times permuted y" form: the denominators are
// permutation invariant, so each replicate costs one pass over the triangle.
struct MantelKernel {
  std::size_t n = 0;
  std::vector<double> xc;  // centered upper triangle of d1, row-major i<j
  std::vector<double> y;   // full n x n matrix of d2 values (or ranks)
  double denom = 1.0;

  MantelKernel(const DistanceMatrix& d1, const DistanceMatrix& d2, MantelMethod method) : n(d1.size()) {
    require(d1.labels == d2.labels, "mantel: label mismatch between matrices");
    require(n >= 4, "mantel: needs at least 4 labels");
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        a.push_back(d1.at(i, j));
        b.push_back(d2.at(i, j));
      }
    if (method == MantelMethod::spearman) {
      a = average_ranks(a);
      b = average_ranks(b);
    }
    const double ma = mean(a);
    const double mb = mean(b);
    KahanSum saa;
    KahanSum sbb;
    xc.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      xc[k] = a[k] - ma;
      saa.add(xc[k] * xc[k]);
      sbb.add((b[k] - mb) * (b[k] - mb));
    }
    if (!(saa.value() > 0.0) || !(sbb.value() > 0.0)) fail("constant input");
    denom = std::sqrt(saa.value() * sbb.value());
    y.assign(n * n, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k) y[i * n + j] = y[j * n + i] = b[k];
  }

  double statistic(std::span<const std::size_t> perm) const {
    KahanSum s;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = y.data() + perm[i] * n;
      for (std::size_t j = i + 1; j < n; ++j, ++k) s.add(xc[k] * row[perm[j]]);
    }
    return std::clamp(s.value() / denom, -1.0, 1.0);
  }
};

bool at_least(double value, double observed) {
  return value >= observed - 1e-12 * std::max(1.0, std::fabs(observed));
}

const char* mantel_method_tag(MantelMethod m) { return m == MantelMethod::spearman ? "spearman" : "pearson"; }

}  // namespace

TestResult mantel(const DistanceMatrix& d1, const DistanceMatrix& d2, std::size_t n_perm, std::uint64_t seed,
                  MantelMethod method) {
  require(n_perm >= 1, "mantel: n_perm must be at least 1");
  const MantelKernel kernel(d1, d2, method);
  std::vector<std::size_t> identity(kernel.n);
  std::iota(identity.begin(), identity.end(), 0);
  const double observed = kernel.statistic(identity);

  std::vector<double> stats(n_perm);
  parallel_for(n_perm, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    std::vector<std::size_t> perm = identity;
    rng.shuffle(std::span<std::size_t>(perm));
    stats[r] = kernel.statistic(perm);
  });
  const auto hits = static_cast<std::size_t>(
      std::count_if(stats.begin(), stats.end(), [&](double s) { return at_least(s, observed); }));

  TestResult t;
  t.statistic = observed;
  t.p_value = static_cast<double>(hits + 1) / static_cast<double>(n_perm + 1);
  t.n = {kernel.n};
  t.method = std::string("mantel_") + mantel_method_tag(method);
  t.alternative = Alternative::greater;
  t.seed = seed;
  t.n_resamples = n_perm;
  return t;
}

TestResult mantel_exhaustive(const DistanceMatrix& d1, const DistanceMatrix& d2, MantelMethod method) {
  const MantelKernel kernel(d1, d2, method);
  require(kernel.n <= 9, "mantel_exhaustive: at most 9 labels");
  std::vector<std::size_t> perm(kernel.n);
  std::iota(perm.begin(), perm.end(), 0);
  const double observed = kernel.statistic(perm);
  std::size_t hits = 0;
  std::size_t total = 0;
  do {
    ++total;
    if (at_least(kernel.statistic(perm), observed)) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));

  TestResult t;
  t.statistic = observed;
  t.p_value = static_cast<double>(hits) / static_cast<double>(total);
  t.n = {kernel.n};
  t.method = std::string("mantel_exhaustive_") + mantel_method_tag(method);
  t.alternative = Alternative::greater;
  t.n_resamples = total;
  return t;
}

double mann_whitney_statistic(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "mann_whitney_u: empty group");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = average_ranks(pooled);
  KahanSum ra;
  for (std::size_t i = 0; i < a.size(); ++i) ra.add(ranks[i]);
  const double na = static_cast<double>(a.size());
  return ra.value() - na * (na + 1.0) / 2.0;
}

TestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  const double u = mann_whitney_statistic(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double N = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i + 1;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mu = na * nb / 2.0;
  const double var = N > 1.0 ? na * nb / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0))) : 0.0;

  double p = 1.0;
  if (var > 0.0) {
    const double sd = std::sqrt(var);
    switch (alternative) {
      case Alternative::greater:
        p = normal_sf((u - mu - 0.5) / sd);
        break;
      case Alternative::less:
        p = normal_cdf((u - mu + 0.5) / sd);
        break;
      case Alternative::two_sided:
        p = std::min(1.0, 2.0 * normal_sf((std::fabs(u - mu) - 0.5) / sd));
        break;
    }
  }
  TestResult t;
  t.statistic = u;
  t.p_value = std::clamp(p, 0.0, 1.0);
  t.n = {a.size(), b.size()};
  t.method = "mann_whitney_u_normal";
  t.alternative = alternative;
  return t;
}

TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  require(!a.empty() && !b.empty(), "mann_whitney_u: empty group");
  require(a.size() + b.size() <= 20, "mann_whitney_u_exact: at most 20 observations");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = average_ranks(pooled);
  const std::size_t N = pooled.size();
  const std::size_t na = a.size();
  const double offset = static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;
  const double mu = static_cast<double>(na) * static_cast<double>(b.size()) / 2.0;

  double observed = 0.0;
  for (std::size_t i = 0; i < na; ++i) observed += ranks[i];
  observed -= offset;

  // Walk all subsets of size na via bitmask. Rank sums are multiples of 1/2,
  // so comparisons are exact.
  std::size_t hits = 0;
  std::size_t total = 0;
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
    double rs = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      if (mask & (1u << i)) rs += ranks[i];
    const double u = rs - offset;
    ++total;
    bool hit = false;
    switch (alternative) {
      case Alternative::greater:
        hit = u >= observed;
        break;
      case Alternative::less:
        hit = u <= observed;
        break;
      case Alternative::two_sided:
        hit = std::fabs(u - mu) >= std::fabs(observed - mu);
        break;
    }
    hits += hit ? 1 : 0;
  }
  TestResult t;
  t.statistic = observed;
  t.p_value = static_cast<double>(hits) / static_cast<double>(total);
  t.n = {a.size(), b.size()};
  t.method = "mann_whitney_u_exact";
  t.alternative = alternative;
  return t;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  require(!a.empty() && !b.empty(), "mann_whitney_u: empty group");
  if (a.size() + b.size() <= kMannWhitneyExactLimit) return mann_whitney_u_exact(a, b, alternative);
  return mann_whitney_u_normal(a, b, alternative);
}

double cohens_d(std::span<const double> group1, std::span<const double> group2) {
  require(group1.size() >= 2 && group2.size() >= 2, "cohens_d: each group needs at least 2 values");
  const double n1 = static_cast<double>(group1.size());
  const double n2 = static_cast<double>(group2.size());
  const double pooled =
      ((n1 - 1.0) * sample_variance(group1) + (n2 - 1.0) * sample_variance(group2)) / (n1 + n2 - 2.0);
  if (!(pooled > 0.0)) fail("cohens_d: zero pooled variance");
  return (mean(group1) - mean(group2)) / std::sqrt(pooled);
}

namespace {

// numpy's default (linear interpolation between closest ranks)
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BootstrapCI bootstrap_ci(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                         std::size_t n_resamples, double confidence, std::uint64_t seed) {
  require(n >= 2, "bootstrap: sample size must be at least 2");
  require(n_resamples >= 100, "bootstrap: n_resamples must be at least 100");
  require(confidence > 0.0 && confidence < 1.0, "bootstrap: confidence must be in (0, 1)");

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  BootstrapCI ci;
  ci.point = statistic(all);
  ci.confidence = confidence;
  ci.n_resamples = n_resamples;
  ci.seed = seed;

  std::vector<double> reps(n_resamples);
  parallel_for(n_resamples, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    double v = 0.0;
    try {
      v = statistic(idx);
    } catch (const std::exception& e) {
      fail("bootstrap replicate " + std::to_string(r) + ": " + e.what());
    }
    if (std::isnan(v)) fail("bootstrap replicate " + std::to_string(r) + ": statistic undefined");
    reps[r] = v;
  });
  std::sort(reps.begin(), reps.end());
  const double alpha = 1.0 - confidence;
  ci.lower = quantile_sorted(reps, alpha / 2.0);
  ci.upper = quantile_sorted(reps, 1.0 - alpha / 2.0);
  ci.ordered = ci.lower <= ci.point && ci.point <= ci.upper;
  return ci;
}

BootstrapCI bootstrap_ci(std::span<const double> values,
                         const std::function<double(std::span<const double>)>& statistic, std::size_t n_resamples,
                         double confidence, std::uint64_t seed) {
  return bootstrap_ci(
      values.size(),
      [&](std::span<const std::size_t> idx) {
        std::vector<double> sample;
        sample.reserve(idx.size());
        for (std::size_t i : idx) sample.push_back(values[i]);
        return statistic(sample);
      },
      n_resamples, confidence, seed);
}

OlsFit ols_r2(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 3, "ols_r2");
  const double mx = mean(x);
  const double my = mean(y);
  KahanSum sxy;
  KahanSum sxx;
  KahanSum syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
    syy.add((y[i] - my) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) fail("ols_r2: constant predictor");
  OlsFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (syy.value() > 0.0) {
    const double r = std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
    fit.r2 = r * r;
  }
  return fit;
}

TestResult paired_t(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, 3, "paired_t");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double var = sample_variance(diff);
  if (!(var > 0.0)) fail("paired_t: zero difference variance");
  const double n = static_cast<double>(diff.size());
  TestResult t;
  t.statistic = mean(diff) / std::sqrt(var / n);
  t.p_value = student_t_two_sided(t.statistic, n - 1.0);
  t.n = {diff.size()};
  t.method = "paired_t";
  t.alternative = Alternative::two_sided;
  return t;
}

}  // namespace lexgeo
