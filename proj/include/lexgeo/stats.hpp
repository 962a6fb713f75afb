#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexgeo/store.hpp"

namespace lexgeo {

enum class Alternative { two_sided, greater, less };

std::string to_string(Alternative a);
Alternative alternative_from_string(const std::string& s);

/// Uniform output of every hypothesis test.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> effect_size;
  std::vector<std::size_t> n;  // sample sizes (per group, or matrix order)
  std::string method;
  Alternative alternative = Alternative::two_sided;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_resamples;
};

// Distribution tails.
double normal_cdf(double z);
double normal_sf(double z);
/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
/// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

/// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

/// Product-moment correlation. Throws "constant input".
double pearson(std::span<const double> x, std::span<const double> y);

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;
};

/// Rank correlation with two-sided t-approximation p (df = n-2).
Correlation spearman(std::span<const double> x, std::span<const double> y);

enum class MantelMethod { spearman, pearson };

/// Permutation Mantel test, one-sided greater. Rows and columns of d2 are
/// permuted jointly; replicate r draws its permutation from the substream
/// (seed XOR r). p = (1 + #{perm >= observed}) / (n_perm + 1).
TestResult mantel(const DistanceMatrix& d1, const DistanceMatrix& d2, std::size_t n_perm, std::uint64_t seed,
                  MantelMethod method = MantelMethod::spearman);

/// Exact Mantel over all n! relabelings (n <= 9); p = #{perm >= observed} / n!.
TestResult mantel_exhaustive(const DistanceMatrix& d1, const DistanceMatrix& d2,
                             MantelMethod method = MantelMethod::spearman);

/// U = #{a_i > b_j} + ties/2 computed from pooled average ranks.
double mann_whitney_statistic(std::span<const double> a, std::span<const double> b);

/// Mann-Whitney U. Exact enumeration of group labelings when |a|+|b| <= 12,
/// otherwise the tie-corrected normal approximation with continuity correction.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative);
TestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b, Alternative alternative);
TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b, Alternative alternative);

inline constexpr std::size_t kMannWhitneyExactLimit = 12;

/// Standardized mean difference with pooled (n-1) sample variance.
double cohens_d(std::span<const double> group1, std::span<const double> group2);

struct BootstrapCI {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
  bool ordered = true;  // lower <= point <= upper held for this draw
};

/// Percentile bootstrap. The statistic sees resampled indices into [0, n).
BootstrapCI bootstrap_ci(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                         std::size_t n_resamples, double confidence, std::uint64_t seed);

BootstrapCI bootstrap_ci(std::span<const double> values,
                         const std::function<double(std::span<const double>)>& statistic, std::size_t n_resamples,
                         double confidence, std::uint64_t seed);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Simple least squares; r2 = pearson^2 (0 when y is constant).
OlsFit ols_r2(std::span<const double> x, std::span<const double> y);

/// Paired t on a - b, two-sided, df = n - 1.
TestResult paired_t(std::span<const double> a, std::span<const double> b);

}  // namespace lexgeo
