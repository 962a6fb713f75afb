#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lexgeo/error.hpp"
#include "lexgeo/stats.hpp"
#include "oracles.hpp"

using namespace lexgeo;

namespace {

constexpr int kInstances = 250;

Alternative alt_of(int a) { return a == 0 ? Alternative::greater : (a == 1 ? Alternative::less : Alternative::two_sided); }

}  // namespace

TEST_CASE("average ranks share tied positions") {
  const std::vector<double> x{3, 1, 3, 2};
  CHECK(average_ranks(x) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("pearson and spearman match brute force") {
  Rng rng(11);
  for (int it = 0; it < kInstances; ++it) {
    const std::size_t n = 3 + rng.below(6);
    const bool ties = it % 2 == 0;
    auto x = oracle::random_values(n, rng, ties);
    auto y = oracle::random_values(n, rng, ties);
    if (oracle::variance(x) == 0 || oracle::variance(y) == 0) {
      CHECK_THROWS_AS(pearson(x, y), Error);
      continue;
    }
    CHECK(oracle::close(pearson(x, y), oracle::pearson(x, y)));
    if (oracle::variance(oracle::ranks(x)) == 0 || oracle::variance(oracle::ranks(y)) == 0) continue;
    const auto got = spearman(x, y);
    const auto want = oracle::spearman(x, y);
    CHECK(oracle::close(got.rho, want.rho));
    CHECK(oracle::close(got.p_value, want.p));
  }
}

TEST_CASE("spearman rejects short or mismatched input") {
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("mann-whitney exact branch matches enumeration") {
  Rng rng(12);
  for (int it = 0; it < kInstances; ++it) {
    const std::size_t na = 1 + rng.below(6);
    const std::size_t nb = 1 + rng.below(6);
    const bool ties = it % 2 == 0;
    const auto a = oracle::random_values(na, rng, ties);
    const auto b = oracle::random_values(nb, rng, ties);
    const int alt = static_cast<int>(it % 3);
    const auto got = mann_whitney_u(a, b, alt_of(alt));
    CHECK(got.method == "mann_whitney_u_exact");
    CHECK(oracle::close(got.statistic, oracle::mwu_statistic(a, b)));
    CHECK(oracle::close(got.p_value, oracle::mwu_exact_p(a, b, alt)));
  }
}

TEST_CASE("mann-whitney switches to the normal approximation above the limit") {
  std::vector<double> a(7);
  std::vector<double> b(6);
  std::iota(a.begin(), a.end(), 10.0);
  std::iota(b.begin(), b.end(), 0.0);
  const auto t = mann_whitney_u(a, b, Alternative::greater);
  CHECK(t.method == "mann_whitney_u_normal");
  CHECK(t.statistic == 42.0);
  CHECK(t.p_value < 0.01);
}

TEST_CASE("mann-whitney normal approximation is close for moderate groups") {
  Rng rng(13);
  double worst = 0;
  for (int it = 0; it < 200; ++it) {
    const std::size_t na = 3 + rng.below(4);
    const std::size_t nb = 3 + rng.below(4);
    const auto a = oracle::random_values(na, rng, false);
    const auto b = oracle::random_values(nb, rng, false);
    const double exact = mann_whitney_u_exact(a, b, Alternative::greater).p_value;
    const double approx = mann_whitney_u_normal(a, b, Alternative::greater).p_value;
    worst = std::max(worst, std::fabs(exact - approx));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("cohens d matches brute force") {
  Rng rng(14);
  for (int it = 0; it < kInstances; ++it) {
    const auto a = oracle::random_values(2 + rng.below(7), rng, false);
    const auto b = oracle::random_values(2 + rng.below(7), rng, false);
    CHECK(oracle::close(cohens_d(a, b), oracle::cohens_d(a, b)));
  }
  CHECK_THROWS_AS(cohens_d(std::vector<double>{1, 1}, std::vector<double>{2, 2}), Error);
  CHECK_THROWS_AS(cohens_d(std::vector<double>{1}, std::vector<double>{2, 3}), Error);
}

TEST_CASE("ols matches the normal equations") {
  Rng rng(15);
  for (int it = 0; it < kInstances; ++it) {
    const std::size_t n = 3 + rng.below(6);
    auto x = oracle::random_values(n, rng, false);
    auto y = oracle::random_values(n, rng, false);
    const auto got = ols_r2(x, y);
    const auto want = oracle::ols(x, y);
    CHECK(oracle::close(got.slope, want.slope, 1e-9, 1e-10));
    CHECK(oracle::close(got.intercept, want.intercept, 1e-9, 1e-10));
    CHECK(oracle::close(got.r2, want.r2, 1e-9, 1e-10));
  }
  CHECK(ols_r2(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}).r2 == 0.0);
  CHECK_THROWS_AS(ols_r2(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("paired t matches brute force") {
  Rng rng(16);
  for (int it = 0; it < kInstances; ++it) {
    const std::size_t n = 3 + rng.below(6);
    const auto a = oracle::random_values(n, rng, false);
    const auto b = oracle::random_values(n, rng, false);
    const auto got = paired_t(a, b);
    const auto [t, p] = oracle::paired_t(a, b);
    CHECK(oracle::close(got.statistic, t));
    CHECK(oracle::close(got.p_value, p));
  }
  CHECK_THROWS_AS(paired_t(std::vector<double>{1, 2, 3}, std::vector<double>{0, 1, 2}), Error);
}

TEST_CASE("exhaustive mantel on four labels matches brute force") {
  Rng rng(17);
  for (int it = 0; it < kInstances; ++it) {
    const auto d1 = oracle::random_distances(4, rng);
    const auto d2 = oracle::random_distances(4, rng);
    const bool use_ranks = it % 2 == 0;
    const auto got = mantel_exhaustive(d1, d2, use_ranks ? MantelMethod::spearman : MantelMethod::pearson);
    const auto [r, p] = oracle::mantel_exhaustive(d1, d2, use_ranks);
    CHECK(oracle::close(got.statistic, r));
    CHECK(oracle::close(got.p_value, p));
  }
}

TEST_CASE("permutation mantel is seeded and bounded") {
  Rng rng(18);
  const auto d1 = oracle::random_distances(8, rng);
  const auto same = mantel(d1, d1, 199, 5);
  CHECK(same.statistic == doctest::Approx(1.0));
  CHECK(same.p_value == doctest::Approx(1.0 / 200.0));
  const auto d2 = oracle::random_distances(8, rng);
  const auto a = mantel(d1, d2, 199, 5);
  const auto b = mantel(d1, d2, 199, 5);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value >= 1.0 / 200.0);
  CHECK(a.p_value <= 1.0);
}

TEST_CASE("mantel rejects label mismatch and tiny matrices") {
  Rng rng(19);
  auto d1 = oracle::random_distances(5, rng);
  auto d2 = oracle::random_distances(5, rng);
  d2.labels[0] = "other";
  CHECK_THROWS_AS(mantel(d1, d2, 9, 0), Error);
  const auto small = oracle::random_distances(3, rng);
  CHECK_THROWS_AS(mantel(small, small, 9, 0), Error);
}

TEST_CASE("bootstrap is reproducible and brackets the mean") {
  Rng rng(20);
  const auto xs = oracle::random_values(50, rng, false);
  auto stat = [](std::span<const double> s) { return oracle::mean(std::vector<double>(s.begin(), s.end())); };
  const auto a = bootstrap_ci(xs, stat, 500, 0.95, 3);
  const auto b = bootstrap_ci(xs, stat, 500, 0.95, 3);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(a.lower < a.point);
  CHECK(a.point < a.upper);
  CHECK_THROWS_AS(bootstrap_ci(xs, stat, 10, 0.95, 3), Error);
}

TEST_CASE("t tail matches boost across degrees of freedom") {
  for (double df : {1.0, 2.0, 5.0, 30.0})
    for (double t : {0.0, 0.5, 2.0, 8.0}) CHECK(oracle::close(student_t_two_sided(t, df), oracle::t_two_sided(t, df)));
}
