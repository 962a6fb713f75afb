#include <doctest.h>

#include <cmath>

#include "lexgeo/error.hpp"
#include "lexgeo/geometry.hpp"
#include "lexgeo/synth.hpp"
#include "oracles.hpp"

using namespace lexgeo;

namespace {

RowMatrix random_rows(std::size_t n, std::size_t dim, Rng& rng) {
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal() * static_cast<double>(j + 1);
  return m;
}

std::vector<oracle::Vec> covariance(const RowMatrix& rows) {
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto d = static_cast<std::size_t>(rows.cols());
  oracle::Vec mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / n;
  std::vector<oracle::Vec> c(d, oracle::Vec(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        c[a][b] += (rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) - mean[a]) *
                   (rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) - mean[b]);
  return c;
}

Plant small_plant(std::uint64_t seed, double noise = 0.1) {
  PlantSpec spec;
  spec.n_concepts = 6;
  spec.n_languages = 5;
  spec.dim = 8;
  spec.noise_scale = noise;
  spec.seed = seed;
  return gen_planted(spec);
}

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<double> u{1, 0, 0};
  const std::vector<double> v{0, 2, 0};
  const std::vector<double> w{3, 0, 0};
  CHECK(cosine_similarity(u, v) == 0.0);
  CHECK(cosine_similarity(u, w) == 1.0);
  CHECK_THROWS_AS(cosine_similarity(u, std::vector<double>{0, 0, 0}), Error);
  CHECK_THROWS_AS(cosine_similarity(u, std::vector<double>{1, 0}), Error);
}

TEST_CASE("abtt components match a jacobi eigen solve") {
  Rng rng(21);
  for (int it = 0; it < 20; ++it) {
    const std::size_t dim = 3 + rng.below(5);
    const RowMatrix rows = random_rows(20, dim, rng);
    const std::size_t k = 1 + rng.below(dim - 1);
    const auto basis = fit_abtt(rows, k);
    const auto [values, vectors] = oracle::jacobi_eigen(covariance(rows));
    REQUIRE(basis.components.rows() == static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      double d = 0;
      for (std::size_t j = 0; j < dim; ++j) d += basis.components(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * vectors[i][j];
      CHECK(std::fabs(d) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("abtt output is orthogonal to the removed components") {
  Rng rng(22);
  const RowMatrix rows = random_rows(30, 6, rng);
  const auto basis = fit_abtt(rows, 2);
  const RowMatrix out = apply_abtt(rows, basis, true);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) CHECK(std::fabs(out.row(i).dot(basis.components.row(j))) < 1e-9);
  CHECK(out.colwise().sum().norm() < 1e-9);
}

TEST_CASE("abtt keeps equal rows bit-equal") {
  Rng rng(23);
  RowMatrix rows = random_rows(10, 5, rng);
  rows.row(3) = rows.row(7);
  const RowMatrix out = abtt_correct(rows, {2, true, false});
  for (Eigen::Index j = 0; j < out.cols(); ++j) CHECK(out(3, j) == out(7, j));
}

TEST_CASE("repeated fits agree bit for bit across k") {
  Rng rng(27);
  RowMatrix rows = random_rows(40, 8, rng);
  const auto five = fit_abtt(rows, 5);
  const auto three = fit_abtt(rows, 3);
  CHECK(three.components == five.components.topRows(3));
  CHECK(fit_abtt(rows, 5).components == five.components);
  rows(0, 0) += 1.0;
  CHECK(fit_abtt(rows, 3).mean != three.mean);
}

TEST_CASE("abtt rejects k too large") {
  Rng rng(24);
  CHECK_THROWS_AS(fit_abtt(random_rows(4, 3, rng), 3), Error);
  CHECK_THROWS_AS(fit_abtt(random_rows(1, 3, rng), 0), Error);
}

TEST_CASE("pca matches jacobi and fixes signs") {
  Rng rng(25);
  for (int it = 0; it < 20; ++it) {
    const std::size_t dim = 2 + rng.below(5);
    const RowMatrix pts = random_rows(15, dim, rng);
    const auto pca = pca_project(pts, 2);
    const auto [values, vectors] = oracle::jacobi_eigen(covariance(pts));
    double total = 0;
    for (double v : values) total += v;
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(pca.explained_variance_ratio[i] == doctest::Approx(values[i] / total).epsilon(1e-9));
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < pca.components.cols(); ++j)
        if (std::fabs(pca.components(static_cast<Eigen::Index>(i), j)) > std::fabs(pca.components(static_cast<Eigen::Index>(i), best))) best = j;
      CHECK(pca.components(static_cast<Eigen::Index>(i), best) > 0);
    }
    const RowMatrix again = pca.project(pts);
    CHECK((again - pca.projected).norm() < 1e-9);
  }
}

TEST_CASE("upgma matches the average-linkage definition") {
  Rng rng(26);
  for (int it = 0; it < 250; ++it) {
    const std::size_t n = 2 + rng.below(7);
    const auto m = oracle::random_distances(n, rng);
    const auto got = upgma_cluster(m);
    const auto want = oracle::upgma(m);
    REQUIRE(got.merges.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.merges[i].a == want[i].a);
      CHECK(got.merges[i].b == want[i].b);
      CHECK(got.merges[i].size == want[i].size);
      CHECK(oracle::close(got.merges[i].height, want[i].height));
    }
    auto order = got.leaf_order();
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(order[i] == i);
  }
}

TEST_CASE("upgma breaks ties toward the lowest ids") {
  auto m = DistanceMatrix::zeros({"a", "b", "c", "d"});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) m.at(i, j) = 1.0;
  const auto d = upgma_cluster(m);
  CHECK(d.merges[0].a == 0);
  CHECK(d.merges[0].b == 1);
  CHECK(d.leaf_order() == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("convergence score is the mean pairwise cosine") {
  const auto plant = small_plant(1);
  const auto slice = raw_slice(plant.store, 0);
  for (std::size_t c = 0; c < slice.n_concepts; ++c) {
    double s = 0;
    int pairs = 0;
    for (std::size_t a = 0; a < slice.n_languages; ++a)
      for (std::size_t b = a + 1; b < slice.n_languages; ++b) {
        s += cosine_similarity(slice.row(c, a), slice.row(c, b));
        ++pairs;
      }
    CHECK(convergence_score(slice, c) == doctest::Approx(s / pairs).epsilon(1e-12));
  }
}

TEST_CASE("language distance averages over jointly present concepts") {
  auto plant = small_plant(2);
  plant.store.set_present(0, 1, false);
  const auto slice = raw_slice(plant.store, 0);
  const auto d = pairwise_language_distance(slice, plant.store.languages());
  d.validate();
  double s = 0;
  int n = 0;
  for (std::size_t c = 1; c < slice.n_concepts; ++c, ++n) s += 1 - cosine_similarity(slice.row(c, 0), slice.row(c, 1));
  CHECK(d.at(0, 1) == doctest::Approx(s / n).epsilon(1e-12));
}

TEST_CASE("language centering zeroes each language mean") {
  const auto plant = small_plant(3);
  auto slice = raw_slice(plant.store, 0);
  center_languages(slice);
  for (std::size_t l = 0; l < slice.n_languages; ++l)
    for (std::size_t d = 0; d < slice.dim; ++d) {
      double s = 0;
      for (std::size_t c = 0; c < slice.n_concepts; ++c) s += slice.row(c, l)[d];
      CHECK(std::fabs(s) < 1e-9);
    }
}

TEST_CASE("corrected slice leaves absent cells at zero") {
  auto plant = small_plant(4);
  plant.store.set_present(2, 3, false);
  const auto slice = corrected_slice(plant.store, 0, {1, true, true});
  for (double v : slice.row(2, 3)) CHECK(v == 0.0);
}
