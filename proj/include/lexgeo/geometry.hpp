#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lexgeo/store.hpp"

namespace lexgeo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// All-but-the-top settings. `center_languages` additionally subtracts each
/// language's centroid after the ABTT step.
struct CorrectionConfig {
  std::size_t k = 3;
  bool apply_global_mean = true;
  bool center_languages = false;

  static CorrectionConfig raw() { return {0, false, false}; }
};

/// Cosine similarity clamped to [-1, 1]. Throws on a zero-norm input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
double cosine_similarity(std::span<const float> u, std::span<const float> v);

/// Mean and top-k principal directions of a row set.
struct AbttBasis {
  Eigen::RowVectorXd mean;
  RowMatrix components;  // k x dim, orthonormal rows
};

AbttBasis fit_abtt(const RowMatrix& rows, std::size_t k);
RowMatrix apply_abtt(const RowMatrix& rows, const AbttBasis& basis, bool subtract_mean);
RowMatrix abtt_correct(const RowMatrix& rows, const CorrectionConfig& config);

/// One layer of a store as doubles, one row per (concept, language) cell at
/// index concept * n_languages + language. Rows of absent cells are zero.
struct LayerSlice {
  std::size_t n_concepts = 0;
  std::size_t n_languages = 0;
  std::size_t dim = 0;
  RowMatrix rows;
  std::vector<std::uint8_t> mask;

  bool present(std::size_t c, std::size_t l) const { return mask[c * n_languages + l] != 0; }
  std::span<const double> row(std::size_t c, std::size_t l) const {
    return {rows.data() + (c * n_languages + l) * dim, dim};
  }
  std::span<double> row(std::size_t c, std::size_t l) { return {rows.data() + (c * n_languages + l) * dim, dim}; }
  std::size_t valid_languages(std::size_t c) const;
};

LayerSlice raw_slice(const EmbeddingStore& store, std::size_t layer);

/// ABTT fit on the valid cells of the layer (flattened over concept and
/// language), applied to those cells; optional per-language centering after.
LayerSlice corrected_slice(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& config);
LayerSlice corrected_slice(const LayerSlice& raw, const CorrectionConfig& config);

/// Subtracts each language's mean over its valid concepts, in place.
void center_languages(LayerSlice& slice);

/// Per-language centering of a raw layer.
LayerSlice per_language_center(const EmbeddingStore& store, std::size_t layer);

struct PcaResult {
  RowMatrix components;  // n_components x dim
  std::vector<double> explained_variance_ratio;
  RowMatrix projected;   // n x n_components
  Eigen::RowVectorXd mean;

  RowMatrix project(const RowMatrix& points) const;
};

/// Exact PCA via the covariance eigen-decomposition. Each component is
/// flipped so its largest-magnitude coordinate is positive (lowest index on ties).
PcaResult pca_project(const RowMatrix& points, std::size_t n_components);

/// Mean over jointly valid concepts of 1 - cos, on the given slice.
DistanceMatrix pairwise_language_distance(const LayerSlice& slice, const std::vector<LanguageMeta>& languages);
DistanceMatrix pairwise_language_distance(const EmbeddingStore& store, std::size_t layer,
                                          const CorrectionConfig& correction);

/// Mean pairwise cosine similarity of one concept across its valid languages.
double convergence_score(const LayerSlice& slice, std::size_t concept_index);
double convergence_score(const EmbeddingStore& store, std::size_t layer, std::size_t concept_index,
                         const CorrectionConfig& correction);

struct Merge {
  std::size_t a = 0;  // cluster ids: leaves 0..n-1, merge i creates n+i
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;

  /// Leaves in depth-first order (first child before second).
  std::vector<std::size_t> leaf_order() const;
};

/// Average-linkage (UPGMA) agglomeration. Ties merge the lowest id pair.
Dendrogram upgma_cluster(const DistanceMatrix& matrix);

}  // namespace lexgeo
