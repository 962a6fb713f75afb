#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexgeo/geometry.hpp"
#include "lexgeo/report.hpp"
#include "lexgeo/resources.hpp"
#include "lexgeo/stats.hpp"
#include "lexgeo/store.hpp"
#include "lexgeo/text.hpp"

namespace lexgeo {

// Shared building blocks ----------------------------------------------------

/// Convergence score per concept; nullopt for concepts with < 2 valid languages.
std::vector<std::optional<double>> convergence_scores(const LayerSlice& slice);

/// Within/between cosine-distance summary of one slice.
struct ConceptualStoreStats {
  std::vector<std::size_t> concepts;  // concepts with >= 2 usable vectors
  std::vector<double> within;         // per entry of `concepts`
  std::vector<double> between;        // |concepts|^2, row-major
  double within_mean = 0.0;
  double between_mean = 0.0;
  double ratio = 0.0;                 // +inf when within_mean is zero
  std::size_t zero_vectors = 0;       // cells skipped for zero norm

  /// Ratio on a resample given as positions into `concepts`; pairs that
  /// repeat a concept are not between-concept pairs and are skipped.
  double ratio_for(std::span<const std::size_t> sample) const;
};

/// Within-concept distances at or below this are treated as zero.
inline constexpr double kZeroWithinTolerance = 1e-9;

ConceptualStoreStats conceptual_store_stats(const LayerSlice& slice);

/// Spearman between two score vectors, with identical rank vectors defined
/// as rho = 1 even when constant. nullopt (plus note) when undefined.
std::optional<Correlation> rank_agreement(std::span<const double> x, std::span<const double> y, std::string* note);

/// Mean vector over valid languages per concept (zero row when none).
RowMatrix concept_centroids(const LayerSlice& slice);

/// Monotone-chain convex hull of 2-D points, counter-clockwise.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts);

json correction_json(const CorrectionConfig& c);
json store_provenance(const EmbeddingStore& store);

// Experiments ---------------------------------------------------------------
// `layer` is a position into store.layers().

ExperimentReport exp_convergence_ranking(const EmbeddingStore& store, std::size_t layer,
                                         const CorrectionConfig& correction);

double orthographic_similarity(std::string_view a, std::string_view b);
double phonetic_similarity(std::string_view a, std::string_view b, const SurfaceSimilarityConfig& config);

ExperimentReport exp_surface_regression(const EmbeddingStore& store, std::size_t layer,
                                        const CorrectionConfig& correction, const WordFormTable& forms,
                                        const SurfaceSimilarityConfig& config);

ExperimentReport exp_category_summary(const EmbeddingStore& store, std::size_t layer,
                                      const CorrectionConfig& correction);

ExperimentReport exp_group_comparison(const EmbeddingStore& store_a, const EmbeddingStore& store_b, std::size_t layer,
                                      const CorrectionConfig& correction, Alternative alternative);

ExperimentReport exp_isotropy_validation(const EmbeddingStore& store, std::size_t layer,
                                         const std::vector<std::size_t>& k_values);

ExperimentReport exp_carrier_robustness(const EmbeddingStore& store_ctx, const EmbeddingStore& store_dectx,
                                        std::size_t layer, const CorrectionConfig& correction);

ExperimentReport exp_layerwise(const EmbeddingStore& store, const CorrectionConfig& correction);

struct PhyloConfig {
  std::size_t n_perm = 999;
  std::uint64_t seed = 0;
  MantelMethod method = MantelMethod::spearman;
  std::map<std::string, std::string> mapping;      // store code -> matrix label
  std::map<std::string, std::string> subfamilies;  // store code -> subfamily
};

ExperimentReport exp_phylogenetic(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction,
                                  const DistanceMatrix& asjp, const PhyloConfig& config);

enum class ColexSimilarity { centroid, per_language };

struct ColexConfig {
  std::uint32_t binary_threshold = 3;
  ColexSimilarity similarity = ColexSimilarity::centroid;
};

/// Empty `pair_universe` means every unordered pair of store concepts.
ExperimentReport exp_colexification(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction,
                                    const ColexEdgeList& edges, const std::vector<GlossPair>& pair_universe,
                                    const ColexConfig& config);

ExperimentReport exp_conceptual_store(const EmbeddingStore& store, std::size_t layer,
                                      const CorrectionConfig& correction, std::size_t n_boot, std::uint64_t seed);

/// The eleven basic color glosses ("gray" is accepted for "grey").
const std::vector<std::string>& basic_color_terms();

ExperimentReport exp_color_circle(const EmbeddingStore& color_store, std::size_t layer,
                                  const CorrectionConfig& correction, std::size_t n_components);

ExperimentReport exp_offset_invariance(const EmbeddingStore& store, std::size_t layer,
                                       const CorrectionConfig& correction, const std::vector<GlossPair>& pairs);

ExperimentReport exp_concept_map(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction);

}  // namespace lexgeo
