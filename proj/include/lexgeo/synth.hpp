#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexgeo/report.hpp"
#include "lexgeo/store.hpp"

namespace lexgeo {

/// Rooted binary tree; leaves carry language indices.
struct TreeNode {
  std::ptrdiff_t left = -1;   // child node ids, -1 for leaves
  std::ptrdiff_t right = -1;
  std::ptrdiff_t leaf = -1;   // language index for leaves
  double length = 0.0;        // branch length to the parent
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::size_t root = 0;

  std::size_t n_leaves() const;
  /// Throws unless every language 0..n-1 appears at exactly one leaf and
  /// branch lengths are finite and non-negative.
  void validate() const;
};

/// Two leaves joined at the root.
Tree cherry_tree(double left_length, double right_length);
/// Complete binary tree over 2^depth leaves with equal branch lengths.
Tree balanced_tree(std::size_t depth, double length);
/// Two clades joined at the root by stems of `stem_length`; leaves inside each
/// clade form a random topology with branch lengths in [0.5, 1) * within_length.
Tree two_clade_tree(std::size_t n_left, std::size_t n_right, double within_length, double stem_length,
                    std::uint64_t seed);
/// Random topology by repeated joining of random pairs, branch lengths uniform in [min_length, max_length).
Tree random_tree(std::size_t n_leaves, double min_length, double max_length, std::uint64_t seed);

/// Leaf-to-leaf path lengths; labels default to "L<i>".
DistanceMatrix tree_path_distances(const Tree& tree, std::vector<std::string> labels = {});

struct ColexPlant {
  std::size_t concept_a = 0;
  std::size_t concept_b = 0;
  double correlation = 0.9;
};

struct PlantSpec {
  std::size_t n_concepts = 10;
  std::size_t n_languages = 8;
  std::size_t dim = 16;
  std::size_t n_layers = 1;
  double concept_scale = 1.0;
  double offset_scale = 1.0;
  double noise_scale = 0.1;
  std::optional<Tree> tree;
  std::vector<ColexPlant> colex_pairs;
  std::optional<double> layer_offset_decay;
  std::uint64_t seed = 0;

  // Layout of the generated metadata.
  std::size_t n_categories = 1;     // concept c gets category c % n_categories
  double category_scale = 0.0;      // shared Gaussian direction per category
  double concept_scale_spread = 0.0;  // concept c's scale times 1 + spread * u_c, u_c in [0, 1)
  std::size_t n_families = 1;       // language l gets family l % n_families (overridden by the tree clades)
  std::size_t offset_rank = 0;      // 0 = full rank; else offsets projected onto a random subspace, norm preserved in expectation
  Condition condition = Condition::contextual;

  void validate() const;
};

struct PlantTruth {
  DistanceMatrix tree_distances;           // empty without a tree
  std::vector<ColexPlant> colex_pairs;
  std::vector<std::vector<double>> concept_vectors;   // g_c
  std::vector<std::vector<double>> language_offsets;  // o_l
  std::vector<double> concept_scales;                  // effective concept scale per concept

  json to_json(const EmbeddingStore& store) const;
};

struct Plant {
  EmbeddingStore store;
  PlantTruth truth;
};

/// vec(layer i, c, l) = s_c g_c + decay^i offset_scale o_l + noise_scale eps, with
/// s_c = concept_scale unless concept_scale_spread is set.
/// Tree offsets are rescaled so the mean root-to-leaf variance per dimension is 1.
Plant gen_planted(const PlantSpec& spec);

/// Spec from a JSON object; unknown keys are rejected.
PlantSpec plant_spec_from_json(const json& j);

/// Writes <dir>/<name>.lgeo, <dir>/<name>_truth.json and resource CSVs
/// (asjp-style tree distances, colex edges, offset pairs, concept metadata).
std::vector<std::filesystem::path> write_plant(const Plant& plant, const std::filesystem::path& dir,
                                               const std::string& name);

}  // namespace lexgeo
