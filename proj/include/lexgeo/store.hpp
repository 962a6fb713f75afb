#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lexgeo {

struct ConceptMeta {
  std::string gloss;
  std::string category;
  bool polysemous = false;

  bool operator==(const ConceptMeta&) const = default;
};

struct LanguageMeta {
  std::string code;    // e.g. fra_Latn
  std::string family;
  std::string script;  // e.g. Latn

  bool operator==(const LanguageMeta&) const = default;
};

enum class Condition { contextual, decontextual };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

/// True when `code` looks like `xxx_Yyyy`.
bool valid_language_code(const std::string& code);

/// Lowercase + trim; the join key between resources.
std::string normalize_gloss(std::string_view gloss);

/// The 4-D tensor [layer][concept][language][dim] with a concept x language
/// presence mask. Stored as binary32 so the file round-trips bit-exactly.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::vector<ConceptMeta> concepts, std::vector<LanguageMeta> languages,
                 std::vector<std::uint32_t> layers, Condition condition, std::size_t dim);

  const std::vector<ConceptMeta>& concepts() const noexcept { return concepts_; }
  const std::vector<LanguageMeta>& languages() const noexcept { return languages_; }
  const std::vector<std::uint32_t>& layers() const noexcept { return layers_; }
  Condition condition() const noexcept { return condition_; }
  void set_condition(Condition c) noexcept { condition_ = c; }
  std::size_t dim() const noexcept { return dim_; }

  std::size_t n_layers() const noexcept { return layers_.size(); }
  std::size_t n_concepts() const noexcept { return concepts_.size(); }
  std::size_t n_languages() const noexcept { return languages_.size(); }

  std::span<const float> vec(std::size_t layer, std::size_t concept_index, std::size_t language) const;
  std::span<float> vec(std::size_t layer, std::size_t concept_index, std::size_t language);

  bool present(std::size_t concept_index, std::size_t language) const {
    return mask_[concept_index * languages_.size() + language] != 0;
  }
  void set_present(std::size_t concept_index, std::size_t language, bool v) {
    mask_[concept_index * languages_.size() + language] = v ? 1 : 0;
  }

  const std::vector<float>& tensor() const noexcept { return tensor_; }
  std::vector<float>& tensor() noexcept { return tensor_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

  /// Position of a layer number in layers(), or nullopt.
  std::optional<std::size_t> layer_position(std::uint32_t layer) const;
  std::optional<std::size_t> concept_index(std::string_view gloss) const;
  std::optional<std::size_t> language_index(std::string_view code) const;

  /// Throws Error(validation) describing the first violated invariant.
  void validate() const;

  /// Store holding only the given languages, in the given order.
  EmbeddingStore select_languages(std::span<const std::size_t> language_indices) const;
  EmbeddingStore select_layers(std::span<const std::size_t> layer_positions) const;

  bool operator==(const EmbeddingStore&) const = default;

 private:
  std::vector<ConceptMeta> concepts_;
  std::vector<LanguageMeta> languages_;
  std::vector<std::uint32_t> layers_;
  Condition condition_ = Condition::contextual;
  std::size_t dim_ = 0;
  std::vector<float> tensor_;
  std::vector<std::uint8_t> mask_;
};

/// Labeled symmetric matrix with zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major n x n

  std::size_t size() const noexcept { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * labels.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * labels.size() + j]; }

  static DistanceMatrix zeros(std::vector<std::string> labels);

  /// Throws "asymmetric", "nonzero diagonal", "non-finite entry" or "negative entry".
  void validate(double tol = 1e-9) const;
};

struct ColexEdge {
  std::string concept_a;
  std::string concept_b;
  std::uint32_t family_count = 0;
};

struct ColexEdgeList {
  std::vector<ColexEdge> edges;

  /// Family count for an unordered gloss pair, 0 when absent.
  std::uint32_t count(std::string_view a, std::string_view b) const;
};

struct WordFormTable {
  std::map<std::pair<std::string, std::string>, std::string> entries;  // (gloss, code) -> form
  std::set<std::string> scripts{"Latn"};

  const std::string* find(std::string_view gloss, std::string_view code) const;
};

}  // namespace lexgeo
