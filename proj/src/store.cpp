#include "lexgeo/store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "lexgeo/error.hpp"

namespace lexgeo {

std::string to_string(Condition c) { return c == Condition::contextual ? "contextual" : "decontextual"; }

Condition condition_from_string(const std::string& s) {
  if (s == "contextual") return Condition::contextual;
  if (s == "decontextual") return Condition::decontextual;
  fail("unknown condition '" + s + "'");
}

bool valid_language_code(const std::string& code) {
  if (code.size() != 8 || code[3] != '_') return false;
  for (int i = 0; i < 3; ++i)
    if (!std::islower(static_cast<unsigned char>(code[i]))) return false;
  if (!std::isupper(static_cast<unsigned char>(code[4]))) return false;
  for (int i = 5; i < 8; ++i)
    if (!std::islower(static_cast<unsigned char>(code[i]))) return false;
  return true;
}

std::string normalize_gloss(std::string_view gloss) {
  std::size_t b = 0;
  std::size_t e = gloss.size();
  while (b < e && std::isspace(static_cast<unsigned char>(gloss[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(gloss[e - 1]))) --e;
  std::string out(gloss.substr(b, e - b));
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

EmbeddingStore::EmbeddingStore(std::vector<ConceptMeta> concepts, std::vector<LanguageMeta> languages,
                               std::vector<std::uint32_t> layers, Condition condition, std::size_t dim)
    : concepts_(std::move(concepts)),
      languages_(std::move(languages)),
      layers_(std::move(layers)),
      condition_(condition),
      dim_(dim),
      tensor_(layers_.size() * concepts_.size() * languages_.size() * dim, 0.0f),
      mask_(concepts_.size() * languages_.size(), 0) {}

std::span<const float> EmbeddingStore::vec(std::size_t layer, std::size_t concept_index, std::size_t language) const {
  const std::size_t off = ((layer * concepts_.size() + concept_index) * languages_.size() + language) * dim_;
  return {tensor_.data() + off, dim_};
}

std::span<float> EmbeddingStore::vec(std::size_t layer, std::size_t concept_index, std::size_t language) {
  const std::size_t off = ((layer * concepts_.size() + concept_index) * languages_.size() + language) * dim_;
  return {tensor_.data() + off, dim_};
}

std::optional<std::size_t> EmbeddingStore::layer_position(std::uint32_t layer) const {
  auto it = std::find(layers_.begin(), layers_.end(), layer);
  if (it == layers_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - layers_.begin());
}

std::optional<std::size_t> EmbeddingStore::concept_index(std::string_view gloss) const {
  const std::string key = normalize_gloss(gloss);
  for (std::size_t i = 0; i < concepts_.size(); ++i)
    if (normalize_gloss(concepts_[i].gloss) == key) return i;
  return std::nullopt;
}

std::optional<std::size_t> EmbeddingStore::language_index(std::string_view code) const {
  for (std::size_t i = 0; i < languages_.size(); ++i)
    if (languages_[i].code == code) return i;
  return std::nullopt;
}

void EmbeddingStore::validate() const {
  require(!layers_.empty(), "store has no layers");
  require(dim_ > 0, "store dim must be positive");
  require(tensor_.size() == layers_.size() * concepts_.size() * languages_.size() * dim_,
          "tensor shape inconsistent with metadata");
  require(mask_.size() == concepts_.size() * languages_.size(), "mask shape inconsistent with metadata");

  std::set<std::string> glosses;
  for (const auto& c : concepts_) {
    require(!c.gloss.empty(), "empty concept gloss");
    require(!c.category.empty(), "empty category for concept '" + c.gloss + "'");
    require(glosses.insert(normalize_gloss(c.gloss)).second, "duplicate concept gloss '" + c.gloss + "'");
  }
  std::set<std::string> codes;
  for (const auto& l : languages_) {
    require(valid_language_code(l.code), "invalid language code '" + l.code + "'");
    require(codes.insert(l.code).second, "duplicate language code '" + l.code + "'");
  }

  for (std::size_t layer = 0; layer < layers_.size(); ++layer) {
    for (std::size_t c = 0; c < concepts_.size(); ++c) {
      for (std::size_t l = 0; l < languages_.size(); ++l) {
        if (!present(c, l)) continue;
        double norm2 = 0.0;
        for (float x : vec(layer, c, l)) {
          if (!std::isfinite(x)) {
            fail("non-finite value in valid cell (layer " + std::to_string(layers_[layer]) + ", concept '" +
                 concepts_[c].gloss + "', language " + languages_[l].code + ")");
          }
          norm2 += static_cast<double>(x) * x;
        }
        if (!(norm2 > 0.0)) {
          fail("zero-norm vector in valid cell (concept '" + concepts_[c].gloss + "', language " +
               languages_[l].code + ")");
        }
      }
    }
  }
}

EmbeddingStore EmbeddingStore::select_languages(std::span<const std::size_t> language_indices) const {
  std::vector<LanguageMeta> langs;
  for (std::size_t l : language_indices) langs.push_back(languages_.at(l));
  EmbeddingStore out(concepts_, std::move(langs), layers_, condition_, dim_);
  for (std::size_t layer = 0; layer < layers_.size(); ++layer)
    for (std::size_t c = 0; c < concepts_.size(); ++c)
      for (std::size_t j = 0; j < language_indices.size(); ++j) {
        auto src = vec(layer, c, language_indices[j]);
        std::copy(src.begin(), src.end(), out.vec(layer, c, j).begin());
      }
  for (std::size_t c = 0; c < concepts_.size(); ++c)
    for (std::size_t j = 0; j < language_indices.size(); ++j) out.set_present(c, j, present(c, language_indices[j]));
  return out;
}

EmbeddingStore EmbeddingStore::select_layers(std::span<const std::size_t> layer_positions) const {
  std::vector<std::uint32_t> ls;
  for (std::size_t p : layer_positions) ls.push_back(layers_.at(p));
  EmbeddingStore out(concepts_, languages_, std::move(ls), condition_, dim_);
  out.mask_ = mask_;
  const std::size_t block = concepts_.size() * languages_.size() * dim_;
  for (std::size_t j = 0; j < layer_positions.size(); ++j)
    std::copy_n(tensor_.begin() + static_cast<std::ptrdiff_t>(layer_positions[j] * block), block,
                out.tensor_.begin() + static_cast<std::ptrdiff_t>(j * block));
  return out;
}

DistanceMatrix DistanceMatrix::zeros(std::vector<std::string> labels) {
  DistanceMatrix m;
  const std::size_t n = labels.size();
  m.labels = std::move(labels);
  m.values.assign(n * n, 0.0);
  return m;
}

void DistanceMatrix::validate(double tol) const {
  const std::size_t n = labels.size();
  require(values.size() == n * n, "distance matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      require(std::isfinite(v), "non-finite entry at (" + labels[i] + ", " + labels[j] + ")");
      require(v >= -tol, "negative entry at (" + labels[i] + ", " + labels[j] + ")");
      if (i == j) require(std::fabs(v) <= tol, "nonzero diagonal at " + labels[i]);
      if (j > i) require(std::fabs(v - at(j, i)) <= tol, "asymmetric at (" + labels[i] + ", " + labels[j] + ")");
    }
  }
}

std::uint32_t ColexEdgeList::count(std::string_view a, std::string_view b) const {
  const std::string x = normalize_gloss(a);
  const std::string y = normalize_gloss(b);
  for (const auto& e : edges)
    if ((e.concept_a == x && e.concept_b == y) || (e.concept_a == y && e.concept_b == x)) return e.family_count;
  return 0;
}

const std::string* WordFormTable::find(std::string_view gloss, std::string_view code) const {
  auto it = entries.find({normalize_gloss(gloss), std::string(code)});
  return it == entries.end() ? nullptr : &it->second;
}

}  // namespace lexgeo
