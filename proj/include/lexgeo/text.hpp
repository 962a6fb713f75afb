#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexgeo {

using CodePoints = std::vector<char32_t>;

CodePoints utf8_decode(std::string_view s);
std::string utf8_encode(const CodePoints& cps);

char32_t to_lower(char32_t cp);
/// Canonical decomposition (recursive) of each code point.
CodePoints canonical_decompose(const CodePoints& cps);
bool is_combining_mark(char32_t cp);

/// 1 - edit_distance / max(len) on code points; two empty strings give 1.
double levenshtein_similarity(std::string_view a, std::string_view b);
std::size_t edit_distance(const CodePoints& a, const CodePoints& b);

/// Grapheme substitution table closed under composition, so applying it
/// once reaches a fixed point.
class PhoneticMap {
 public:
  PhoneticMap() = default;
  /// Throws when the rules contain a cycle.
  explicit PhoneticMap(const std::map<char32_t, char32_t>& rules);

  /// b->p d->t g->k v->f z->s w->v ʒ->š ž->š š->s đ->t, closed.
  static PhoneticMap defaults();

  char32_t apply(char32_t cp) const;
  const std::map<char32_t, char32_t>& table() const noexcept { return table_; }

 private:
  std::map<char32_t, char32_t> table_;
};

struct SurfaceSimilarityConfig {
  std::set<std::string> scripts{"Latn"};
  PhoneticMap phonetic_map = PhoneticMap::defaults();
  bool strip_diacritics = true;
};

/// Lowercase form used for orthographic comparison.
std::string orthographic_normalize(std::string_view s);

/// lowercase -> canonical decomposition -> drop marks (optional) -> map.
std::string phonetic_normalize(std::string_view s, const SurfaceSimilarityConfig& config);

}  // namespace lexgeo
