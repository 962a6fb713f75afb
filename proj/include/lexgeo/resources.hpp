#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lexgeo/store.hpp"

namespace lexgeo {

/// RFC 4180-ish reader: quoted fields, doubled quotes, CRLF tolerated.
/// Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

/// Square CSV; header row holds labels (a leading empty cell is allowed for
/// a row-label column, in which case each body row starts with its label).
DistanceMatrix parse_asjp_matrix(std::string_view text);
DistanceMatrix load_asjp_matrix(const std::filesystem::path& path);

/// Columns concept_a, concept_b, family_count. Glosses are normalized.
ColexEdgeList parse_colex_edges(std::string_view text);
ColexEdgeList load_colex_edges(const std::filesystem::path& path);

/// Columns gloss, language_code, form.
WordFormTable load_word_forms(const std::filesystem::path& path);

/// Columns gloss, category[, polysemous].
std::vector<ConceptMeta> load_concept_meta(const std::filesystem::path& path);

using GlossPair = std::pair<std::string, std::string>;

/// Columns concept_a, concept_b (offset pairs, pair universes).
std::vector<GlossPair> load_gloss_pairs(const std::filesystem::path& path);

/// Two-column table keyed by the first column (code -> label, code -> subfamily).
std::map<std::string, std::string> load_key_value(const std::filesystem::path& path);

struct Aligned {
  EmbeddingStore store;
  DistanceMatrix matrix;
};

/// Restricts both inputs to languages present in each, in store order.
/// Store codes map to matrix labels via `mapping`; unmapped codes map to
/// themselves. Output matrix labels are the store's language codes.
Aligned align_languages(const EmbeddingStore& store, const DistanceMatrix& matrix,
                        const std::map<std::string, std::string>& mapping);

}  // namespace lexgeo
