#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lexgeo/rng.hpp"
#include "lexgeo/store.hpp"

namespace support {

// Valid store of random shape; some cells absent, glosses may be non-ASCII.
inline lexgeo::EmbeddingStore random_store(lexgeo::Rng& rng) {
  const std::size_t n_concepts = 1 + rng.below(6);
  const std::size_t n_languages = 1 + rng.below(5);
  const std::size_t n_layers = 1 + rng.below(3);
  const std::size_t dim = 1 + rng.below(7);
  std::vector<lexgeo::ConceptMeta> concepts;
  for (std::size_t c = 0; c < n_concepts; ++c)
    concepts.push_back({(c % 2 ? "w\xc3\xa4sser" : "fire") + std::to_string(c), "cat" + std::to_string(rng.below(3)),
                        rng.below(2) == 1});
  std::vector<lexgeo::LanguageMeta> languages;
  for (std::size_t l = 0; l < n_languages; ++l)
    languages.push_back({"l" + std::string(1, static_cast<char>('a' + l)) + "x_Latn", "fam" + std::to_string(l % 2),
                         "Latn"});
  std::vector<std::uint32_t> layers;
  for (std::size_t i = 0; i < n_layers; ++i) layers.push_back(static_cast<std::uint32_t>(3 * i + rng.below(3)));
  lexgeo::EmbeddingStore s(concepts, languages, layers,
                           rng.below(2) ? lexgeo::Condition::contextual : lexgeo::Condition::decontextual, dim);
  for (float& v : s.tensor()) v = static_cast<float>(rng.normal());
  for (std::size_t c = 0; c < n_concepts; ++c)
    for (std::size_t l = 0; l < n_languages; ++l) s.set_present(c, l, rng.below(4) != 0);
  return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lexgeo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
