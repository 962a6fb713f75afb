#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lexgeo/report.hpp"

namespace lexgeo {

/// Everything a subcommand needs. Paths are resolved against the config
/// file's directory when read from a file, against the working directory
/// when given as flags.
struct RunConfig {
  std::optional<std::filesystem::path> store;
  std::optional<std::filesystem::path> decontextual_store;
  std::optional<std::filesystem::path> comparison_store;
  std::optional<std::filesystem::path> color_store;
  std::optional<std::filesystem::path> asjp;
  std::optional<std::filesystem::path> colex_edges;
  std::optional<std::filesystem::path> pair_universe;
  std::optional<std::filesystem::path> word_forms;
  std::optional<std::filesystem::path> subfamilies;
  std::optional<std::filesystem::path> language_mapping;
  std::optional<std::filesystem::path> offset_pairs;

  std::optional<std::int64_t> layer;  // layer number; default is the store's last layer
  std::int64_t k = 3;
  bool apply_global_mean = true;
  bool center_languages_for_maps = true;  // colors and conceptmap
  std::uint64_t seed = 0;
  std::int64_t perms = 999;
  std::int64_t n_boot = 1000;
  std::int64_t binary_threshold = 3;
  std::string colex_similarity = "centroid";
  std::vector<std::int64_t> k_values{0, 1, 3, 5, 10};
  std::string alternative = "greater";
  std::string mantel_method = "spearman";
  std::int64_t color_components = 3;
  std::vector<std::string> scripts{"Latn"};
  bool strip_diacritics = true;
  std::optional<std::map<std::string, std::string>> phonetic_map;
  json synth = json::object();
  std::filesystem::path out = "out";
};

struct Violation {
  std::string field;
  std::string message;
};

const std::vector<std::string>& subcommand_names();

/// Reads a config object; type errors and unknown keys raise Error(validation)
/// naming the field.
RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Empty iff `subcommand` can run with `config`. Checks file existence and
/// store metadata but loads no tensors. Unreadable stores raise their
/// I/O or format error.
std::vector<Violation> validate_config(const RunConfig& config, const std::string& subcommand);

/// Full command line without the program name. Returns the exit status:
/// 0 success, 1 validation error or bad usage, 2 I/O or file-format error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexgeo
