#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "lexgeo/stats.hpp"

namespace lexgeo {

using json = nlohmann::json;

/// One experiment's configuration echo, results, plot series and provenance.
struct ExperimentReport {
  std::string experiment;
  json config = json::object();
  json results = json::object();
  json figure_data = json::object();  // series name -> array of flat row objects
  json provenance = json::object();
  std::vector<std::string> diagnostics;

  json to_json() const;
};

/// Sorted keys, two-space indent, doubles at 17 significant digits,
/// non-finite doubles as the strings "inf", "-inf", "nan".
std::string canonical_dump(const json& value);

/// Finite doubles pass through; non-finite become the canonical strings.
json number_or_sentinel(double v);

json to_json(const TestResult& t);
json to_json(const BootstrapCI& ci);

/// Writes <dir>/<experiment>.json plus <dir>/<experiment>_<series>.csv per series.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir);

std::string figure_series_csv(const json& rows);

}  // namespace lexgeo
