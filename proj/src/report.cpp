#include "lexgeo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "lexgeo/error.hpp"

namespace lexgeo {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // keep doubles recognisable as floats when read back
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_into(const json& v, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // nlohmann objects iterate in key order
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_into(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_into(e, out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::string csv_cell(const json& v) {
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_number_float()) {
    s = format_double(v.get<double>());
    if (!s.empty() && s.front() == '"') s = s.substr(1, s.size() - 2);
  } else if (v.is_null()) {
    return "";
  } else {
    s = v.is_structured() ? canonical_dump(v) : v.dump();
  }
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  return s;
}

}  // namespace

json ExperimentReport::to_json() const {
  json p = provenance;
  if (!diagnostics.empty()) p["diagnostics"] = diagnostics;
  return {{"experiment", experiment},
          {"config", config},
          {"results", results},
          {"figure_data", figure_data},
          {"provenance", std::move(p)}};
}

std::string canonical_dump(const json& value) {
  std::string out;
  dump_into(value, out, 0);
  out += "\n";
  return out;
}

json number_or_sentinel(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const TestResult& t) {
  json j = {{"statistic", number_or_sentinel(t.statistic)},
            {"p_value", t.p_value},
            {"n", t.n},
            {"method", t.method},
            {"alternative", to_string(t.alternative)},
            {"effect_size", nullptr},
            {"seed", nullptr},
            {"n_resamples", nullptr}};
  if (t.effect_size) j["effect_size"] = number_or_sentinel(*t.effect_size);
  if (t.seed) j["seed"] = *t.seed;
  if (t.n_resamples) j["n_resamples"] = *t.n_resamples;
  return j;
}

json to_json(const BootstrapCI& ci) {
  return {{"point", number_or_sentinel(ci.point)},
          {"lower", number_or_sentinel(ci.lower)},
          {"upper", number_or_sentinel(ci.upper)},
          {"confidence", ci.confidence},
          {"n_resamples", ci.n_resamples},
          {"seed", ci.seed},
          {"ordered", ci.ordered}};
}

std::string figure_series_csv(const json& rows) {
  std::set<std::string> columns;
  for (const auto& row : rows)
    if (row.is_object())
      for (auto it = row.begin(); it != row.end(); ++it) columns.insert(it.key());
  std::string out;
  bool first = true;
  for (const auto& c : columns) {
    out += (first ? "" : ",") + csv_cell(c);
    first = false;
  }
  out += "\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& c : columns) {
      out += first ? "" : ",";
      first = false;
      if (row.contains(c)) out += csv_cell(row.at(c));
    }
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_io("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_io("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail_io("write failed for '" + path.string() + "'");
    written.push_back(path);
  };
  write(dir / (report.experiment + ".json"), canonical_dump(report.to_json()));
  for (auto it = report.figure_data.begin(); it != report.figure_data.end(); ++it)
    if (it.value().is_array()) write(dir / (report.experiment + "_" + it.key() + ".csv"), figure_series_csv(it.value()));
  return written;
}

}  // namespace lexgeo
