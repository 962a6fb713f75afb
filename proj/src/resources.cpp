#include "lexgeo/resources.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lexgeo/error.hpp"

namespace lexgeo {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail("unparseable number '" + cell + "' at " + where);
  return v;
}

bool is_header(const std::vector<std::string>& row, std::string_view first) {
  return !row.empty() && normalize_gloss(row[0]) == first;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      row_has_content = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_content = false;
    } else {
      field += ch;
    }
  }
  if (quoted) fail("unterminated quoted field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(slurp(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    fail(path.string() + ": " + e.what());
  }
}

DistanceMatrix parse_asjp_matrix(std::string_view text) {
  const auto rows = parse_csv(text);
  require(!rows.empty(), "empty distance matrix");
  std::vector<std::string> header = rows[0];
  const bool row_labels = !header.empty() && trim(header[0]).empty();
  if (row_labels) header.erase(header.begin());
  for (auto& h : header) h = trim(h);
  const std::size_t n = header.size();
  require(n >= 1, "distance matrix header has no labels");
  require(rows.size() - 1 == n, "non-square body: " + std::to_string(rows.size() - 1) + " rows for " +
                                    std::to_string(n) + " labels");
  require(std::set<std::string>(header.begin(), header.end()).size() == n, "duplicate labels in header");

  DistanceMatrix m = DistanceMatrix::zeros(header);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    const std::size_t skip = row_labels ? 1 : 0;
    require(row.size() == n + skip, "non-square body: row " + std::to_string(i + 1) + " has " +
                                        std::to_string(row.size() - skip) + " values");
    if (row_labels) require(trim(row[0]) == header[i], "row label '" + row[0] + "' does not match header");
    for (std::size_t j = 0; j < n; ++j)
      m.at(i, j) = parse_number(row[j + skip], "row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::fabs(m.at(i, j) - m.at(j, i)) <= 1e-9,
              "asymmetric entries at (" + header[i] + ", " + header[j] + ")");
  m.validate();
  return m;
}

DistanceMatrix load_asjp_matrix(const std::filesystem::path& path) { return parse_asjp_matrix(slurp(path)); }

ColexEdgeList parse_colex_edges(std::string_view text) {
  auto rows = parse_csv(text);
  if (!rows.empty() && is_header(rows[0], "concept_a")) rows.erase(rows.begin());
  ColexEdgeList list;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "edge row " + std::to_string(r + 1);
    require(row.size() == 3, where + ": expected 3 columns");
    std::string a = normalize_gloss(row[0]);
    std::string b = normalize_gloss(row[1]);
    require(!a.empty() && !b.empty(), where + ": empty gloss");
    require(a != b, where + ": self-loop edge '" + a + "'");
    const double count = parse_number(row[2], where);
    require(count >= 0, where + ": negative count");
    require(count == std::floor(count) && count < 4294967296.0, where + ": count is not an integer");
    auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    require(seen.insert(key).second, where + ": duplicate pair (" + a + ", " + b + ")");
    list.edges.push_back({std::move(a), std::move(b), static_cast<std::uint32_t>(count)});
  }
  return list;
}

ColexEdgeList load_colex_edges(const std::filesystem::path& path) { return parse_colex_edges(slurp(path)); }

WordFormTable load_word_forms(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (!rows.empty() && is_header(rows[0], "gloss")) rows.erase(rows.begin());
  WordFormTable table;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    require(row.size() == 3, where + ": expected columns gloss, language_code, form");
    const std::string form = trim(row[2]);
    require(!form.empty(), where + ": empty form");
    const auto [it, inserted] = table.entries.emplace(std::pair{normalize_gloss(row[0]), trim(row[1])}, form);
    require(inserted, where + ": duplicate (gloss, language) entry");
  }
  return table;
}

std::vector<ConceptMeta> load_concept_meta(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (!rows.empty() && is_header(rows[0], "gloss")) rows.erase(rows.begin());
  std::vector<ConceptMeta> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    require(row.size() == 2 || row.size() == 3, where + ": expected columns gloss, category[, polysemous]");
    ConceptMeta c{normalize_gloss(row[0]), trim(row[1]), false};
    if (row.size() == 3) {
      const std::string p = normalize_gloss(row[2]);
      require(p == "true" || p == "false" || p == "1" || p == "0" || p.empty(), where + ": bad polysemous flag");
      c.polysemous = p == "true" || p == "1";
    }
    require(!c.gloss.empty() && !c.category.empty(), where + ": empty gloss or category");
    require(seen.insert(c.gloss).second, where + ": duplicate gloss '" + c.gloss + "'");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GlossPair> load_gloss_pairs(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (!rows.empty() && is_header(rows[0], "concept_a")) rows.erase(rows.begin());
  std::vector<GlossPair> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require(row.size() >= 2, path.filename().string() + " row " + std::to_string(r + 1) + ": expected 2 columns");
    out.emplace_back(normalize_gloss(row[0]), normalize_gloss(row[1]));
  }
  return out;
}

std::map<std::string, std::string> load_key_value(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    require(row.size() == 2, where + ": expected 2 columns");
    if (r == 0 && (trim(row[0]) == "code" || trim(row[0]) == "language_code")) continue;
    require(out.emplace(trim(row[0]), trim(row[1])).second, where + ": duplicate key '" + row[0] + "'");
  }
  return out;
}

Aligned align_languages(const EmbeddingStore& store, const DistanceMatrix& matrix,
                        const std::map<std::string, std::string>& mapping) {
  std::set<std::string> targets;
  for (const auto& [code, label] : mapping)
    require(targets.insert(label).second, "mapping is not injective: label '" + label + "' used twice");

  std::map<std::string, std::size_t> matrix_index;
  for (std::size_t i = 0; i < matrix.size(); ++i) matrix_index.emplace(matrix.labels[i], i);

  std::vector<std::size_t> keep;
  std::vector<std::size_t> rows;
  std::set<std::string> used;
  for (std::size_t l = 0; l < store.n_languages(); ++l) {
    const std::string& code = store.languages()[l].code;
    auto m = mapping.find(code);
    const std::string& label = m == mapping.end() ? code : m->second;
    auto it = matrix_index.find(label);
    if (it == matrix_index.end()) continue;
    require(used.insert(label).second, "matrix label '" + label + "' reached by two store languages");
    keep.push_back(l);
    rows.push_back(it->second);
  }
  require(!keep.empty(), "empty intersection between store languages and matrix labels");

  Aligned out{store.select_languages(keep), {}};
  std::vector<std::string> labels;
  for (std::size_t l : keep) labels.push_back(store.languages()[l].code);
  out.matrix = DistanceMatrix::zeros(std::move(labels));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) out.matrix.at(i, j) = matrix.at(rows[i], rows[j]);
  return out;
}

}  // namespace lexgeo
