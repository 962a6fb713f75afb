#include "lexgeo/text.hpp"

#include <algorithm>
#include <cstdint>

#include "lexgeo/error.hpp"

namespace lexgeo {

namespace {

struct DecompEntry {
  std::uint32_t cp;
  std::uint32_t offset;
  std::uint32_t length;
};
struct CaseEntry {
  std::uint32_t from;
  std::uint32_t to;
};
struct MarkRange {
  std::uint32_t first;
  std::uint32_t last;
};

#include "unicode_tables.inc"

constexpr char32_t kReplacement = 0xFFFD;

}  // namespace

CodePoints utf8_decode(std::string_view s) {
  CodePoints out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(kReplacement);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(const CodePoints& cps) {
  std::string out;
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

char32_t to_lower(char32_t cp) {
  const auto* end = std::end(kLower);
  const auto* it = std::lower_bound(std::begin(kLower), end, cp,
                                    [](const CaseEntry& e, char32_t v) { return e.from < v; });
  return (it != end && it->from == cp) ? static_cast<char32_t>(it->to) : cp;
}

CodePoints canonical_decompose(const CodePoints& cps) {
  CodePoints out;
  for (char32_t cp : cps) {
    const auto* end = std::end(kDecomp);
    const auto* it = std::lower_bound(std::begin(kDecomp), end, cp,
                                      [](const DecompEntry& e, char32_t v) { return e.cp < v; });
    if (it != end && it->cp == cp) {
      for (std::uint32_t k = 0; k < it->length; ++k) out.push_back(kDecompData[it->offset + k]);
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

bool is_combining_mark(char32_t cp) {
  const auto* end = std::end(kMarks);
  const auto* it =
      std::upper_bound(std::begin(kMarks), end, cp, [](char32_t v, const MarkRange& r) { return v < r.first; });
  if (it == std::begin(kMarks)) return false;
  --it;
  return cp >= it->first && cp <= it->last;
}

std::size_t edit_distance(const CodePoints& a, const CodePoints& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const CodePoints x = utf8_decode(a);
  const CodePoints y = utf8_decode(b);
  const std::size_t longest = std::max(x.size(), y.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(x, y)) / static_cast<double>(longest);
}

PhoneticMap::PhoneticMap(const std::map<char32_t, char32_t>& rules) {
  for (const auto& [from, to] : rules) {
    char32_t cur = to;
    std::size_t steps = 0;
    for (auto it = rules.find(cur); it != rules.end(); it = rules.find(cur)) {
      cur = it->second;
      if (++steps > rules.size()) fail("phonetic map contains a cycle through U+" + std::to_string(from));
    }
    if (cur == from) fail("phonetic map contains a cycle through U+" + std::to_string(from));
    table_[from] = cur;
  }
}

PhoneticMap PhoneticMap::defaults() {
  return PhoneticMap({
      {U'b', U'p'},
      {U'd', U't'},
      {U'g', U'k'},
      {U'v', U'f'},
      {U'z', U's'},
      {U'w', U'v'},
      {U'ʒ', U'š'},
      {U'ž', U'š'},
      {U'š', U's'},
      {U'đ', U't'},
  });
}

char32_t PhoneticMap::apply(char32_t cp) const {
  auto it = table_.find(cp);
  return it == table_.end() ? cp : it->second;
}

std::string orthographic_normalize(std::string_view s) {
  CodePoints cps = utf8_decode(s);
  for (char32_t& cp : cps) cp = to_lower(cp);
  return utf8_encode(cps);
}

std::string phonetic_normalize(std::string_view s, const SurfaceSimilarityConfig& config) {
  CodePoints cps = utf8_decode(s);
  for (char32_t& cp : cps) cp = to_lower(cp);
  cps = canonical_decompose(cps);
  if (config.strip_diacritics) std::erase_if(cps, is_combining_mark);
  for (char32_t& cp : cps) cp = config.phonetic_map.apply(cp);
  return utf8_encode(cps);
}

}  // namespace lexgeo
