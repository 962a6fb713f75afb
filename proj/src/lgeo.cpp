#include "lexgeo/lgeo.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "lexgeo/error.hpp"

namespace lexgeo {

namespace {

using json = nlohmann::json;

constexpr std::array<std::uint8_t, 4> kMagic{'L', 'G', 'E', 'O'};
constexpr std::size_t kPreambleSize = 4 + 4 + 8;

constexpr std::array<std::uint64_t, 256> make_crc_table() {
  std::array<std::uint64_t, 256> table{};
  constexpr std::uint64_t poly = 0xC96C5795D7870F42ULL;
  for (std::uint64_t i = 0; i < 256; ++i) {
    std::uint64_t crc = i;
    for (int k = 0; k < 8; ++k) crc = (crc & 1) ? (crc >> 1) ^ poly : crc >> 1;
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> pack_mask(const EmbeddingStore& store) {
  const auto& mask = store.mask();
  std::vector<std::uint8_t> bits((mask.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bits;
}

json metadata_json(const EmbeddingStore& store) {
  json concepts = json::array();
  for (const auto& c : store.concepts())
    concepts.push_back({{"gloss", c.gloss}, {"category", c.category}, {"polysemous", c.polysemous}});
  json languages = json::array();
  for (const auto& l : store.languages())
    languages.push_back({{"code", l.code}, {"family", l.family}, {"script", l.script}});
  return {
      {"concepts", std::move(concepts)},
      {"languages", std::move(languages)},
      {"layers", store.layers()},
      {"condition", to_string(store.condition())},
      {"dim", store.dim()},
      {"mask", base64_encode(pack_mask(store))},
  };
}

struct ParsedMeta {
  StoreInfo info;
  std::vector<std::uint8_t> mask_bits;
};

ParsedMeta parse_metadata(std::span<const std::uint8_t> block) {
  ParsedMeta out;
  try {
    const json meta = json::parse(block.begin(), block.end());
    for (const auto& c : meta.at("concepts"))
      out.info.concepts.push_back(
          {c.at("gloss").get<std::string>(), c.at("category").get<std::string>(), c.at("polysemous").get<bool>()});
    for (const auto& l : meta.at("languages"))
      out.info.languages.push_back(
          {l.at("code").get<std::string>(), l.at("family").get<std::string>(), l.at("script").get<std::string>()});
    out.info.layers = meta.at("layers").get<std::vector<std::uint32_t>>();
    out.info.condition = condition_from_string(meta.at("condition").get<std::string>());
    out.info.dim = meta.at("dim").get<std::size_t>();
    out.mask_bits = base64_decode(meta.at("mask").get<std::string>());
  } catch (const json::exception& e) {
    fail_format(std::string("bad metadata: ") + e.what());
  } catch (const Error& e) {
    fail_format(std::string("bad metadata: ") + e.what());
  }
  if (out.info.dim == 0 || out.info.dim > (1u << 24)) fail_format("bad metadata: dim out of range");
  const std::size_t cells = out.info.concepts.size() * out.info.languages.size();
  if (out.mask_bits.size() != (cells + 7) / 8) fail_format("bad metadata: mask length mismatch");
  return out;
}

struct Preamble {
  std::uint64_t meta_len = 0;
};

Preamble parse_preamble(std::span<const std::uint8_t> bytes, std::uint64_t file_size) {
  if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) fail_format("bad magic");
  if (bytes.size() < kPreambleSize) fail_format("truncated header");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kLgeoVersion) fail_format("version unsupported: " + std::to_string(version));
  const auto meta_len = get_le<std::uint64_t>(bytes.data() + 8);
  if (meta_len > file_size - kPreambleSize) fail_format("truncated metadata");
  return {meta_len};
}

std::uint64_t expected_tensor_bytes(const StoreInfo& info) {
  const unsigned __int128 n = static_cast<unsigned __int128>(info.layers.size()) * info.concepts.size() *
                              info.languages.size() * info.dim * sizeof(float);
  if (n > (static_cast<unsigned __int128>(1) << 62)) fail_format("bad metadata: tensor too large");
  return static_cast<std::uint64_t>(n);
}

}  // namespace

std::uint64_t crc64(std::span<const std::uint8_t> bytes, std::uint64_t crc) noexcept {
  crc = ~crc;
  for (std::uint8_t b : bytes) crc = kCrcTable[(crc ^ b) & 0xff] ^ (crc >> 8);
  return ~crc;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  auto value = [](char ch) -> int {
    if (ch >= 'A' && ch <= 'Z') return ch - 'A';
    if (ch >= 'a' && ch <= 'z') return ch - 'a' + 26;
    if (ch >= '0' && ch <= '9') return ch - '0' + 52;
    if (ch == '+') return 62;
    if (ch == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) fail_format("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      if (ch == '=' && last && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int d = value(ch);
      if (d < 0 || pad > 0) fail_format("invalid base64");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::uint64_t tensor_checksum(const EmbeddingStore& store) {
  const auto& t = store.tensor();
  if constexpr (std::endian::native == std::endian::little) {
    return crc64({reinterpret_cast<const std::uint8_t*>(t.data()), t.size() * sizeof(float)});
  } else {
    std::vector<std::uint8_t> buf;
    buf.reserve(t.size() * 4);
    for (float f : t) put_le(buf, std::bit_cast<std::uint32_t>(f));
    return crc64(buf);
  }
}

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store) {
  store.validate();
  const std::string meta = metadata_json(store).dump();
  std::vector<std::uint8_t> out;
  out.reserve(kPreambleSize + meta.size() + store.tensor().size() * 4 + 8);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kLgeoVersion);
  put_le<std::uint64_t>(out, meta.size());
  out.insert(out.end(), meta.begin(), meta.end());
  const std::size_t tensor_start = out.size();
  for (float f : store.tensor()) put_le(out, std::bit_cast<std::uint32_t>(f));
  const std::uint64_t crc = crc64({out.data() + tensor_start, out.size() - tensor_start});
  put_le<std::uint64_t>(out, crc);
  return out;
}

EmbeddingStore decode_store(std::span<const std::uint8_t> bytes) {
  const Preamble pre = parse_preamble(bytes, bytes.size());
  auto parsed = parse_metadata(bytes.subspan(kPreambleSize, pre.meta_len));
  StoreInfo& info = parsed.info;

  const std::uint64_t tensor_bytes = expected_tensor_bytes(info);
  const std::uint64_t tensor_start = kPreambleSize + pre.meta_len;
  const std::uint64_t available = bytes.size() - tensor_start;
  if (available < tensor_bytes + 8) fail_format("truncated tensor");
  if (available > tensor_bytes + 8) fail_format("trailing bytes after checksum");

  const auto tensor_block = bytes.subspan(tensor_start, tensor_bytes);
  const auto stored_crc = get_le<std::uint64_t>(bytes.data() + tensor_start + tensor_bytes);
  if (crc64(tensor_block) != stored_crc) fail_format("checksum mismatch");

  EmbeddingStore store(std::move(info.concepts), std::move(info.languages), std::move(info.layers), info.condition,
                       info.dim);
  auto& t = store.tensor();
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = std::bit_cast<float>(get_le<std::uint32_t>(tensor_block.data() + 4 * i));
  for (std::size_t c = 0; c < store.n_concepts(); ++c)
    for (std::size_t l = 0; l < store.n_languages(); ++l) {
      const std::size_t i = c * store.n_languages() + l;
      store.set_present(c, l, (parsed.mask_bits[i / 8] >> (i % 8)) & 1);
    }
  try {
    store.validate();
  } catch (const Error& e) {
    fail_format(e.what());
  }
  return store;
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  const auto bytes = encode_store(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_io("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail_io("write failed for '" + path.string() + "'");
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail_io("cannot open '" + path.string() + "'");
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::uint8_t> bytes(size);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) fail_io("read failed for '" + path.string() + "'");
  return bytes;
}

}  // namespace

EmbeddingStore load_store(const std::filesystem::path& path) { return decode_store(read_file(path)); }

StoreInfo peek_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail_io("cannot open '" + path.string() + "'");
  const auto size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> head(std::min<std::uint64_t>(size, kPreambleSize));
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  const Preamble pre = parse_preamble(head, size);
  std::vector<std::uint8_t> meta(pre.meta_len);
  in.read(reinterpret_cast<char*>(meta.data()), static_cast<std::streamsize>(meta.size()));
  if (!in) fail_io("read failed for '" + path.string() + "'");
  auto parsed = parse_metadata(meta);
  const std::uint64_t need = kPreambleSize + pre.meta_len + expected_tensor_bytes(parsed.info) + 8;
  if (size < need) fail_format("truncated tensor");
  std::array<std::uint8_t, 8> tail{};
  in.seekg(static_cast<std::streamoff>(need - 8));
  in.read(reinterpret_cast<char*>(tail.data()), 8);
  parsed.info.tensor_crc = get_le<std::uint64_t>(tail.data());
  return std::move(parsed.info);
}

}  // namespace lexgeo
