#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lexgeo/store.hpp"

namespace lexgeo {

// LGEO layout, little-endian throughout:
//   "LGEO" | u32 version (=1) | u64 metadata length | metadata JSON (UTF-8)
//   | tensor [layer][concept][language][dim] binary32 | u64 CRC-64 of tensor bytes
// The mask travels inside the metadata as row-major [concept][language] bits,
// LSB-first within each byte, base64 encoded.

inline constexpr std::uint32_t kLgeoVersion = 1;

/// CRC-64/XZ (ECMA-182 polynomial, reflected, init and xorout all ones).
std::uint64_t crc64(std::span<const std::uint8_t> bytes, std::uint64_t crc = 0) noexcept;

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Serializes to an in-memory LGEO image.
std::vector<std::uint8_t> encode_store(const EmbeddingStore& store);
/// Parses an LGEO image; every malformed input raises Error(format).
EmbeddingStore decode_store(std::span<const std::uint8_t> bytes);

void save_store(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore load_store(const std::filesystem::path& path);

/// Metadata only (tensor empty, tensor_crc filled from the trailer).
struct StoreInfo {
  std::vector<ConceptMeta> concepts;
  std::vector<LanguageMeta> languages;
  std::vector<std::uint32_t> layers;
  Condition condition = Condition::contextual;
  std::size_t dim = 0;
  std::uint64_t tensor_crc = 0;
};

StoreInfo peek_store(const std::filesystem::path& path);

/// CRC of the tensor block as it would be written.
std::uint64_t tensor_checksum(const EmbeddingStore& store);

}  // namespace lexgeo
