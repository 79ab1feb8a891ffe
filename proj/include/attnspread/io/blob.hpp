#pragma once

// "ATNB" tensor blob, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "ATNB"
//   4       1     version (1)
//   5       1     dtype (0 = IEEE-754 binary32)
//   6       2     padding, zero
//   8       4     rank (u32)
//   12      4*r   dims (u32 each)
//   ...     4*n   payload, row-major binary32, n = prod(dims)

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "attnspread/error.hpp"

namespace attnspread::io {

inline constexpr char kBlobMagic[4] = {'A', 'T', 'N', 'B'};
inline constexpr std::uint8_t kBlobVersion = 1;
inline constexpr std::uint8_t kBlobDtypeF32 = 0;
inline constexpr std::uint32_t kBlobMaxRank = 8;

struct TensorBlob {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_blob(const TensorBlob& blob) {
  if (blob.dims.empty() || blob.dims.size() > kBlobMaxRank)
    throw ParameterError("blob: rank must be in [1, 8]");
  if (blob.values.size() != blob.element_count())
    throw ParameterError("blob: value count does not match dims");
  std::vector<std::uint8_t> out;
  out.reserve(12 + 4 * blob.dims.size() + 4 * blob.values.size());
  out.insert(out.end(), std::begin(kBlobMagic), std::end(kBlobMagic));
  out.push_back(kBlobVersion);
  out.push_back(kBlobDtypeF32);
  out.push_back(0);
  out.push_back(0);
  detail::put_u32(out, static_cast<std::uint32_t>(blob.dims.size()));
  for (auto d : blob.dims) detail::put_u32(out, d);
  for (float v : blob.values) {
    if (!std::isfinite(v)) throw ParameterError("blob: non-finite payload value");
    detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

/// Parses a blob; `source` names the file in error messages.
inline TensorBlob decode_blob(std::span<const std::uint8_t> bytes, const std::string& source) {
  const auto fail = [&source](std::size_t at, const std::string& what) {
    return FormatError(source, static_cast<long long>(at), what);
  };
  if (bytes.size() < 12) throw fail(bytes.size(), "truncated header");
  if (std::memcmp(bytes.data(), kBlobMagic, 4) != 0) throw fail(0, "bad magic");
  if (bytes[4] != kBlobVersion) throw fail(4, "unsupported version " + std::to_string(bytes[4]));
  if (bytes[5] != kBlobDtypeF32) throw fail(5, "unsupported dtype " + std::to_string(bytes[5]));
  if (bytes[6] != 0 || bytes[7] != 0) throw fail(6, "nonzero padding");
  const std::uint32_t rank = detail::get_u32(bytes, 8);
  if (rank == 0 || rank > kBlobMaxRank) throw fail(8, "invalid rank " + std::to_string(rank));
  const std::size_t header = 12 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < header) throw fail(bytes.size(), "truncated dims");

  TensorBlob blob;
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = detail::get_u32(bytes, 12 + 4 * i);
    if (d == 0) throw fail(12 + 4 * i, "zero dimension");
    blob.dims.push_back(d);
    count *= d;
    if (count > (bytes.size() - header) / 4 + 1) throw fail(bytes.size(), "truncated payload");
  }
  const std::size_t expected = header + 4 * count;
  if (bytes.size() < expected) throw fail(bytes.size(), "truncated payload");
  if (bytes.size() > expected) throw fail(expected, "trailing bytes after payload");

  blob.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(detail::get_u32(bytes, header + 4 * i));
    if (!std::isfinite(v)) throw fail(header + 4 * i, "non-finite payload value");
    blob.values[i] = v;
  }
  return blob;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw MissingFileError("missing file: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline TensorBlob read_blob(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_blob(bytes, path.string());
}

inline void write_blob(const std::filesystem::path& path, const TensorBlob& blob) {
  const auto bytes = encode_blob(blob);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace attnspread::io
