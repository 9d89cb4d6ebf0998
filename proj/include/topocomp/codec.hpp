#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topocomp/bitstream.hpp"
#include "topocomp/errors.hpp"
#include "topocomp/quantize.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

static_assert(std::endian::native == std::endian::little,
              "archive layout assumes a little-endian host");

// Archive flag bits.
inline constexpr std::uint8_t kFlagPointwise = 0x01;
inline constexpr std::uint8_t kFlagExternalStream = 0x02;
inline constexpr std::uint8_t kFlagBackendId = 0x04;  // 0 = deflate
inline constexpr std::uint8_t kFlagBaseline = 0x08;   // uniform-step archive
inline constexpr std::uint8_t kFlagSourceF32 = 0x10;

inline constexpr std::uint8_t kArchiveVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 16;
inline constexpr std::array<char, 4> kMagic = {'T', 'O', 'P', 'C'};

/// Critical type codes stored in 2 bits.
inline constexpr std::uint8_t kTypeMinimum = 0;
inline constexpr std::uint8_t kTypeSaddle = 1;
inline constexpr std::uint8_t kTypeSaddle2 = 2;
inline constexpr std::uint8_t kTypeMaximum = 3;

struct TopoIndexEntry {
  VertexId vertex = kInvalidVertex;
  std::uint8_t type_code = 0;
  double value = 0.0;
  std::optional<std::uint32_t> interval_link;  // compact id of the non-empty
                                               // interval just above `value`

  bool operator==(const TopoIndexEntry&) const = default;
};

/// Critical vertex table of an archive, sorted by (value, vertex order).
struct TopologicalIndex {
  std::vector<TopoIndexEntry> entries;

  bool operator==(const TopologicalIndex&) const = default;
};

struct ArchiveHeader {
  std::uint8_t version = kArchiveVersion;
  std::uint8_t flags = 0;
  std::uint64_t compressed_payload_bytes = 0;
  // Available after payload decoding only:
  Dims3 dims{1, 1, 1};
  double eps = 0.0;
  std::uint32_t n_c = 0;
  std::uint32_t n_i = 0;
};

enum class LosslessDirection { Compress, Decompress };

/// General-purpose lossless backend (deflate). Bit-exact round trip; the
/// stream carries its raw length so decompression needs no sizing hints.
inline std::vector<std::uint8_t> lossless_pass(
    std::span<const std::uint8_t> bytes, LosslessDirection dir) {
  std::vector<std::uint8_t> out;
  if (dir == LosslessDirection::Compress) {
    const std::uint64_t raw_len = bytes.size();
    uLongf dest_len = compressBound(uLong(bytes.size()));
    out.resize(8 + dest_len);
    std::memcpy(out.data(), &raw_len, 8);
    if (raw_len == 0) {
      out.resize(8);
      return out;
    }
    const int rc = compress2(out.data() + 8, &dest_len, bytes.data(),
                             uLong(bytes.size()), 9);
    if (rc != Z_OK)
      throw ArchiveError(ArchiveError::Kind::BackendFailure,
                         "lossless backend failed to compress");
    out.resize(8 + dest_len);
  } else {
    if (bytes.size() < 8)
      throw ArchiveError(ArchiveError::Kind::Truncated,
                         "lossless stream shorter than its length prefix");
    std::uint64_t raw_len = 0;
    std::memcpy(&raw_len, bytes.data(), 8);
    out.resize(raw_len);
    if (raw_len == 0) return out;
    uLongf dest_len = uLongf(raw_len);
    const int rc = uncompress(out.data(), &dest_len, bytes.data() + 8,
                              uLong(bytes.size() - 8));
    if (rc != Z_OK || dest_len != raw_len)
      throw ArchiveError(ArchiveError::Kind::BackendFailure,
                         "lossless backend failed to decompress");
  }
  return out;
}

struct ArchiveSizeBreakdown {
  std::uint64_t vertex_block_bits = 0;  // n_v words of the interval-id width
  std::uint64_t index_entry_bits = 0;   // n_c * (id width + 2 + 64)
  std::uint64_t link_bits = 0;          // presence bits + stored links
  std::uint64_t bitmap_bits = 0;        // one bit per raw interval
  std::uint64_t payload_bytes = 0;      // exact pre-backend payload size

  static std::uint64_t pad_bytes(std::uint64_t bits) { return (bits + 7) / 8; }
};

/// Exact pre-backend payload size from the block dimensions.
inline ArchiveSizeBreakdown archive_size(std::uint64_t n_v, std::uint64_t n_c,
                                         std::uint64_t n_i,
                                         std::uint64_t n_raw,
                                         std::uint64_t n_links,
                                         bool has_external,
                                         std::uint64_t external_len) {
  const unsigned w_vertex = bit_width_for(std::max<std::uint64_t>(n_v, 2));
  const unsigned w_id = bit_width_for(std::max<std::uint64_t>(n_i, 2));
  ArchiveSizeBreakdown b;
  b.vertex_block_bits = n_v * w_id;
  b.index_entry_bits = n_c * (w_vertex + 2 + 64);
  b.link_bits = n_c + n_links * w_id;
  b.bitmap_bits = n_raw;
  b.payload_bytes = 28  // dims + eps + n_c + n_i
                    + ArchiveSizeBreakdown::pad_bytes(n_c * (w_vertex + 2)) +
                    n_c * 8 + ArchiveSizeBreakdown::pad_bytes(b.link_bits) +
                    ArchiveSizeBreakdown::pad_bytes(b.bitmap_bits) +
                    ArchiveSizeBreakdown::pad_bytes(b.vertex_block_bits) +
                    (has_external ? 8 + external_len : 0) + 4;  // checksum
  return b;
}

namespace detail {

inline std::vector<double> unique_index_values(
    const std::vector<TopoIndexEntry>& entries) {
  std::vector<double> vals;
  vals.reserve(entries.size());
  for (const auto& e : entries) vals.push_back(e.value);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

// Compact id of the raw interval immediately above `value`, when non-empty.
inline std::optional<std::uint32_t> derive_link(
    double value, const std::vector<double>& bounds,
    const std::vector<std::uint32_t>& nonempty_raw) {
  const auto it = std::lower_bound(bounds.begin(), bounds.end(), value);
  if (it == bounds.end() || *it != value)
    throw ArchiveError(ArchiveError::Kind::InvalidInput,
                       "critical value is not an interval bound");
  const auto raw = std::uint32_t(it - bounds.begin());
  if (raw + 1 >= bounds.size()) return std::nullopt;  // topmost bound
  const auto ne =
      std::lower_bound(nonempty_raw.begin(), nonempty_raw.end(), raw);
  if (ne == nonempty_raw.end() || *ne != raw) return std::nullopt;
  return std::uint32_t(ne - nonempty_raw.begin());
}

inline std::uint32_t payload_crc(std::span<const std::uint8_t> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, payload.data(), uInt(payload.size()));
  return std::uint32_t(crc);
}

template <typename T>
void append_raw(std::vector<std::uint8_t>& out, const T& v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_raw(const std::uint8_t* data, std::size_t size, std::size_t& pos) {
  if (pos + sizeof(T) > size)
    throw ArchiveError(ArchiveError::Kind::Truncated,
                       "archive payload truncated");
  T v;
  std::memcpy(&v, data + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace detail

/// Builds the archive index for a quantized field: one entry per critical
/// vertex, sorted by (value, position in the field's total order), each with
/// the compact id of the non-empty interval immediately above it.
inline TopologicalIndex build_index(
    const QuantizedField& q,
    const std::vector<std::pair<VertexId, std::uint8_t>>& type_codes,
    const VertexOrder& order) {
  TopologicalIndex index;
  for (const auto& [v, value] : q.critical_assignments) {
    TopoIndexEntry e;
    e.vertex = v;
    e.value = value;
    auto it = std::lower_bound(
        type_codes.begin(), type_codes.end(), v,
        [](const std::pair<VertexId, std::uint8_t>& a, VertexId b) {
          return a.first < b;
        });
    if (it == type_codes.end() || it->first != v)
      throw ArchiveError(ArchiveError::Kind::InvalidInput,
                         "missing critical type for an indexed vertex");
    e.type_code = it->second;
    e.interval_link = detail::derive_link(value, q.bounds, q.nonempty_raw);
    index.entries.push_back(e);
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [&order](const TopoIndexEntry& a, const TopoIndexEntry& b) {
              if (a.value != b.value) return a.value < b.value;
              return order.rank[a.vertex] < order.rank[b.vertex];
            });
  return index;
}

/// Serializes a quantized field plus its index into the archive byte layout.
/// The payload after the 16-byte fixed header is passed through the lossless
/// backend; decode(encode(x)) reproduces x exactly.
inline std::vector<std::uint8_t> encode(
    const QuantizedField& q, const TopologicalIndex& index, double eps,
    std::uint8_t flags,
    const std::vector<std::uint8_t>* external_stream = nullptr) {
  const std::uint64_t n_v = q.vertex_count();
  const std::uint64_t n_c = index.entries.size();
  const std::uint64_t n_i = q.interval_count();
  const std::uint64_t n_raw = q.bounds.size() > 1 ? q.bounds.size() - 1 : 0;

  if (n_v == 0)
    throw ArchiveError(ArchiveError::Kind::InvalidInput, "empty field");
  if (n_c != q.critical_assignments.size())
    throw ArchiveError(ArchiveError::Kind::InvalidInput,
                       "index does not match the quantized critical set");
  if (n_i == 0 && n_raw > 0 && n_v > n_c)
    throw ArchiveError(ArchiveError::Kind::InvalidInput,
                       "no non-empty interval for regular vertices");
  for (std::size_t i = 1; i < index.entries.size(); ++i) {
    if (index.entries[i].value < index.entries[i - 1].value)
      throw ArchiveError(ArchiveError::Kind::InvalidInput,
                         "index entries must be sorted by value");
  }

  // The decoder re-derives the bounds from the index; reject inputs where
  // that derivation would not match.
  {
    std::vector<double> base = detail::unique_index_values(index.entries);
    std::vector<double> expect =
        (flags & kFlagPointwise) ? subdivide_bounds(base, eps) : base;
    if (expect != q.bounds)
      throw ArchiveError(ArchiveError::Kind::InvalidInput,
                         "partition bounds are not derivable from the index");
  }
  for (const auto& e : index.entries) {
    if (e.interval_link !=
        detail::derive_link(e.value, q.bounds, q.nonempty_raw))
      throw ArchiveError(ArchiveError::Kind::InvalidInput,
                         "interval link inconsistent with the partition");
  }

  const unsigned w_vertex = bit_width_for(std::max<std::uint64_t>(n_v, 2));
  const unsigned w_id = bit_width_for(std::max<std::uint64_t>(n_i, 2));

  std::vector<std::uint8_t> payload;
  payload.reserve(std::size_t(
      archive_size(n_v, n_c, n_i, n_raw,
                   std::count_if(index.entries.begin(), index.entries.end(),
                                 [](const TopoIndexEntry& e) {
                                   return e.interval_link.has_value();
                                 }),
                   external_stream != nullptr,
                   external_stream ? external_stream->size() : 0)
          .payload_bytes));

  for (int a = 0; a < 3; ++a) detail::append_raw(payload, q.dims[a]);
  detail::append_raw(payload, eps);
  detail::append_raw(payload, std::uint32_t(n_c));
  detail::append_raw(payload, std::uint32_t(n_i));

  {
    BitWriter w(payload);
    for (const auto& e : index.entries) {
      w.put(e.vertex, w_vertex);
      w.put(e.type_code, 2);
    }
    w.align();
  }
  for (const auto& e : index.entries) detail::append_raw(payload, e.value);
  {
    BitWriter w(payload);
    for (const auto& e : index.entries) {
      w.put(e.interval_link.has_value() ? 1 : 0, 1);
      if (e.interval_link) w.put(*e.interval_link, w_id);
    }
    w.align();
  }
  {
    BitWriter w(payload);
    std::size_t ne = 0;
    for (std::uint64_t raw = 0; raw < n_raw; ++raw) {
      const bool nonempty =
          ne < q.nonempty_raw.size() && q.nonempty_raw[ne] == raw;
      w.put(nonempty ? 1 : 0, 1);
      if (nonempty) ++ne;
    }
    w.align();
  }
  {
    BitWriter w(payload);
    for (std::uint64_t v = 0; v < n_v; ++v) w.put(q.interval_id[v], w_id);
    w.align();
  }
  if (external_stream) {
    detail::append_raw(payload, std::uint64_t(external_stream->size()));
    payload.insert(payload.end(), external_stream->begin(),
                   external_stream->end());
  }
  detail::append_raw(payload, detail::payload_crc(payload));

  std::vector<std::uint8_t> compressed =
      lossless_pass(payload, LosslessDirection::Compress);

  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeaderBytes + compressed.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kArchiveVersion);
  out.push_back(flags);
  out.push_back(0);
  out.push_back(0);
  detail::append_raw(out, std::uint64_t(compressed.size()));
  out.insert(out.end(), compressed.begin(), compressed.end());
  return out;
}

/// Reads the fixed archive header. Never touches bytes past the first 16.
inline ArchiveHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFixedHeaderBytes)
    throw ArchiveError(ArchiveError::Kind::Truncated,
                       "archive shorter than its fixed header");
  if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw ArchiveError(ArchiveError::Kind::BadMagic, "not a TOPC archive");
  ArchiveHeader h;
  h.version = bytes[4];
  if (h.version != kArchiveVersion)
    throw ArchiveError(ArchiveError::Kind::BadVersion,
                       "unsupported archive version " +
                           std::to_string(int(h.version)));
  h.flags = bytes[5];
  std::memcpy(&h.compressed_payload_bytes, bytes.data() + 8, 8);
  return h;
}

struct DecodeResult {
  ArchiveHeader header;
  QuantizedField quantized;
  TopologicalIndex index;
  std::vector<std::uint8_t> external_stream;
};

/// Exact inverse of encode.
inline DecodeResult decode(std::span<const std::uint8_t> bytes) {
  DecodeResult r;
  r.header = parse_header(bytes);
  if (bytes.size() < kFixedHeaderBytes + r.header.compressed_payload_bytes)
    throw ArchiveError(ArchiveError::Kind::Truncated,
                       "archive shorter than its declared payload");
  if (bytes.size() > kFixedHeaderBytes + r.header.compressed_payload_bytes)
    throw ArchiveError(ArchiveError::Kind::Corrupt,
                       "archive longer than its declared payload");

  const std::vector<std::uint8_t> payload = lossless_pass(
      bytes.subspan(kFixedHeaderBytes), LosslessDirection::Decompress);
  if (payload.size() < 32)
    throw ArchiveError(ArchiveError::Kind::Truncated,
                       "archive payload truncated");

  {
    std::uint32_t stored;
    std::memcpy(&stored, payload.data() + payload.size() - 4, 4);
    const std::uint32_t computed = detail::payload_crc(
        std::span<const std::uint8_t>(payload.data(), payload.size() - 4));
    if (stored != computed)
      throw ArchiveError(ArchiveError::Kind::ChecksumMismatch,
                         "archive payload checksum mismatch");
  }

  std::size_t pos = 0;
  const std::uint8_t* data = payload.data();
  const std::size_t size = payload.size() - 4;
  Dims3 dims;
  for (int a = 0; a < 3; ++a)
    dims[a] = detail::read_raw<std::uint32_t>(data, size, pos);
  const double eps = detail::read_raw<double>(data, size, pos);
  const std::uint32_t n_c = detail::read_raw<std::uint32_t>(data, size, pos);
  const std::uint32_t n_i = detail::read_raw<std::uint32_t>(data, size, pos);
  const std::uint64_t n_v =
      std::uint64_t(dims[0]) * std::uint64_t(dims[1]) * std::uint64_t(dims[2]);
  if (n_v == 0 || n_v > 0xFFFFFFFFull || n_c > n_v)
    throw ArchiveError(ArchiveError::Kind::Corrupt, "implausible archive counts");

  r.header.dims = dims;
  r.header.eps = eps;
  r.header.n_c = n_c;
  r.header.n_i = n_i;

  const unsigned w_vertex = bit_width_for(std::max<std::uint64_t>(n_v, 2));
  const unsigned w_id = bit_width_for(std::max<std::uint64_t>(n_i, 2));

  r.index.entries.resize(n_c);
  {
    BitReader br(data + pos, size - pos);
    for (auto& e : r.index.entries) {
      e.vertex = VertexId(br.get(w_vertex));
      e.type_code = std::uint8_t(br.get(2));
      if (e.vertex >= n_v)
        throw ArchiveError(ArchiveError::Kind::Corrupt,
                           "critical vertex id out of range");
    }
    pos += br.byte_position();
  }
  for (auto& e : r.index.entries)
    e.value = detail::read_raw<double>(data, size, pos);
  for (std::size_t i = 1; i < r.index.entries.size(); ++i) {
    if (r.index.entries[i].value < r.index.entries[i - 1].value)
      throw ArchiveError(ArchiveError::Kind::Corrupt,
                         "index entries out of order");
  }

  std::vector<double> base = detail::unique_index_values(r.index.entries);
  std::vector<double> bounds = (r.header.flags & kFlagPointwise)
                                   ? subdivide_bounds(base, eps)
                                   : std::move(base);
  const std::uint64_t n_raw = bounds.size() > 1 ? bounds.size() - 1 : 0;

  {
    BitReader br(data + pos, size - pos);
    for (auto& e : r.index.entries) {
      if (br.get(1))
        e.interval_link = std::uint32_t(br.get(w_id));
      else
        e.interval_link.reset();
    }
    pos += br.byte_position();
  }

  std::vector<std::uint32_t> nonempty_raw;
  {
    BitReader br(data + pos, size - pos);
    for (std::uint64_t raw = 0; raw < n_raw; ++raw)
      if (br.get(1)) nonempty_raw.push_back(std::uint32_t(raw));
    pos += br.byte_position();
  }
  if (nonempty_raw.size() != n_i)
    throw ArchiveError(ArchiveError::Kind::Corrupt,
                       "interval bitmap does not match the interval count");

  r.quantized.dims = dims;
  r.quantized.bounds = std::move(bounds);
  r.quantized.nonempty_raw = std::move(nonempty_raw);
  for (const auto& e : r.index.entries) {
    if (e.interval_link != detail::derive_link(e.value, r.quantized.bounds,
                                               r.quantized.nonempty_raw))
      throw ArchiveError(ArchiveError::Kind::Corrupt,
                         "interval link inconsistent with the partition");
    r.quantized.critical_assignments.emplace_back(e.vertex, e.value);
  }
  std::sort(r.quantized.critical_assignments.begin(),
            r.quantized.critical_assignments.end());
  for (std::size_t i = 1; i < r.quantized.critical_assignments.size(); ++i) {
    if (r.quantized.critical_assignments[i].first ==
        r.quantized.critical_assignments[i - 1].first)
      throw ArchiveError(ArchiveError::Kind::Corrupt,
                         "duplicate critical vertex in the index");
  }

  r.quantized.interval_id.resize(n_v);
  {
    BitReader br(data + pos, size - pos);
    for (std::uint64_t v = 0; v < n_v; ++v) {
      const auto id = std::uint32_t(br.get(w_id));
      if (id >= std::max<std::uint32_t>(n_i, 1))
        throw ArchiveError(ArchiveError::Kind::Corrupt,
                           "interval id out of range");
      r.quantized.interval_id[v] = id;
    }
    pos += br.byte_position();
  }

  if (r.header.flags & kFlagExternalStream) {
    const auto len = detail::read_raw<std::uint64_t>(data, size, pos);
    if (pos + len > size)
      throw ArchiveError(ArchiveError::Kind::Truncated,
                         "external stream truncated");
    r.external_stream.assign(data + pos, data + pos + len);
    pos += len;
  }
  if (pos != size)
    throw ArchiveError(ArchiveError::Kind::Corrupt,
                       "trailing bytes in archive payload");
  return r;
}

/// Pluggable third-party lossy codec interface.
class ExternalCodec {
 public:
  virtual ~ExternalCodec() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::uint8_t> compress_field(const ScalarField& f) const = 0;
  virtual std::vector<double> decompress_field(std::span<const std::uint8_t> bytes,
                                               Dims3 dims) const = 0;
};

/// Built-in stand-in: uniform 8-bit quantization over the global range
/// (256 levels, mid-value reconstruction, 8 bits per scalar).
class Uq8Codec final : public ExternalCodec {
 public:
  std::string name() const override { return "uq8"; }

  std::vector<std::uint8_t> compress_field(const ScalarField& f) const override {
    double lo = f.values[0], hi = f.values[0];
    for (double v : f.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double range = hi - lo;
    std::vector<std::uint8_t> out;
    out.reserve(16 + f.vertex_count());
    detail::append_raw(out, lo);
    detail::append_raw(out, range);
    for (double v : f.values) {
      int code = 0;
      if (range > 0.0)
        code = std::min(255, int(std::floor((v - lo) / range * 256.0)));
      out.push_back(std::uint8_t(code));
    }
    return out;
  }

  std::vector<double> decompress_field(std::span<const std::uint8_t> bytes,
                                       Dims3 dims) const override {
    const std::uint64_t n_v =
        std::uint64_t(dims[0]) * std::uint64_t(dims[1]) * std::uint64_t(dims[2]);
    if (bytes.size() != 16 + n_v)
      throw ArchiveError(ArchiveError::Kind::Corrupt,
                         "uq8 stream does not match the grid dimensions");
    double lo, range;
    std::memcpy(&lo, bytes.data(), 8);
    std::memcpy(&range, bytes.data() + 8, 8);
    std::vector<double> vals(n_v);
    for (std::uint64_t v = 0; v < n_v; ++v)
      vals[v] = lo + (double(bytes[16 + v]) + 0.5) / 256.0 * range;
    return vals;
  }
};

inline const ExternalCodec* external_codec_by_name(const std::string& name) {
  static const Uq8Codec uq8;
  if (name == "uq8") return &uq8;
  return nullptr;
}

}  // namespace topocomp
