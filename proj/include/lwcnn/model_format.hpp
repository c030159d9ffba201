#pragma once

// .lwcm container. All integers little-endian.
//
//   offset  size  field
//   0       4     magic "LWCM"
//   4       2     format_version (1)
//   6       2     reserved, 0
//   8       8     header_length (72)
//   16      8     graph_offset (72)
//   24      8     graph_length
//   32      8     index_offset (= graph_offset + graph_length)
//   40      8     index_length
//   48      8     tensor_count
//   56      8     payload_offset (= index end rounded up to 64)
//   64      8     payload_length (first tensor start .. last tensor end)
//   72      ...   graph section, index section, zero padding, payload
//   end-4   4     CRC-32 of every preceding byte
//
// Strings are a u32 byte length followed by UTF-8 bytes.
//
// graph:  str name, u64 H, u64 W, u64 C, str note, u32 layer_count, then per layer
//         str name, u8 kind, u8 padding, u8 flags (1 = batch-norm, 2 = relu),
//         u8 classifier, u32 kernel, u32 stride, u32 in_channels, u32 out_channels,
//         f32 bn_epsilon
// index:  per tensor, sorted by name bytes: str name, u8 dtype (0 = f32), u8 rank,
//         u64 dims[rank], u64 payload_offset (absolute), u64 payload_length
// payload: f32 values; every tensor starts on a 64-byte boundary, and the gap to the
//         next tensor is zero padding up to that boundary.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lwcnn/crc32.hpp"
#include "lwcnn/forward.hpp"
#include "lwcnn/graph.hpp"
#include "lwcnn/graph_text.hpp"

namespace lwcnn {

static_assert(std::endian::native == std::endian::little,
              "in-place tensor views assume a little-endian host");

inline constexpr std::array<char, 4> kModelMagic = {'L', 'W', 'C', 'M'};
inline constexpr std::uint16_t kModelFormatVersion = 1;
inline constexpr std::uint64_t kModelHeaderLength = 72;
inline constexpr std::uint64_t kPayloadAlignment = 64;

enum class FormatErrorKind {
  BadMagic,
  UnsupportedVersion,
  ChecksumMismatch,
  OutOfBounds,
  DuplicateName,
  Misaligned,
  Malformed,
};

inline const char* to_string(FormatErrorKind k) {
  switch (k) {
    case FormatErrorKind::BadMagic: return "bad magic";
    case FormatErrorKind::UnsupportedVersion: return "unsupported version";
    case FormatErrorKind::ChecksumMismatch: return "checksum mismatch";
    case FormatErrorKind::OutOfBounds: return "out of bounds";
    case FormatErrorKind::DuplicateName: return "duplicate tensor name";
    case FormatErrorKind::Misaligned: return "misaligned";
    case FormatErrorKind::Malformed: return "malformed";
  }
  return "?";
}

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& msg)
      : Error(std::string("model file ") + to_string(kind) + ": " + msg), kind_(kind) {}
  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

class SerializeError : public Error {
 public:
  using Error::Error;
};

/// Counts tensor payloads copied out of model bytes. In-place views never touch it.
inline std::atomic<std::uint64_t>& payload_copy_count() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

inline constexpr std::uint64_t align_up(std::uint64_t v, std::uint64_t a) {
  return (v + a - 1) / a * a;
}

// ---------------------------------------------------------------------------
// Byte-level helpers

namespace detail {

class ByteWriter {
 public:
  std::vector<std::byte>& bytes() { return out_; }
  std::size_t size() const { return out_.size(); }

  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::byte*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void put_str(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    const auto* p = reinterpret_cast<const std::byte*>(s.data());
    out_.insert(out_.end(), p, p + s.size());
  }
  void pad_to(std::uint64_t boundary) {
    out_.resize(static_cast<std::size_t>(align_up(out_.size(), boundary)), std::byte{0});
  }
  template <typename T>
  void patch(std::size_t at, T v) {
    std::memcpy(out_.data() + at, &v, sizeof(T));
  }

 private:
  std::vector<std::byte> out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::byte> bytes, std::uint64_t begin, std::uint64_t end)
      : bytes_(bytes), pos_(begin), end_(end) {}

  std::uint64_t pos() const { return pos_; }
  bool done() const { return pos_ == end_; }

  void need(std::uint64_t n, const char* what) const {
    if (n > end_ - pos_) {
      throw FormatError(FormatErrorKind::OutOfBounds,
                        std::string(what) + " runs past the end of its section");
    }
  }
  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_str(const char* what) {
    const auto n = get<std::uint32_t>(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::byte> bytes_;
  std::uint64_t pos_;
  std::uint64_t end_;
};

struct IndexEntry {
  std::string name;
  Shape shape;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

struct Header {
  std::uint64_t graph_offset, graph_length, index_offset, index_length, tensor_count,
      payload_offset, payload_length;
};

inline void write_graph(ByteWriter& w, const ModelGraph& g) {
  w.put_str(g.name);
  for (std::size_t i = 0; i < 3; ++i) w.put(static_cast<std::uint64_t>(g.input_shape.at(i)));
  w.put_str(g.note);
  w.put(static_cast<std::uint32_t>(g.layers.size()));
  for (const auto& l : g.layers) {
    w.put_str(l.name);
    w.put(static_cast<std::uint8_t>(l.kind));
    w.put(static_cast<std::uint8_t>(l.padding));
    w.put(static_cast<std::uint8_t>((l.has_batchnorm ? 1u : 0u) | (l.has_relu ? 2u : 0u)));
    w.put(static_cast<std::uint8_t>(l.classifier));
    w.put(l.kernel);
    w.put(l.stride);
    w.put(l.in_channels);
    w.put(l.out_channels);
    w.put(l.bn_epsilon);
  }
}

inline ModelGraph read_graph(ByteReader& r) {
  auto malformed = [](const std::string& m) { return FormatError(FormatErrorKind::Malformed, m); };
  ModelGraph g;
  g.name = r.get_str("graph name");
  for (int i = 0; i < 3; ++i) g.input_shape.push_back(r.get<std::uint64_t>("input shape"));
  g.note = r.get_str("graph note");
  const auto count = r.get<std::uint32_t>("layer count");
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerSpec l;
    l.name = r.get_str("layer name");
    const auto kind = r.get<std::uint8_t>("layer kind");
    const auto padding = r.get<std::uint8_t>("layer padding");
    const auto flags = r.get<std::uint8_t>("layer flags");
    const auto classifier = r.get<std::uint8_t>("classifier kind");
    if (kind > static_cast<std::uint8_t>(LayerKind::Classifier)) throw malformed("bad layer kind");
    if (padding > 1) throw malformed("bad padding code");
    if (flags > 3) throw malformed("bad layer flags");
    if (classifier > 2) throw malformed("bad classifier kind");
    l.kind = static_cast<LayerKind>(kind);
    l.padding = static_cast<Padding>(padding);
    l.has_batchnorm = flags & 1u;
    l.has_relu = flags & 2u;
    l.classifier = static_cast<ClassifierKind>(classifier);
    l.kernel = r.get<std::uint32_t>("kernel");
    l.stride = r.get<std::uint32_t>("stride");
    l.in_channels = r.get<std::uint32_t>("in_channels");
    l.out_channels = r.get<std::uint32_t>("out_channels");
    l.bn_epsilon = r.get<float>("bn epsilon");
    g.layers.push_back(std::move(l));
  }
  if (!r.done()) throw malformed("trailing bytes after graph records");
  return g;
}

inline bool add_overflows(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b;
}

/// Checks magic, version, section layout and the trailer CRC. Returns the header.
inline Header check_container(std::span<const std::byte> bytes) {
  const std::uint64_t size = bytes.size();
  if (size < kModelHeaderLength + 4) {
    throw FormatError(FormatErrorKind::OutOfBounds,
                      "file of " + std::to_string(size) + " bytes is shorter than the header");
  }
  if (std::memcmp(bytes.data(), kModelMagic.data(), 4) != 0) {
    throw FormatError(FormatErrorKind::BadMagic, "expected \"LWCM\"");
  }
  ByteReader r(bytes, 4, kModelHeaderLength);
  const auto version = r.get<std::uint16_t>("version");
  if (version != kModelFormatVersion) {
    throw FormatError(FormatErrorKind::UnsupportedVersion,
                      "version " + std::to_string(version) + " (supported: 1)");
  }
  r.get<std::uint16_t>("reserved");
  const auto header_length = r.get<std::uint64_t>("header length");
  Header h{};
  h.graph_offset = r.get<std::uint64_t>("graph offset");
  h.graph_length = r.get<std::uint64_t>("graph length");
  h.index_offset = r.get<std::uint64_t>("index offset");
  h.index_length = r.get<std::uint64_t>("index length");
  h.tensor_count = r.get<std::uint64_t>("tensor count");
  h.payload_offset = r.get<std::uint64_t>("payload offset");
  h.payload_length = r.get<std::uint64_t>("payload length");

  const std::uint64_t body_end = size - 4;
  auto within = [&](std::uint64_t off, std::uint64_t len, const char* what) {
    if (off > body_end || add_overflows(off, len) || off + len > body_end) {
      throw FormatError(FormatErrorKind::OutOfBounds,
                        std::string(what) + " [" + std::to_string(off) + ", +" +
                            std::to_string(len) + ") exceeds the " + std::to_string(size) +
                            "-byte file");
    }
  };
  within(h.graph_offset, h.graph_length, "graph section");
  within(h.index_offset, h.index_length, "tensor index");
  within(h.payload_offset, h.payload_length, "payload");

  if (header_length != kModelHeaderLength || h.graph_offset != kModelHeaderLength ||
      h.index_offset != h.graph_offset + h.graph_length ||
      h.payload_offset != align_up(h.index_offset + h.index_length, kPayloadAlignment) ||
      h.payload_offset + h.payload_length != body_end) {
    throw FormatError(FormatErrorKind::Malformed, "sections are not laid out contiguously");
  }

  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body_end, 4);
  const auto actual = crc32(bytes.first(static_cast<std::size_t>(body_end)));
  if (stored != actual) {
    std::ostringstream os;
    os << std::hex << "stored 0x" << stored << ", computed 0x" << actual;
    throw FormatError(FormatErrorKind::ChecksumMismatch, os.str());
  }
  return h;
}

inline std::vector<IndexEntry> read_index(std::span<const std::byte> bytes, const Header& h) {
  ByteReader r(bytes, h.index_offset, h.index_offset + h.index_length);
  std::vector<IndexEntry> entries;
  const std::uint64_t payload_end = h.payload_offset + h.payload_length;
  std::uint64_t expected_offset = h.payload_offset;
  for (std::uint64_t i = 0; i < h.tensor_count; ++i) {
    IndexEntry e;
    e.name = r.get_str("tensor name");
    const auto dtype = r.get<std::uint8_t>("dtype");
    if (dtype != 0) {
      throw FormatError(FormatErrorKind::Malformed,
                        "tensor '" + e.name + "' has unsupported dtype " + std::to_string(dtype));
    }
    const auto rank = r.get<std::uint8_t>("rank");
    if (rank == 0) throw FormatError(FormatErrorKind::Malformed, "tensor '" + e.name + "' rank 0");
    std::uint64_t elements = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      const auto dim = r.get<std::uint64_t>("dims");
      if (dim == 0 || elements > (std::numeric_limits<std::uint64_t>::max() / 4) / dim) {
        throw FormatError(FormatErrorKind::Malformed, "tensor '" + e.name + "' has bad dims");
      }
      elements *= dim;
      e.shape.push_back(static_cast<std::size_t>(dim));
    }
    e.offset = r.get<std::uint64_t>("payload offset");
    e.length = r.get<std::uint64_t>("payload length");
    if (e.length != 4 * elements) {
      throw FormatError(FormatErrorKind::Malformed,
                        "tensor '" + e.name + "' payload length disagrees with its dims");
    }
    if (e.offset < h.payload_offset || e.offset > payload_end ||
        e.length > payload_end - e.offset) {
      throw FormatError(FormatErrorKind::OutOfBounds,
                        "tensor '" + e.name + "' payload lies outside the payload section");
    }
    if (e.offset % kPayloadAlignment != 0) {
      throw FormatError(FormatErrorKind::Misaligned,
                        "tensor '" + e.name + "' does not start on a 64-byte boundary");
    }
    if (!entries.empty() && entries.back().name == e.name) {
      throw FormatError(FormatErrorKind::DuplicateName, "tensor '" + e.name + "' repeats");
    }
    if (!entries.empty() && !(entries.back().name < e.name)) {
      for (const auto& prev : entries) {
        if (prev.name == e.name) {
          throw FormatError(FormatErrorKind::DuplicateName, "tensor '" + e.name + "' repeats");
        }
      }
      throw FormatError(FormatErrorKind::Malformed, "tensor index is not sorted by name");
    }
    if (e.offset != expected_offset) {
      throw FormatError(FormatErrorKind::Malformed,
                        "tensor '" + e.name + "' leaves an undeclared gap in the payload");
    }
    expected_offset = align_up(e.offset + e.length, kPayloadAlignment);
    entries.push_back(std::move(e));
  }
  if (!r.done()) throw FormatError(FormatErrorKind::Malformed, "trailing bytes in tensor index");
  const std::uint64_t used = entries.empty() ? h.payload_offset
                                             : entries.back().offset + entries.back().length;
  if (used != payload_end) {
    throw FormatError(FormatErrorKind::Malformed, "payload length disagrees with the index");
  }
  return entries;
}

// Graph must be valid and the index must hold exactly the tensors the graph needs.
inline void check_graph_matches(const ModelGraph& g, const std::vector<IndexEntry>& entries) {
  std::vector<TensorSpec> expected;
  try {
    require_valid(g);
    expected = expected_tensors(g);
  } catch (const GraphError& e) {
    throw FormatError(FormatErrorKind::Malformed, std::string("embedded graph: ") + e.what());
  }
  std::sort(expected.begin(), expected.end(),
            [](const TensorSpec& a, const TensorSpec& b) { return a.name < b.name; });
  if (expected.size() != entries.size()) {
    throw FormatError(FormatErrorKind::Malformed,
                      "graph needs " + std::to_string(expected.size()) + " tensors, index has " +
                          std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].name != entries[i].name || expected[i].shape != entries[i].shape) {
      throw FormatError(FormatErrorKind::Malformed,
                        "index entry '" + entries[i].name + "' does not match graph tensor '" +
                            expected[i].name + "' " + shape_to_string(expected[i].shape));
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Serialization

/// Encodes graph and weights. The store must hold exactly the tensors the graph needs,
/// with matching shapes; nothing is produced otherwise.
inline std::vector<std::byte> serialize_to_bytes(const ModelGraph& g, const WeightStore& weights) {
  try {
    require_valid(g);
  } catch (const GraphError& e) {
    throw SerializeError(e.what());
  }
  const auto expected = expected_tensors(g);
  for (const auto& spec : expected) {
    const auto it = weights.find(spec.name);
    if (it == weights.end()) throw SerializeError("missing weight '" + spec.name + "'");
    if (it->second.shape() != spec.shape) {
      throw SerializeError("weight '" + spec.name + "' has shape " +
                           shape_to_string(it->second.shape()) + ", expected " +
                           shape_to_string(spec.shape));
    }
  }
  if (weights.size() != expected.size()) {
    for (const auto& [name, t] : weights) {
      const bool known = std::any_of(expected.begin(), expected.end(),
                                     [&](const TensorSpec& s) { return s.name == name; });
      if (!known) throw SerializeError("weight '" + name + "' is not used by the graph");
    }
  }

  detail::ByteWriter w;
  for (char c : kModelMagic) w.put(c);
  w.put(kModelFormatVersion);
  w.put(std::uint16_t{0});
  const std::size_t fields_at = w.size();
  for (int i = 0; i < 8; ++i) w.put(std::uint64_t{0});

  const std::uint64_t graph_offset = w.size();
  detail::write_graph(w, g);
  const std::uint64_t index_offset = w.size();

  // Index offsets depend on the index size, so measure it first.
  std::uint64_t index_length = 0;
  for (const auto& [name, t] : weights) index_length += 4 + name.size() + 2 + 8 * t.rank() + 16;
  const std::uint64_t payload_offset = align_up(index_offset + index_length, kPayloadAlignment);

  std::uint64_t cursor = payload_offset;
  std::uint64_t payload_end = payload_offset;
  for (const auto& [name, t] : weights) {  // std::map iterates in byte order
    w.put_str(name);
    w.put(std::uint8_t{0});
    w.put(static_cast<std::uint8_t>(t.rank()));
    for (auto d : t.shape()) w.put(static_cast<std::uint64_t>(d));
    const std::uint64_t len = 4 * t.size();
    w.put(cursor);
    w.put(len);
    payload_end = cursor + len;
    cursor = align_up(payload_end, kPayloadAlignment);
  }
  w.pad_to(kPayloadAlignment);
  std::size_t index = 0;
  for (const auto& [name, t] : weights) {
    if (index++) w.pad_to(kPayloadAlignment);
    for (float v : t.data()) w.put(v);
  }

  w.patch(fields_at + 0, kModelHeaderLength);
  w.patch(fields_at + 8, graph_offset);
  w.patch(fields_at + 16, index_offset - graph_offset);
  w.patch(fields_at + 24, index_offset);
  w.patch(fields_at + 32, index_length);
  w.patch(fields_at + 40, static_cast<std::uint64_t>(weights.size()));
  w.patch(fields_at + 48, payload_offset);
  w.patch(fields_at + 56, payload_end - payload_offset);
  w.put(crc32(w.bytes()));
  return std::move(w.bytes());
}

/// Writes the encoded model to sink and returns the byte count.
inline std::uint64_t serialize(const ModelGraph& g, const WeightStore& weights, std::ostream& sink) {
  const auto bytes = serialize_to_bytes(g, weights);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw IoError("failed writing model bytes");
  return bytes.size();
}

struct LoadedModel {
  ModelGraph graph;
  WeightStore weights;
};

/// Validates the container (checksum before anything else is exposed) and copies out
/// the graph and every tensor.
inline LoadedModel deserialize(std::span<const std::byte> bytes) {
  const auto h = detail::check_container(bytes);
  detail::ByteReader gr(bytes, h.graph_offset, h.graph_offset + h.graph_length);
  LoadedModel out{detail::read_graph(gr), {}};
  const auto entries = detail::read_index(bytes, h);
  detail::check_graph_matches(out.graph, entries);
  for (const auto& e : entries) {
    std::vector<float> values(e.length / 4);
    std::memcpy(values.data(), bytes.data() + e.offset, e.length);
    payload_copy_count().fetch_add(1, std::memory_order_relaxed);
    out.weights.emplace(e.name, Tensor::from_data(e.shape, std::move(values)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resident bytes and in-place access

/// Heap buffer whose first byte sits on a 64-byte boundary.
class AlignedBytes {
 public:
  AlignedBytes() = default;
  explicit AlignedBytes(std::size_t size)
      : data_(size ? static_cast<std::byte*>(::operator new[](size, std::align_val_t{64}))
                   : nullptr),
        size_(size) {}
  explicit AlignedBytes(std::span<const std::byte> src) : AlignedBytes(src.size()) {
    if (size_) std::memcpy(data_.get(), src.data(), size_);
  }

  std::span<const std::byte> span() const noexcept { return {data_.get(), size_}; }
  std::span<std::byte> mutable_span() noexcept { return {data_.get(), size_}; }
  std::size_t size() const noexcept { return size_; }

 private:
  struct Free {
    void operator()(std::byte* p) const noexcept { ::operator delete[](p, std::align_val_t{64}); }
  };
  std::unique_ptr<std::byte[], Free> data_;
  std::size_t size_ = 0;
};

inline AlignedBytes read_file_aligned(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  AlignedBytes buf(size);
  if (size && !in.read(reinterpret_cast<char*>(buf.mutable_span().data()),
                       static_cast<std::streamsize>(size))) {
    throw IoError("cannot read '" + path.string() + "'");
  }
  return buf;
}

struct TensorView {
  Shape shape;
  std::span<const float> data;

  Tensor to_tensor() const {
    payload_copy_count().fetch_add(1, std::memory_order_relaxed);
    return Tensor::from_data(shape, {data.begin(), data.end()});
  }
};

/// Verified, read-only handle over resident model bytes. Tensor lookups return views
/// straight into the payload; nothing is decoded or copied after open().
/// The bytes must outlive the handle unless it owns them (open_file).
class InplaceModel {
 public:
  static InplaceModel open(std::span<const std::byte> bytes) {
    if (reinterpret_cast<std::uintptr_t>(bytes.data()) % kPayloadAlignment != 0) {
      throw FormatError(FormatErrorKind::Misaligned,
                        "resident bytes must start on a 64-byte boundary");
    }
    const auto h = detail::check_container(bytes);
    detail::ByteReader gr(bytes, h.graph_offset, h.graph_offset + h.graph_length);
    InplaceModel m;
    m.bytes_ = bytes;
    m.graph_ = detail::read_graph(gr);
    m.index_ = detail::read_index(bytes, h);
    detail::check_graph_matches(m.graph_, m.index_);
    return m;
  }

  static InplaceModel open_file(const std::filesystem::path& path) {
    auto owned = std::make_shared<const AlignedBytes>(read_file_aligned(path));
    auto m = open(owned->span());
    m.owned_ = std::move(owned);
    return m;
  }

  const ModelGraph& graph() const noexcept { return graph_; }
  std::span<const std::byte> bytes() const noexcept { return bytes_; }
  std::size_t tensor_count() const noexcept { return index_.size(); }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& e : index_) n.push_back(e.name);
    return n;
  }

  TensorView view(std::string_view name) const {
    const auto it = std::lower_bound(index_.begin(), index_.end(), name,
                                     [](const detail::IndexEntry& e, std::string_view n) {
                                       return std::string_view(e.name) < n;
                                     });
    if (it == index_.end() || it->name != name) {
      throw LookupError("model has no tensor named '" + std::string(name) + "'");
    }
    const auto* first = reinterpret_cast<const float*>(bytes_.data() + it->offset);
    return {it->shape, {first, static_cast<std::size_t>(it->length / 4)}};
  }

  /// Copies every tensor into an owning store (counted as payload copies).
  WeightStore materialize() const {
    WeightStore store;
    for (const auto& e : index_) store.emplace(e.name, view(e.name).to_tensor());
    return store;
  }

 private:
  InplaceModel() = default;

  std::span<const std::byte> bytes_;
  ModelGraph graph_;
  std::vector<detail::IndexEntry> index_;
  std::shared_ptr<const AlignedBytes> owned_;
};

// ---------------------------------------------------------------------------
// Text baseline: graph text followed by "tensor <name> <rank> <dims...>" and the values.
// Parsed number by number, it is the slow reference the binary loader is compared with.

inline std::string write_text_model(const ModelGraph& g, const WeightStore& weights) {
  std::ostringstream os;
  os << write_graph_text(g) << "end\n";
  os << std::setprecision(9);
  for (const auto& [name, t] : weights) {
    os << "tensor " << name << ' ' << t.rank();
    for (auto d : t.shape()) os << ' ' << d;
    os << '\n';
    for (float v : t.data()) os << v << '\n';
  }
  return os.str();
}

inline LoadedModel load_text_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string graph_text;
  std::string line;
  while (std::getline(in, line) && line != "end") graph_text += line + '\n';
  LoadedModel out{parse_graph_text(graph_text), {}};
  std::string word;
  while (in >> word) {
    if (word != "tensor") throw IoError("text model: expected 'tensor', got '" + word + "'");
    std::string name;
    std::size_t rank = 0;
    in >> name >> rank;
    Shape shape(rank);
    for (auto& d : shape) in >> d;
    if (!in || rank == 0) throw IoError("text model: bad header for '" + name + "'");
    std::vector<float> values(shape_product(shape));
    for (auto& v : values) {
      std::string tok;
      in >> tok;
      v = std::strtof(tok.c_str(), nullptr);
    }
    if (!in) throw IoError("text model: truncated values for '" + name + "'");
    out.weights.emplace(name, Tensor::from_data(std::move(shape), std::move(values)));
  }
  return out;
}

}  // namespace lwcnn
