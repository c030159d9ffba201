#pragma once

// Binary PNM (P5 grayscale / P6 RGB, maxval 255) and the raw ".lwt" tensor file:
//   "LWT1", u32 rank, u64 dims[rank], f32 values (all little-endian).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lwcnn/tensor.hpp"

namespace lwcnn {

enum class ImageErrorKind {
  UnsupportedFormat,  // not P5/P6
  UnsupportedDepth,   // maxval other than 255
  MalformedHeader,
  Truncated,
};

class ImageError : public Error {
 public:
  ImageError(ImageErrorKind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  ImageErrorKind kind() const noexcept { return kind_; }

 private:
  ImageErrorKind kind_;
};

namespace detail {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }

  // Skips whitespace and '#' comments, then reads a decimal field.
  std::uint64_t number(const char* what) {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && is_digit(at(pos_))) {
      v = v * 10 + static_cast<std::uint64_t>(at(pos_) - '0');
      if (v > (1ull << 32)) throw ImageError(ImageErrorKind::MalformedHeader,
                                             std::string("PNM ") + what + " is too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      if (pos_ >= bytes_.size()) {
        throw ImageError(ImageErrorKind::Truncated, std::string("PNM header ends before ") + what);
      }
      throw ImageError(ImageErrorKind::MalformedHeader, std::string("PNM ") + what +
                                                            " is not a decimal number");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size()) throw ImageError(ImageErrorKind::Truncated, "PNM header truncated");
    if (!is_space(at(pos_))) {
      throw ImageError(ImageErrorKind::MalformedHeader, "PNM maxval must be followed by whitespace");
    }
    ++pos_;
  }

 private:
  char at(std::size_t i) const { return static_cast<char>(bytes_[i]); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(at(pos_))) {
        ++pos_;
      } else if (at(pos_) == '#') {
        while (pos_ < bytes_.size() && at(pos_) != '\n' && at(pos_) != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 2;
};

inline std::vector<std::byte> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

inline void write_all(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace detail

/// Decodes a binary P5/P6 image into an HxWxC tensor with values 0..255.
inline Tensor read_pnm(std::span<const std::byte> bytes) {
  if (bytes.size() < 2) throw ImageError(ImageErrorKind::Truncated, "PNM data shorter than magic");
  if (static_cast<char>(bytes[0]) != 'P') {
    throw ImageError(ImageErrorKind::UnsupportedFormat, "not a PNM file");
  }
  const char variant = static_cast<char>(bytes[1]);
  if (variant != '5' && variant != '6') {
    throw ImageError(ImageErrorKind::UnsupportedFormat,
                     std::string("PNM variant P") + variant + " unsupported (P5 and P6 only)");
  }
  const std::size_t channels = variant == '5' ? 1 : 3;
  detail::PnmHeaderReader hdr(bytes);
  const auto width = hdr.number("width");
  const auto height = hdr.number("height");
  const auto maxval = hdr.number("maxval");
  if (width == 0 || height == 0) {
    throw ImageError(ImageErrorKind::MalformedHeader, "PNM dimensions must be positive");
  }
  if (maxval != 255) {
    throw ImageError(ImageErrorKind::UnsupportedDepth,
                     "PNM maxval " + std::to_string(maxval) + " unsupported (255 only)");
  }
  if (width > (1ull << 20) || height > (1ull << 20) || width * height > (1ull << 28)) {
    throw ImageError(ImageErrorKind::MalformedHeader, "PNM dimensions are too large");
  }
  hdr.single_whitespace();
  const std::uint64_t need = width * height * channels;
  if (bytes.size() - hdr.pos() < need) {
    throw ImageError(ImageErrorKind::Truncated, "PNM raster has " +
                                                    std::to_string(bytes.size() - hdr.pos()) +
                                                    " bytes, expected " + std::to_string(need));
  }
  auto t = Tensor::zeros({static_cast<std::size_t>(height), static_cast<std::size_t>(width),
                          channels});
  auto out = t.mutable_data();
  for (std::size_t i = 0; i < need; ++i) {
    out[i] = static_cast<float>(static_cast<std::uint8_t>(bytes[hdr.pos() + i]));
  }
  return t;
}

/// Encodes a 1- or 3-channel tensor as P5/P6, clamping to [0, 255] and rounding.
inline std::vector<std::byte> encode_pnm(const Tensor& t) {
  require_rank3(t, "write_pnm");
  if (t.channels() != 1 && t.channels() != 3) {
    throw ContractError("write_pnm supports 1 or 3 channels, got " +
                        std::to_string(t.channels()));
  }
  const std::string header = std::string(t.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(t.width()) + " " + std::to_string(t.height()) +
                             "\n255\n";
  std::vector<std::byte> out;
  out.reserve(header.size() + t.size());
  for (char c : header) out.push_back(static_cast<std::byte>(c));
  for (float v : t.data()) {
    const float clamped = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 255.0f);
    out.push_back(static_cast<std::byte>(static_cast<std::uint8_t>(std::lround(clamped))));
  }
  return out;
}

inline void write_pnm(const Tensor& t, std::ostream& sink) {
  const auto bytes = encode_pnm(t);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw IoError("failed writing PNM");
}

inline constexpr char kRawMagic[4] = {'L', 'W', 'T', '1'};

inline std::vector<std::byte> encode_raw(const Tensor& t) {
  std::vector<std::byte> out(4 + 4 + 8 * t.rank() + 4 * t.size());
  std::byte* p = out.data();
  std::memcpy(p, kRawMagic, 4);
  p += 4;
  const auto rank = static_cast<std::uint32_t>(t.rank());
  std::memcpy(p, &rank, 4);
  p += 4;
  for (auto d : t.shape()) {
    const auto dim = static_cast<std::uint64_t>(d);
    std::memcpy(p, &dim, 8);
    p += 8;
  }
  std::memcpy(p, t.data().data(), 4 * t.size());
  return out;
}

inline void write_raw(const Tensor& t, std::ostream& sink) {
  const auto bytes = encode_raw(t);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw IoError("failed writing raw tensor");
}

inline Tensor read_raw(std::span<const std::byte> bytes) {
  auto truncated = [](const char* what) {
    return ImageError(ImageErrorKind::Truncated, std::string("raw tensor truncated in ") + what);
  };
  if (bytes.size() < 8) throw truncated("header");
  if (std::memcmp(bytes.data(), kRawMagic, 4) != 0) {
    throw ImageError(ImageErrorKind::UnsupportedFormat, "raw tensor magic must be \"LWT1\"");
  }
  std::uint32_t rank;
  std::memcpy(&rank, bytes.data() + 4, 4);
  if (rank == 0 || rank > 8) {
    throw ImageError(ImageErrorKind::MalformedHeader, "raw tensor rank must be 1..8");
  }
  if (bytes.size() - 8 < 8ull * rank) throw truncated("dims");
  Shape shape(rank);
  std::uint64_t elements = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    std::uint64_t d;
    std::memcpy(&d, bytes.data() + 8 + 8 * i, 8);
    if (d == 0 || elements > (1ull << 40) / d) {
      throw ImageError(ImageErrorKind::MalformedHeader, "raw tensor has an invalid dimension");
    }
    elements *= d;
    shape[i] = static_cast<std::size_t>(d);
  }
  const std::size_t offset = 8 + 8 * rank;
  if (bytes.size() - offset != 4 * elements) {
    if (bytes.size() - offset < 4 * elements) throw truncated("payload");
    throw ImageError(ImageErrorKind::MalformedHeader, "raw tensor has trailing bytes");
  }
  std::vector<float> values(elements);
  std::memcpy(values.data(), bytes.data() + offset, 4 * elements);
  return Tensor::from_data(std::move(shape), std::move(values));
}

inline Tensor read_pnm_file(const std::filesystem::path& path) {
  return read_pnm(detail::read_all(path));
}
inline Tensor read_raw_file(const std::filesystem::path& path) {
  return read_raw(detail::read_all(path));
}
inline void write_pnm_file(const Tensor& t, const std::filesystem::path& path) {
  detail::write_all(path, encode_pnm(t));
}
inline void write_raw_file(const Tensor& t, const std::filesystem::path& path) {
  detail::write_all(path, encode_raw(t));
}

}  // namespace lwcnn
