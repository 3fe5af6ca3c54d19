// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textforge/error.hpp"

namespace textforge::binio {

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Little-endian append-only byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f32(float v);
  void f64(double v);
  void str(std::string_view s);
  void bytes(std::span<const std::uint8_t> b);
  void f32s(std::span<const float> v);
  void i32s(std::span<const std::int32_t> v);
  void i64s(std::span<const std::int64_t> v);
  void strs(std::span<const std::string> v);

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked reader. Running off the end throws Error(truncation_code).
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, ErrorCode truncation_code);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  float f32();
  double f64();
  std::string str();
  std::vector<std::uint8_t> bytes();
  std::vector<float> f32s();
  std::vector<std::int32_t> i32s();
  std::vector<std::int64_t> i64s();
  std::vector<std::string> strs();

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n);
  /// Guards against absurd length prefixes in corrupt input.
  std::size_t length_prefix(std::size_t elem_size);

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  ErrorCode truncation_code_;
};

/// Named-section container shared by checkpoint and graph files.
///   body   = u32 section_count | (str name | u64 len | bytes)*
///   Header = magic[4] | u32 version | u32 crc32(body) | body
///   Trailer = magic[4] | u32 version | body | u32 crc32(all preceding bytes)
enum class CrcPlacement { Header, Trailer };

struct Container {
  std::uint32_t version = 0;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> sections;

  const std::vector<std::uint8_t>* find(std::string_view name) const;
  const std::vector<std::uint8_t>& at(std::string_view name, ErrorCode missing_code) const;
};

std::vector<std::uint8_t> write_container(std::string_view magic, const Container& c,
                                          CrcPlacement placement);

/// Validates magic, checksum and version.
Container read_container(std::span<const std::uint8_t> bytes, std::string_view magic,
                         CrcPlacement placement, std::uint32_t expected_version,
                         ErrorCode corrupt_code, ErrorCode version_code);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace textforge::binio
