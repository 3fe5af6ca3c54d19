// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/binio.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace textforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateRegistration: return "DuplicateRegistration";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::OverlappingEntries: return "OverlappingEntries";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MultiTaskArity: return "MultiTaskArity";
    case ErrorCode::MalformedData: return "MalformedData";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::EmptyLoss: return "EmptyLoss";
    case ErrorCode::NotScalar: return "NotScalar";
    case ErrorCode::NoStyleSelected: return "NoStyleSelected";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IncompatibleShare: return "IncompatibleShare";
    case ErrorCode::NoGradient: return "NoGradient";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyEval: return "EmptyEval";
    case ErrorCode::UnsupportedModule: return "UnsupportedModule";
    case ErrorCode::VocabAlreadyBaked: return "VocabAlreadyBaked";
    case ErrorCode::CorruptGraph: return "CorruptGraph";
    case ErrorCode::InputTypeMismatch: return "InputTypeMismatch";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace textforge

namespace textforge::binio {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large buffers.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::bytes(std::span<const std::uint8_t> b) {
  u64(b.size());
  buf_.insert(buf_.end(), b.begin(), b.end());
}

void ByteWriter::f32s(std::span<const float> v) {
  u64(v.size());
  const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
  buf_.insert(buf_.end(), p, p + v.size_bytes());
}

void ByteWriter::i32s(std::span<const std::int32_t> v) {
  u64(v.size());
  for (auto x : v) i32(x);
}

void ByteWriter::i64s(std::span<const std::int64_t> v) {
  u64(v.size());
  for (auto x : v) i64(x);
}

void ByteWriter::strs(std::span<const std::string> v) {
  u64(v.size());
  for (const auto& s : v) str(s);
}

ByteReader::ByteReader(std::span<const std::uint8_t> data, ErrorCode truncation_code)
    : data_(data), truncation_code_(truncation_code) {}

void ByteReader::need(std::size_t n) {
  if (n > remaining()) throw Error(truncation_code_, "unexpected end of data");
}

std::size_t ByteReader::length_prefix(std::size_t elem_size) {
  const std::uint64_t n = u64();
  if (n > remaining() / std::max<std::size_t>(elem_size, 1)) {
    throw Error(truncation_code_, "length prefix exceeds remaining data");
  }
  return static_cast<std::size_t>(n);
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  const std::size_t n = length_prefix(1);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> ByteReader::bytes() {
  const std::size_t n = length_prefix(1);
  std::vector<std::uint8_t> b(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return b;
}

std::vector<float> ByteReader::f32s() {
  const std::size_t n = length_prefix(4);
  std::vector<float> v(n);
  std::memcpy(v.data(), data_.data() + pos_, n * 4);
  pos_ += n * 4;
  return v;
}

std::vector<std::int32_t> ByteReader::i32s() {
  const std::size_t n = length_prefix(4);
  std::vector<std::int32_t> v(n);
  for (auto& x : v) x = i32();
  return v;
}

std::vector<std::int64_t> ByteReader::i64s() {
  const std::size_t n = length_prefix(8);
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = i64();
  return v;
}

std::vector<std::string> ByteReader::strs() {
  const std::size_t n = length_prefix(8);
  std::vector<std::string> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(str());
  return v;
}

const std::vector<std::uint8_t>* Container::find(std::string_view name) const {
  for (const auto& [n, b] : sections) {
    if (n == name) return &b;
  }
  return nullptr;
}

const std::vector<std::uint8_t>& Container::at(std::string_view name,
                                               ErrorCode missing_code) const {
  if (const auto* b = find(name)) return *b;
  throw Error(missing_code, "missing section '" + std::string(name) + "'");
}

std::vector<std::uint8_t> write_container(std::string_view magic, const Container& c,
                                          CrcPlacement placement) {
  ByteWriter body;
  body.u32(static_cast<std::uint32_t>(c.sections.size()));
  for (const auto& [name, payload] : c.sections) {
    body.str(name);
    body.bytes(payload);
  }

  ByteWriter out;
  for (char ch : magic) out.u8(static_cast<std::uint8_t>(ch));
  out.u32(c.version);
  if (placement == CrcPlacement::Header) {
    out.u32(crc32(body.buffer()));
    auto bytes = out.take();
    bytes.insert(bytes.end(), body.buffer().begin(), body.buffer().end());
    return bytes;
  }
  auto bytes = out.take();
  bytes.insert(bytes.end(), body.buffer().begin(), body.buffer().end());
  ByteWriter tail;
  tail.u32(crc32(bytes));
  bytes.insert(bytes.end(), tail.buffer().begin(), tail.buffer().end());
  return bytes;
}

Container read_container(std::span<const std::uint8_t> bytes, std::string_view magic,
                         CrcPlacement placement, std::uint32_t expected_version,
                         ErrorCode corrupt_code, ErrorCode version_code) {
  const std::size_t header = magic.size() + 4;
  if (bytes.size() < header + 8) throw Error(corrupt_code, "file too short");
  if (std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
    throw Error(corrupt_code, "bad magic");
  }

  std::span<const std::uint8_t> body;
  std::uint32_t stored_crc = 0;
  std::uint32_t actual_crc = 0;
  if (placement == CrcPlacement::Header) {
    ByteReader crc_reader(bytes.subspan(header, 4), corrupt_code);
    stored_crc = crc_reader.u32();
    body = bytes.subspan(header + 4);
    actual_crc = crc32(body);
  } else {
    ByteReader crc_reader(bytes.subspan(bytes.size() - 4), corrupt_code);
    stored_crc = crc_reader.u32();
    actual_crc = crc32(bytes.first(bytes.size() - 4));
    body = bytes.subspan(header, bytes.size() - 4 - header);
  }
  if (stored_crc != actual_crc) throw Error(corrupt_code, "checksum mismatch");

  Container c;
  ByteReader version_reader(bytes.subspan(magic.size(), 4), corrupt_code);
  c.version = version_reader.u32();
  if (c.version != expected_version) {
    throw Error(version_code, "file version " + std::to_string(c.version) + ", expected " +
                                  std::to_string(expected_version));
  }

  ByteReader r(body, corrupt_code);
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto name = r.str();
    auto payload = r.bytes();
    c.sections.emplace_back(std::move(name), std::move(payload));
  }
  if (!r.done()) throw Error(corrupt_code, "trailing bytes after sections");
  return c;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace textforge::binio
