#include "ftdo/bits.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "ftdo/error.hpp"

namespace ftdo {

namespace {
constexpr std::uint32_t kMagic = 0x4F445446; // "FTDO" little-endian
}

unsigned bits_for(std::uint64_t q) {
  if (q <= 2)
    return 1;
  return static_cast<unsigned>(std::bit_width(q - 1));
}

void BitWriter::write(std::uint64_t value, unsigned width) {
  for (unsigned i = 0; i < width; ++i) {
    if (bits_ % 8 == 0)
      buffer_.push_back(0);
    if ((value >> i) & 1U)
      buffer_.back() |= static_cast<std::uint8_t>(1U << (bits_ % 8));
    ++bits_;
  }
}

void BitWriter::write_bytes(std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes)
    write(b, 8);
}

std::uint64_t BitReader::read(unsigned width) {
  if (pos_ + width > bytes_.size() * 8)
    throw Error(ErrorCode::CorruptData, "read past end of buffer");
  std::uint64_t value = 0;
  for (unsigned i = 0; i < width; ++i) {
    const std::uint64_t bit = (bytes_[pos_ / 8] >> (pos_ % 8)) & 1U;
    value |= bit << i;
    ++pos_;
  }
  return value;
}

std::vector<std::uint8_t> BitReader::read_bytes(std::size_t count) {
  std::vector<std::uint8_t> out(count);
  for (auto &b : out)
    b = static_cast<std::uint8_t>(read(8));
  return out;
}

void write_header(BitWriter &w, ArtifactKind kind) {
  w.write(kMagic, 32);
  w.write(kFormatVersion, 16);
  w.write(static_cast<std::uint8_t>(kind), 8);
}

void read_header(BitReader &r, ArtifactKind expected) {
  if (r.read(32) != kMagic)
    throw Error(ErrorCode::CorruptData, "bad magic");
  if (r.read(16) != kFormatVersion)
    throw Error(ErrorCode::CorruptData, "unsupported format version");
  if (r.read(8) != static_cast<std::uint8_t>(expected))
    throw Error(ErrorCode::CorruptData, "artifact kind mismatch");
}

std::vector<std::uint8_t> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::CorruptData, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string &path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::CorruptData, "cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace ftdo
