#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ftdo {

/// Number of bits needed to store values in [0, q): ceil(log2 q), at least 1.
unsigned bits_for(std::uint64_t q);

/// Packs unsigned values of arbitrary width (<= 64) little-endian into bytes.
class BitWriter {
public:
  void write(std::uint64_t value, unsigned width);
  void write_u64(std::uint64_t value) { write(value, 64); }
  void write_i64(std::int64_t value) { write(static_cast<std::uint64_t>(value), 64); }
  void write_bytes(std::span<const std::uint8_t> bytes);

  std::uint64_t bit_length() const { return bits_; }
  /// Pads the tail to a byte boundary.
  const std::vector<std::uint8_t> &bytes() const { return buffer_; }

private:
  std::vector<std::uint8_t> buffer_;
  std::uint64_t bits_ = 0;
};

class BitReader {
public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  /// Throws CorruptData when reading past the end.
  std::uint64_t read(unsigned width);
  std::uint64_t read_u64() { return read(64); }
  std::int64_t read_i64() { return static_cast<std::int64_t>(read(64)); }
  std::vector<std::uint8_t> read_bytes(std::size_t count);

  std::uint64_t position() const { return pos_; }
  bool at_end() const { return (pos_ + 7) / 8 >= bytes_.size(); }

private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

enum class ArtifactKind : std::uint8_t {
  SyndromeSketch = 1,
  L0Sketch = 2,
  ExpanderOracle = 3,
  WeightedOracle = 4,
  StarOracle = 5,
  SpannerSketch = 6,
  StreamState = 7,
  Decomposition = 8,
};

inline constexpr std::uint32_t kFormatVersion = 1;
/// Magic (32) + version (16) + kind (8).
inline constexpr unsigned kHeaderBits = 56;

void write_header(BitWriter &w, ArtifactKind kind);
/// Throws CorruptData on bad magic, version or kind.
void read_header(BitReader &r, ArtifactKind expected);

std::vector<std::uint8_t> read_file(const std::string &path);
void write_file(const std::string &path, std::span<const std::uint8_t> bytes);

} // namespace ftdo
