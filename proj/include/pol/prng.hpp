#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pol {

/// 32-byte SHA-256 output.
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
Digest digest_from_hex(std::string_view hex);

/// Appends the little-endian 8-byte encoding of `value`.
void append_le64(std::vector<std::uint8_t>& out, std::uint64_t value);
std::uint64_t read_le64(std::span<const std::uint8_t> bytes);

/// Opaque 32-byte seed. The root task seed, every stage seed and every
/// party secret is a Seed.
class Seed {
 public:
  Seed() = default;
  explicit Seed(const Digest& bytes) : bytes_(bytes) {}

  /// SHA-256 of LE64(value); convenient for tests and CLI integers.
  static Seed from_u64(std::uint64_t value);
  /// SHA-256 of the UTF-8 bytes of `label`.
  static Seed from_label(std::string_view label);
  /// Parses 64 lowercase or uppercase hex characters.
  static Seed from_hex(std::string_view hex);
  /// 64 hex characters: from_hex. Decimal digits: from_u64. Otherwise from_label.
  static Seed parse(std::string_view text);

  const Digest& bytes() const { return bytes_; }
  std::string hex() const;

  /// hash(seed || LE64(index))
  Digest hash_with_counter(std::uint64_t index) const;
  Seed derive(std::uint64_t index) const { return Seed(hash_with_counter(index)); }

  friend bool operator==(const Seed&, const Seed&) = default;

 private:
  Digest bytes_{};
};

/// Which designated seed a stage is trained with: r(3t), r(3t+1), r(3t+2).
enum class SeedVariant : std::uint8_t { Normal = 0, F1 = 1, F2 = 2 };

/// Stage t (1-based) uses index 3t + variant.
Seed derive_stage_seed(const Seed& root, std::uint64_t stage, SeedVariant variant);

/// Counter-mode stream: output i is SHA-256(seed || LE64(i)).
/// Not thread-safe; give each thread its own stream.
class RandomStream {
 public:
  explicit RandomStream(Seed seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  /// First 8 digest bytes as an unsigned LE integer.
  std::uint64_t next_u64();
  /// Uniform in [0,1) with 53 bits of resolution.
  double uniform01();
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  bool coin() { return uniform01() >= 0.5; }

  const Seed& seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  bool exhausted() const { return exhausted_; }

 private:
  Seed seed_;
  std::uint64_t counter_ = 0;
  bool exhausted_ = false;
};

/// Converts a raw 64-bit draw into [0,1) by keeping its top 53 bits.
double u64_to_unit(std::uint64_t raw);

/// Sequential uniform sampling without replacement from {1..population}.
/// Lazy partial Fisher-Yates over a sparse virtual array, O(draws) memory.
class DistinctSampler {
 public:
  DistinctSampler(RandomStream& stream, std::uint64_t population)
      : stream_(&stream), population_(population) {}

  std::uint64_t next();
  std::uint64_t drawn() const { return drawn_; }
  std::uint64_t remaining() const { return population_ - drawn_; }

 private:
  std::uint64_t slot(std::uint64_t index) const;

  RandomStream* stream_;
  std::uint64_t population_;
  std::uint64_t drawn_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> swapped_;
};

/// Fisher-Yates permutation of {1..n}, driven by uniform01 on the seed.
std::vector<std::size_t> shuffle(const Seed& seed, std::size_t n);

/// Sorted set of `count` distinct values in {1..population}.
std::vector<std::size_t> sample_without_replacement(const Seed& seed,
                                                    std::size_t population,
                                                    std::size_t count);

using Batch = std::vector<std::size_t>;

/// Splits {0..n-1} into n/batch_size consecutive blocks of a shuffled order.
/// The epoch's seed is hash(stage_seed || LE64(epoch_in_stage)).
std::vector<Batch> draw_batches(const Seed& stage_seed, std::uint64_t epoch_in_stage,
                                std::size_t n, std::size_t batch_size);

}  // namespace pol
