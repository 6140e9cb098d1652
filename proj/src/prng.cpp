#include "pol/prng.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cctype>
#include <numeric>

namespace pol {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out{};
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw std::invalid_argument("digest hex must be 64 characters, got " +
                                std::to_string(hex.size()));
  }
  Digest out{};
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit in digest");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void append_le64(std::vector<std::uint8_t>& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t read_le64(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw std::invalid_argument("read_le64: need 8 bytes");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

Seed Seed::from_u64(std::uint64_t value) {
  std::vector<std::uint8_t> buf;
  append_le64(buf, value);
  return Seed(sha256(buf));
}

Seed Seed::from_label(std::string_view label) {
  return Seed(sha256({reinterpret_cast<const std::uint8_t*>(label.data()), label.size()}));
}

Seed Seed::from_hex(std::string_view hex) { return Seed(digest_from_hex(hex)); }

Seed Seed::parse(std::string_view text) {
  auto all = [&](auto pred) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [&](unsigned char c) {
      return pred(c) != 0;
    });
  };
  if (text.size() == 64 && all([](unsigned char c) { return std::isxdigit(c); })) {
    return from_hex(text);
  }
  if (text.size() <= 19 && all([](unsigned char c) { return std::isdigit(c); })) {
    return from_u64(std::stoull(std::string(text)));
  }
  return from_label(text);
}

std::string Seed::hex() const { return to_hex(bytes_); }

Digest Seed::hash_with_counter(std::uint64_t index) const {
  std::array<std::uint8_t, 40> buf{};
  std::copy(bytes_.begin(), bytes_.end(), buf.begin());
  for (int i = 0; i < 8; ++i) buf[32 + i] = static_cast<std::uint8_t>(index >> (8 * i));
  Digest out{};
  SHA256(buf.data(), buf.size(), out.data());
  return out;
}

Seed derive_stage_seed(const Seed& root, std::uint64_t stage, SeedVariant variant) {
  if (stage < 1) throw std::invalid_argument("stage index is 1-based");
  if (stage > (std::uint64_t{1} << 60)) throw std::invalid_argument("stage index too large");
  return root.derive(3 * stage + static_cast<std::uint64_t>(variant));
}

std::uint64_t RandomStream::next_u64() {
  if (exhausted_) throw std::overflow_error("random stream counter exhausted");
  Digest d = seed_.hash_with_counter(counter_);
  if (counter_ == UINT64_MAX) {
    exhausted_ = true;
  } else {
    ++counter_;
  }
  return read_le64(d);
}

double u64_to_unit(std::uint64_t raw) {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

double RandomStream::uniform01() { return u64_to_unit(next_u64()); }

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  auto j = static_cast<std::uint64_t>(uniform01() * static_cast<double>(bound));
  return std::min(j, bound - 1);
}

std::uint64_t DistinctSampler::slot(std::uint64_t index) const {
  auto it = swapped_.find(index);
  return it == swapped_.end() ? index : it->second;
}

std::uint64_t DistinctSampler::next() {
  if (drawn_ >= population_) throw std::out_of_range("DistinctSampler: population exhausted");
  std::uint64_t j = drawn_ + stream_->uniform_below(population_ - drawn_);
  std::uint64_t picked = slot(j);
  swapped_[j] = slot(drawn_);
  ++drawn_;
  return picked + 1;
}

std::vector<std::size_t> shuffle(const Seed& seed, std::size_t n) {
  if (n == 0) throw std::invalid_argument("shuffle: n must be positive");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{1});
  RandomStream stream(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = stream.uniform_below(i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<std::size_t> sample_without_replacement(const Seed& seed, std::size_t population,
                                                    std::size_t count) {
  if (count < 1 || count > population) {
    throw std::invalid_argument("sample_without_replacement: need 1 <= count <= population (count=" +
                                std::to_string(count) + ", population=" +
                                std::to_string(population) + ")");
  }
  RandomStream stream(seed);
  DistinctSampler sampler(stream, population);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Batch> draw_batches(const Seed& stage_seed, std::uint64_t epoch_in_stage,
                                std::size_t n, std::size_t batch_size) {
  if (n == 0 || batch_size == 0 || n % batch_size != 0) {
    throw std::invalid_argument("draw_batches: batch size " + std::to_string(batch_size) +
                                " must divide dataset size " + std::to_string(n));
  }
  auto order = shuffle(stage_seed.derive(epoch_in_stage), n);
  std::vector<Batch> batches(n / batch_size);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    batches[b].reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      batches[b].push_back(order[b * batch_size + i] - 1);
    }
  }
  return batches;
}

}  // namespace pol
