#pragma once

// Counter-based random streams.
//
// Every draw is a pure function of (seed, stream, position), so replicate k
// of an experiment sees the same numbers no matter which worker thread runs
// it or in which order replicates are scheduled.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>

namespace fbmrate {

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// One independent stream of a seeded family. The key is the seed, the upper
// half of the counter is the stream id, and the lower half walks through the
// stream. Satisfies std::uniform_random_bit_generator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    if (buffered_ == 0) refill();
    const std::uint64_t out = buffer_[2 - buffered_];
    --buffered_;
    return out;
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept { return to_open_unit(next_u64()); }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double a = 0.0;
    box_muller(next_u64(), next_u64(), a, spare_);
    has_spare_ = true;
    return a;
  }

  // Fills `out` with standard normals, consuming whole blocks.
  void fill_normal(std::span<double> out) noexcept {
    std::size_t i = 0;
    while (has_spare_ && i < out.size()) {
      out[i++] = spare_;
      has_spare_ = false;
    }
    for (; i + 1 < out.size(); i += 2) box_muller(next_u64(), next_u64(), out[i], out[i + 1]);
    if (i < out.size()) out[i] = normal();
  }

  std::uint64_t stream_id() const noexcept { return stream_; }

 private:
  static double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  static void box_muller(std::uint64_t b1, std::uint64_t b2, double& z1, double& z2) noexcept {
    const double radius = std::sqrt(-2.0 * std::log(to_open_unit(b1)));
    const double angle = 2.0 * std::numbers::pi * to_open_unit(b2);
    z1 = radius * std::cos(angle);
    z2 = radius * std::sin(angle);
  }

  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)};
    const auto r = Philox4x32::generate(ctr, key_);
    buffer_[0] = (std::uint64_t{r[1]} << 32) | r[0];
    buffer_[1] = (std::uint64_t{r[3]} << 32) | r[2];
    buffered_ = 2;
    ++block_;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fbmrate
