#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lqg {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
/// A block of four 64-bit words is a pure function of (counter, key), so any
/// draw can be regenerated from its coordinates without shared state.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const auto [hi0, lo0] = mulhilo(kMul0, ctr[0]);
      const auto [hi1, lo1] = mulhilo(kMul1, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  struct HiLo {
    std::uint64_t hi, lo;
  };
  static HiLo mulhilo(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
  }
};

/// Named random streams. The stream id occupies the second key word so that
/// draws for different purposes never share a counter space.
enum class Stream : std::uint64_t {
  kReplica = 1,
  kExactNoise = 2,
  kOctaveNoise = 3,
  kTest = 99,
};

/// Uniform in (0, 1] from the top 53 bits.
inline double uniform_open0(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Four standard normals from one Philox block via Box-Muller.
inline std::array<double, 4> normal4(std::uint64_t seed, Stream stream,
                                     const Philox4x64::Counter& ctr) {
  const auto w = Philox4x64::block(ctr, {seed, static_cast<std::uint64_t>(stream)});
  std::array<double, 4> out{};
  for (int k = 0; k < 2; ++k) {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open0(w[2 * k])));
    const double angle = 2.0 * std::numbers::pi * uniform_open0(w[2 * k + 1]);
    out[2 * k] = radius * std::cos(angle);
    out[2 * k + 1] = radius * std::sin(angle);
  }
  return out;
}

/// Seed of an independent child stream, e.g. replica `index` of a campaign.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  return Philox4x64::block({index, 0, 0, 0}, {base_seed, static_cast<std::uint64_t>(Stream::kReplica)})[0];
}

}  // namespace lqg
