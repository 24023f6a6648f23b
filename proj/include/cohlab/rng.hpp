#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace cohlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and 64-bit key to 128 bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive keys from structured seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Folds a tuple of integers into one 64-bit seed. Order matters.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Counter-based generator. The whole state is (key, stream, position), so a
/// generator for trial t of a sweep can be rebuilt from its seed tuple without
/// replaying any other trial.
class Rng {
 public:
  static constexpr std::string_view kName = "philox4x32-10/splitmix64-keyed";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child generator with a key derived from this one's key and `tag`.
  /// Does not advance the parent.
  [[nodiscard]] Rng split(std::uint64_t tag) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller on two uniforms.
  double normal();

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace cohlab
