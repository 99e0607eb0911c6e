#pragma once

#include <cstdint>
#include <random>

namespace seqcs {

/// Derives an independent stream seed from a master seed and a stream index.
/// SplitMix64 finalizer over master + golden-ratio increments; the same
/// (master, index) pair always yields the same stream.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index);

/// Seeded random stream with portable scalar mappings. The raw engine is
/// std::mt19937_64; uniform and normal draws are mapped here (not through
/// std::*_distribution) so sequences are identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : engine_(derive_stream_seed(master_seed, stream_index)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; one cached value per pair.
  double normal();

  /// Equiprobable -1 / +1.
  double sign_pm1() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace seqcs
