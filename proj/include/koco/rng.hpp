#pragma once

#include <cstdint>
#include <string_view>

namespace koco {

/// Counter-based generator: draw i is a SplitMix64 finalization of (key, i).
/// Two generators with the same key produce the same sequence on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller; consumes two counters.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Derives a named sub-seed from a master seed, e.g. sub_seed(42, "kors").
std::uint64_t sub_seed(std::uint64_t master, std::string_view name);

}  // namespace koco
