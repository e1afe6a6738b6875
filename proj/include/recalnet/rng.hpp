#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace recalnet {

/// Counter-based PRNG: the splitmix64 finalizer applied to
/// (stream state + k * golden ratio). Streams are derived from a master
/// seed plus a stream name, so independent consumers (data splits,
/// weight init, shuffling) draw from disjoint sequences. Every transform
/// below is fixed bit for bit; sequences reproduce across platforms.
///
/// Uniform doubles are ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
/// Normals are Box-Muller, cosine branch, two uniforms per draw:
///   z = sqrt(-2 ln u1) * cos(2 pi u2).
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64();
  double next_uniform();
  double next_normal();
  /// Unbiased draw in [0, n); n must be positive.
  std::size_t next_below(std::size_t n);

 private:
  std::uint64_t state_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// FNV-1a over bytes; used to fold stream names into seeds.
std::uint64_t fnv1a64(std::string_view s);

/// Fisher-Yates using rng.next_below; order fixed by the draw sequence.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_below(i)]);
  }
}

}  // namespace recalnet
