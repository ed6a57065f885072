#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace hdt {

using Rng = std::mt19937_64;

/// Independent random streams derived from one seed. Samplers that consume a
/// different number of draws per step still see identical streams for the
/// parts they share (e.g. an alpha = 0 history target vs. the plain target).
enum class StreamDomain : std::uint32_t {
  proposal = 1,    // neighbor / candidate / reference draws
  acceptance = 2,  // accept-reject and selection uniforms
  initial_state = 3,
  fake_counts = 4,
  labels = 5,
};

inline Rng make_stream(std::uint64_t seed, StreamDomain domain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(domain), 0x48445431U};
  return Rng(seq);
}

struct ChainRng {
  explicit ChainRng(std::uint64_t seed)
      : proposal(make_stream(seed, StreamDomain::proposal)),
        acceptance(make_stream(seed, StreamDomain::acceptance)) {}

  Rng proposal;
  Rng acceptance;
};

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace hdt
