#pragma once

#include <complex>
#include <cstdint>

namespace hynoma {

// Deterministic PRNG (xoshiro256++ seeded via splitmix64). All simulation
// randomness goes through this so runs are bit-reproducible across platforms;
// the standard <random> distributions are implementation-defined and are not
// used anywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 1);

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double uniform();
  // uniform in [lo, hi)
  double uniform(double lo, double hi);
  // uniform integer in [0, n), n > 0
  std::uint64_t uniform_int(std::uint64_t n);

  // standard normal N(0, 1), Box-Muller (two values per transform, cached)
  double normal();
  // complex circularly-symmetric Gaussian CN(0, 1): E|z|^2 = 1
  std::complex<double> cnormal();

  // Independent child stream for a tagged sub-task. Keyed hashing keeps
  // replicas decoupled no matter how many draws each one makes.
  Rng split(std::uint64_t stream_tag) const;

private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
  std::uint64_t seed_origin_ = 0;
};

// splitmix64 step, also used for config/content hashing
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over a byte string; stable content hash for provenance stamps
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);

} // namespace hynoma
