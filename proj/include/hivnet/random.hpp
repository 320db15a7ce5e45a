#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hivnet {

/// Deterministic random stream: xoshiro256** seeded through splitmix64 from
/// a (master seed, stream id) pair. The standard library engines are specified
/// but its distributions are not, so every draw the model makes goes through
/// this class and the samplers below. Streams with the same (seed, stream_id)
/// produce identical sequences on every platform; distinct stream ids give
/// independent sequences for practical purposes.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double();

  /// Uniform integer in [0, bound), unbiased (Lemire rejection). bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

  bool bernoulli(double p) { return next_double() < p; }

  /// Child stream fully determined by (seed, stream_id, purpose), independent
  /// of any draws already made on this stream. Adding a new consumer with its
  /// own purpose never perturbs existing streams.
  RandomStream substream(std::uint64_t purpose) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::array<std::uint64_t, 4> state() const;
  void set_state(const std::array<std::uint64_t, 4>& s);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t s_[4];
};

/// Poisson sample. Inversion by sequential search for mean <= 30; larger
/// means are decomposed additively into chunks of at most 30 (sums of
/// independent Poissons), which keeps the inversion exact and portable.
int sample_poisson(double mean, RandomStream& stream);

/// Uniform integer in [a, b], both ends inclusive.
std::int64_t sample_uniform_int(std::int64_t a, std::int64_t b, RandomStream& stream);

/// Uniform real in [a, b).
double sample_uniform_real(double a, double b, RandomStream& stream);

/// Truncated power-law degree distribution:
///   p_k = norm_c * k^-gamma for 1 <= k <= k_max, p_0 = p_zero.
struct DegreeDistributionSpec {
  double gamma = 0.0;
  int k_max = 0;
  double p_zero = 0.0;
  double norm_c = 0.0;

  /// Probabilities for k = 0..k_max.
  std::vector<double> pmf() const;
  double mean_degree() const;
  double degree_variance() const;
};

/// Computes the normalization constant C = (1 - p_zero) / sum_{k=1..k_max} k^-gamma.
/// Requires gamma > 1, k_max >= 1, 0 <= p_zero < 1.
DegreeDistributionSpec normalize_degree_distribution(double gamma, int k_max, double p_zero);

/// Inverse-CDF table sampler for a DegreeDistributionSpec. The table is built
/// once per spec; each draw is one uniform plus a binary search.
class DegreeSampler {
 public:
  explicit DegreeSampler(const DegreeDistributionSpec& spec);
  int sample(RandomStream& stream) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace hivnet
