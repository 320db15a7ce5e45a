#include "hivnet/random.hpp"

#include <cmath>
#include <stdexcept>

namespace hivnet {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  return splitmix64(x);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t sm = seed ^ mix64(stream_id + 0x632BE59BD9B4E019ULL);
  s_[0] = splitmix64(sm);
  s_[1] = splitmix64(sm);
  s_[2] = splitmix64(sm);
  s_[3] = splitmix64(sm);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is invalid
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl64(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RandomStream::next_below: bound must be > 0");
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (lo < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RandomStream RandomStream::substream(std::uint64_t purpose) const {
  std::uint64_t child = stream_id_ ^ mix64(purpose + 0x9E3779B97F4A7C15ULL);
  return RandomStream(seed_, child);
}

std::array<std::uint64_t, 4> RandomStream::state() const {
  return {s_[0], s_[1], s_[2], s_[3]};
}

void RandomStream::set_state(const std::array<std::uint64_t, 4>& s) {
  s_[0] = s[0];
  s_[1] = s[1];
  s_[2] = s[2];
  s_[3] = s[3];
}

namespace {

int poisson_inversion(double lambda, RandomStream& stream) {
  // Sequential search on the CDF. Safe for lambda <= 30: exp(-30) ~ 9.4e-14
  // is far above the double underflow threshold.
  const double u = stream.next_double();
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  const int cap = 30 + static_cast<int>(60.0 * std::sqrt(lambda > 1.0 ? lambda : 1.0));
  while (u > cdf && k < cap) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

}  // namespace

int sample_poisson(double mean, RandomStream& stream) {
  if (!(mean >= 0.0)) throw std::invalid_argument("sample_poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  int total = 0;
  double remaining = mean;
  while (remaining > 30.0) {
    total += poisson_inversion(30.0, stream);
    remaining -= 30.0;
  }
  return total + poisson_inversion(remaining, stream);
}

std::int64_t sample_uniform_int(std::int64_t a, std::int64_t b, RandomStream& stream) {
  if (a > b) throw std::invalid_argument("sample_uniform_int: requires a <= b");
  const auto span = static_cast<std::uint64_t>(b - a) + 1;
  if (span == 0) throw std::invalid_argument("sample_uniform_int: range too wide");
  return a + static_cast<std::int64_t>(stream.next_below(span));
}

double sample_uniform_real(double a, double b, RandomStream& stream) {
  if (!(a <= b)) throw std::invalid_argument("sample_uniform_real: requires a <= b");
  return a + (b - a) * stream.next_double();
}

std::vector<double> DegreeDistributionSpec::pmf() const {
  std::vector<double> p(static_cast<std::size_t>(k_max) + 1);
  p[0] = p_zero;
  for (int k = 1; k <= k_max; ++k) {
    p[static_cast<std::size_t>(k)] = norm_c * std::pow(static_cast<double>(k), -gamma);
  }
  return p;
}

double DegreeDistributionSpec::mean_degree() const {
  double m = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    m += norm_c * std::pow(static_cast<double>(k), 1.0 - gamma);
  }
  return m;
}

double DegreeDistributionSpec::degree_variance() const {
  const double m = mean_degree();
  double m2 = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    m2 += norm_c * std::pow(static_cast<double>(k), 2.0 - gamma);
  }
  return m2 - m * m;
}

DegreeDistributionSpec normalize_degree_distribution(double gamma, int k_max, double p_zero) {
  if (!(gamma > 1.0)) throw std::invalid_argument("degree distribution: gamma must be > 1");
  if (k_max < 1) throw std::invalid_argument("degree distribution: k_max must be >= 1");
  if (!(p_zero >= 0.0 && p_zero < 1.0)) {
    throw std::invalid_argument("degree distribution: p_zero must lie in [0, 1)");
  }
  double sum = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    sum += std::pow(static_cast<double>(k), -gamma);
  }
  DegreeDistributionSpec spec;
  spec.gamma = gamma;
  spec.k_max = k_max;
  spec.p_zero = p_zero;
  spec.norm_c = (1.0 - p_zero) / sum;
  return spec;
}

DegreeSampler::DegreeSampler(const DegreeDistributionSpec& spec) {
  const auto p = spec.pmf();
  cdf_.resize(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;  // absorb rounding so every u in [0,1) maps to a degree
}

int DegreeSampler::sample(RandomStream& stream) const {
  const double u = stream.next_double();
  int lo = 0;
  int hi = static_cast<int>(cdf_.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cdf_[static_cast<std::size_t>(mid)] > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace hivnet
