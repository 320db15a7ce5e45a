#include "hivnet/contact_network.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace hivnet {

namespace {

inline std::uint64_t pack_pair(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

void NetworkParams::validate() const {
  if (n_zero <= 0) throw std::invalid_argument("network.n_zero must be > 0");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_steady)) throw std::invalid_argument("network.p_steady out of [0,1]");
  if (!prob(p_casual_keep)) throw std::invalid_argument("network.p_casual_keep out of [0,1]");
  if (!prob(migration_fraction)) {
    throw std::invalid_argument("network.migration_fraction out of [0,1]");
  }
  if (age_min > age_max) throw std::invalid_argument("network.age_min must be <= age_max");
  if (steady_duration_min < 1 || steady_duration_min > steady_duration_max) {
    throw std::invalid_argument("network.steady_duration range must satisfy 1 <= min <= max");
  }
  if (seed_max_elapsed < -1) {
    throw std::invalid_argument("network.seed_max_elapsed must be >= -1");
  }
  if (pairing_retry_factor < 1) {
    throw std::invalid_argument("network.pairing_retry_factor must be >= 1");
  }
  if (degree_spec.k_max < 1 || !(degree_spec.norm_c > 0.0)) {
    throw std::invalid_argument("network.degree_spec is not normalized");
  }
}

double compute_p_steady(const DegreeDistributionSpec& spec) {
  const double mean = spec.mean_degree();
  if (!(mean > 0.0)) {
    throw std::domain_error("compute_p_steady: mean degree is zero");
  }
  // N * (0.5 / 2) / <e> with <e> = N * <k> / 2.
  return 0.5 / mean;
}

std::size_t ContactNetwork::index_of(std::uint32_t id) const {
  auto it = std::lower_bound(agents.begin(), agents.end(), id,
                             [](const Agent& a, std::uint32_t v) { return a.id < v; });
  if (it == agents.end() || it->id != id) {
    throw std::logic_error("ContactNetwork: unknown agent id " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - agents.begin());
}

bool ContactNetwork::has_edge(std::uint32_t a, std::uint32_t b) const {
  for (const auto& e : edges) {
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return true;
  }
  return false;
}

int ContactNetwork::free_stub_count() const {
  int total = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    total += target_degree[i] - degree[i];
  }
  return total;
}

void ContactNetwork::rebuild_derived() {
  degree.assign(agents.size(), 0);
  has_steady.assign(agents.size(), 0);
  for (const auto& e : edges) {
    const std::size_t ia = index_of(e.a);
    const std::size_t ib = index_of(e.b);
    degree[ia] += 1;
    degree[ib] += 1;
    if (e.kind == PartnershipKind::Steady) {
      has_steady[ia] = 1;
      has_steady[ib] = 1;
    }
  }
}

void ContactNetwork::check_invariants() const {
  if (agents.size() != target_degree.size() || agents.size() != degree.size() ||
      agents.size() != has_steady.size()) {
    throw std::logic_error("network invariant: parallel vectors out of sync");
  }
  for (std::size_t i = 1; i < agents.size(); ++i) {
    if (agents[i - 1].id >= agents[i].id) {
      throw std::logic_error("network invariant: agents not sorted by id");
    }
  }
  std::vector<int> deg(agents.size(), 0);
  std::vector<int> steady_count(agents.size(), 0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.a == e.b) throw std::logic_error("network invariant: self-loop");
    const std::size_t ia = index_of(e.a);
    const std::size_t ib = index_of(e.b);
    if (!seen.insert(pack_pair(e.a, e.b)).second) {
      throw std::logic_error("network invariant: parallel edge");
    }
    deg[ia] += 1;
    deg[ib] += 1;
    if (e.kind == PartnershipKind::Steady) {
      steady_count[ia] += 1;
      steady_count[ib] += 1;
      if (e.expected_duration < 1 || e.elapsed > e.expected_duration) {
        throw std::logic_error("network invariant: bad steady duration");
      }
    }
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (deg[i] != degree[i]) throw std::logic_error("network invariant: stale degree cache");
    if (deg[i] > target_degree[i]) {
      throw std::logic_error("network invariant: degree above target");
    }
    if (steady_count[i] > 1) {
      throw std::logic_error("network invariant: two steady partners on one vertex");
    }
    if ((steady_count[i] == 1) != (has_steady[i] != 0)) {
      throw std::logic_error("network invariant: stale has_steady cache");
    }
  }
}

namespace {

// Configuration-model pairing of all free stubs. Colliding pairs (self-loop,
// existing edge, or a steady draw landing on an occupied vertex) return to
// the pool; after pairing_retry_factor * stubs failed attempts the leftover
// stubs are dropped for this step.
//
// Typing runs in two phases. The steady coin is flipped once per formable
// edge up front and the resulting quota is matched first, among vertices
// without a steady partner; everything left pairs as casual. Flipping the
// coin per formed edge and demoting blocked flips to casual would starve the
// steady population instead (high-degree vertices hold most stub ends and
// saturate at one steady partner each, so most flips land on occupied
// vertices), and the realized steady share of new partnerships would fall
// far below p_steady.
void pair_free_stubs(ContactNetwork& net, const NetworkParams& params, RandomStream& stream) {
  std::vector<std::uint32_t> stubs;
  for (std::size_t i = 0; i < net.agents.size(); ++i) {
    for (int s = net.degree[i]; s < net.target_degree[i]; ++s) {
      stubs.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (stubs.size() < 2) return;
  std::unordered_set<std::uint64_t> edge_set;
  edge_set.reserve(net.edges.size() * 2 + stubs.size());
  for (const auto& e : net.edges) edge_set.insert(pack_pair(e.a, e.b));

  const long long budget =
      static_cast<long long>(params.pairing_retry_factor) * static_cast<long long>(stubs.size());
  long long rejects = 0;

  auto take = [&]() {
    const std::size_t i = static_cast<std::size_t>(stream.next_below(stubs.size()));
    const std::uint32_t v = stubs[i];
    stubs[i] = stubs.back();
    stubs.pop_back();
    return v;
  };
  auto put_back = [&](std::uint32_t x, std::uint32_t y) {
    stubs.push_back(x);
    stubs.push_back(y);
  };
  auto connect = [&](std::uint32_t ia, std::uint32_t ib, PartnershipKind kind) {
    Partnership e;
    e.a = std::min(net.agents[ia].id, net.agents[ib].id);
    e.b = std::max(net.agents[ia].id, net.agents[ib].id);
    e.kind = kind;
    if (kind == PartnershipKind::Steady) {
      e.expected_duration = static_cast<int>(
          sample_uniform_int(params.steady_duration_min, params.steady_duration_max, stream));
      net.has_steady[ia] = 1;
      net.has_steady[ib] = 1;
    }
    net.edges.push_back(e);
    edge_set.insert(pack_pair(e.a, e.b));
    net.degree[ia] += 1;
    net.degree[ib] += 1;
  };

  std::size_t quota = 0;
  const std::size_t formable = stubs.size() / 2;
  for (std::size_t i = 0; i < formable; ++i) {
    if (stream.bernoulli(params.p_steady)) ++quota;
  }

  while (quota > 0 && stubs.size() >= 2 && rejects <= budget) {
    const std::uint32_t ia = take();
    const std::uint32_t ib = take();
    if (ia == ib || net.has_steady[ia] || net.has_steady[ib] ||
        edge_set.count(pack_pair(net.agents[ia].id, net.agents[ib].id)) != 0) {
      put_back(ia, ib);
      ++rejects;
      continue;
    }
    connect(ia, ib, PartnershipKind::Steady);
    --quota;
  }

  while (stubs.size() >= 2 && rejects <= budget) {
    const std::uint32_t ia = take();
    const std::uint32_t ib = take();
    if (ia == ib || edge_set.count(pack_pair(net.agents[ia].id, net.agents[ib].id)) != 0) {
      put_back(ia, ib);
      ++rejects;
      continue;
    }
    connect(ia, ib, PartnershipKind::Casual);
  }
}

void add_new_agent(ContactNetwork& net, const NetworkParams& params, const DegreeSampler& sampler,
                   RandomStream& stream) {
  Agent a;
  a.id = net.next_agent_id++;
  a.age = static_cast<int>(sample_uniform_int(params.age_min, params.age_max, stream));
  net.agents.push_back(a);
  net.target_degree.push_back(sampler.sample(stream));
  net.degree.push_back(0);
  net.has_steady.push_back(0);
}

}  // namespace

ContactNetwork build_network(const NetworkParams& params, const CareCascadeParams& cascade,
                             int start_year, int initial_positive_count, RandomStream& stream) {
  params.validate();
  cascade.validate();
  if (initial_positive_count < 0 || initial_positive_count > params.n_zero) {
    throw std::invalid_argument("build_network: initial_positive_count out of [0, n_zero]");
  }
  ContactNetwork net;
  const DegreeSampler sampler(params.degree_spec);
  net.agents.reserve(static_cast<std::size_t>(params.n_zero));
  for (int i = 0; i < params.n_zero; ++i) {
    add_new_agent(net, params, sampler, stream);
  }
  pair_free_stubs(net, params, stream);

  // Partial Fisher-Yates selection of the initially infected, applied in
  // ascending agent order so the cascade draws attach deterministically.
  std::vector<std::uint32_t> idx(net.agents.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
  const auto count = static_cast<std::size_t>(initial_positive_count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(stream.next_below(idx.size() - j));
    std::swap(idx[j], idx[r]);
  }
  std::vector<std::uint32_t> seeded(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(seeded.begin(), seeded.end());
  for (const auto i : seeded) {
    Agent& a = net.agents[i];
    a.stage = Stage::Asymptomatic;
    a.infection_step = 0;
    apply_care_cascade(a, start_year, cascade, stream);
    int hi = a.ap_expected_duration - 1;
    if (params.seed_max_elapsed >= 0) hi = std::min(hi, params.seed_max_elapsed);
    a.stage_elapsed = hi >= 1 ? static_cast<int>(sample_uniform_int(0, hi, stream)) : 0;
  }
  net.step = 0;
  return net;
}

void tick_partnerships(ContactNetwork& net) {
  for (auto& e : net.edges) {
    if (e.kind == PartnershipKind::Steady && e.elapsed < e.expected_duration) {
      e.elapsed += 1;
    }
  }
}

void demographic_step(ContactNetwork& net, const NetworkParams& params, RandomStream& stream) {
  const std::size_t n = net.agents.size();
  std::vector<std::uint8_t> removed(n, 0);

  // Rule order is fixed for reproducibility: age, AIDS flag, migration.
  for (std::size_t i = 0; i < n; ++i) {
    if (net.agents[i].age > params.age_max) removed[i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Agent& a = net.agents[i];
    if (!removed[i] && a.stage == Stage::Aids && a.aids_entry_step >= 0 &&
        a.aids_entry_step < net.step) {
      removed[i] = 1;
    }
  }
  std::vector<std::uint32_t> survivors;
  survivors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) survivors.push_back(static_cast<std::uint32_t>(i));
  }
  const auto migrants = static_cast<std::size_t>(
      std::llround(params.migration_fraction * static_cast<double>(survivors.size())));
  for (std::size_t j = 0; j < migrants && j < survivors.size(); ++j) {
    const std::size_t r = j + static_cast<std::size_t>(stream.next_below(survivors.size() - j));
    std::swap(survivors[j], survivors[r]);
    removed[survivors[j]] = 1;
  }

  // Edge pass in stored order. The retention coin is drawn only for casual
  // edges whose endpoints both survive.
  std::vector<Partnership> kept;
  kept.reserve(net.edges.size());
  for (const auto& e : net.edges) {
    if (removed[net.index_of(e.a)] || removed[net.index_of(e.b)]) continue;
    if (e.kind == PartnershipKind::Steady) {
      if (e.elapsed >= e.expected_duration) continue;  // expired
      kept.push_back(e);
    } else {
      if (stream.bernoulli(params.p_casual_keep)) kept.push_back(e);
    }
  }
  net.edges = std::move(kept);

  std::vector<Agent> alive;
  std::vector<int> alive_target;
  alive.reserve(n);
  alive_target.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) {
      alive.push_back(net.agents[i]);
      alive_target.push_back(net.target_degree[i]);
    }
  }
  net.agents = std::move(alive);
  net.target_degree = std::move(alive_target);

  const DegreeSampler sampler(params.degree_spec);
  net.degree.resize(net.agents.size());
  net.has_steady.resize(net.agents.size());
  while (net.agents.size() < static_cast<std::size_t>(params.n_zero)) {
    add_new_agent(net, params, sampler, stream);
  }
  net.rebuild_derived();
}

void reshuffle(ContactNetwork& net, const NetworkParams& params, RandomStream& stream) {
  pair_free_stubs(net, params, stream);
}

NetworkMetrics network_metrics(const ContactNetwork& net) {
  NetworkMetrics m;
  const std::size_t n = net.agents.size();
  if (n == 0) return m;

  int max_deg = 0;
  for (const int d : net.degree) max_deg = std::max(max_deg, d);
  m.degree_histogram.assign(static_cast<std::size_t>(max_deg) + 1, 0);
  long long total_deg = 0;
  for (const int d : net.degree) {
    m.degree_histogram[static_cast<std::size_t>(d)] += 1;
    total_deg += d;
  }
  m.mean_degree = static_cast<double>(total_deg) / static_cast<double>(n);

  if (!net.edges.empty()) {
    std::size_t steady = 0;
    for (const auto& e : net.edges) {
      if (e.kind == PartnershipKind::Steady) ++steady;
    }
    m.steady_fraction = static_cast<double>(steady) / static_cast<double>(net.edges.size());
  }

  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& e : net.edges) {
    const auto ia = static_cast<std::uint32_t>(net.index_of(e.a));
    const auto ib = static_cast<std::uint32_t>(net.index_of(e.b));
    adj[ia].push_back(ib);
    adj[ib].push_back(ia);
  }

  std::vector<int> component(n, -1);
  std::vector<std::uint32_t> queue;
  int comp = 0;
  std::size_t largest = 0;
  int largest_comp = -1;
  for (std::size_t start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    queue.clear();
    queue.push_back(static_cast<std::uint32_t>(start));
    component[start] = comp;
    std::size_t size = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t v = queue[head];
      ++size;
      for (const auto w : adj[v]) {
        if (component[w] < 0) {
          component[w] = comp;
          queue.push_back(w);
        }
      }
    }
    if (size > largest) {
      largest = size;
      largest_comp = comp;
    }
    ++comp;
  }
  m.component_count = comp;
  m.largest_component_size = largest;

  if (largest > 1) {
    long long pair_count = 0;
    long long dist_sum = 0;
    std::vector<int> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (component[s] != largest_comp) continue;
      std::fill(dist.begin(), dist.end(), -1);
      queue.clear();
      queue.push_back(static_cast<std::uint32_t>(s));
      dist[s] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (const auto w : adj[v]) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            dist_sum += dist[w];
            ++pair_count;
            queue.push_back(w);
          }
        }
      }
    }
    if (pair_count > 0) {
      m.mean_path_length = static_cast<double>(dist_sum) / static_cast<double>(pair_count);
    }
  }
  return m;
}

}  // namespace hivnet
