#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "hivnet/contact_network.hpp"
#include "hivnet/stats.hpp"

using namespace hivnet;

namespace {

NetworkParams paper_network_params() {
  NetworkParams p;
  p.degree_spec = normalize_degree_distribution(1.6, 200, 0.01);
  p.p_steady = compute_p_steady(p.degree_spec);
  return p;
}

NetworkParams small_network_params(int n = 60) {
  NetworkParams p;
  p.n_zero = n;
  p.degree_spec = normalize_degree_distribution(2.0, 8, 0.0);
  p.p_steady = compute_p_steady(p.degree_spec);
  return p;
}

// Minimal hand-built network helper for targeted structural tests.
ContactNetwork tiny_network(int n, const std::vector<int>& targets) {
  ContactNetwork net;
  for (int i = 0; i < n; ++i) {
    Agent a;
    a.id = net.next_agent_id++;
    a.age = 30;
    net.agents.push_back(a);
    net.target_degree.push_back(targets[static_cast<std::size_t>(i)]);
  }
  net.rebuild_derived();
  return net;
}

}  // namespace

TEST_SUITE("contact_network") {

TEST_CASE("p_steady for a distribution with all mass at degree one") {
  const auto spec = normalize_degree_distribution(4.0, 1, 0.0);
  CHECK(compute_p_steady(spec) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("p_steady equals 0.5 over the mean degree") {
  const auto spec = normalize_degree_distribution(1.6, 200, 0.01);
  CHECK(compute_p_steady(spec) == doctest::Approx(0.5 / spec.mean_degree()).epsilon(1e-15));
  // Frozen from the direct-summation oracle; the source text's ~0.054 is not
  // reachable from these inputs (see the acceptance suite notes).
  CHECK(compute_p_steady(spec) == doctest::Approx(0.05928615222642667).epsilon(1e-12));
}

TEST_CASE("build: population size, ages, seeded positives") {
  const auto params = paper_network_params();
  CareCascadeParams cascade;
  RandomStream s(2024, 11);
  const auto net = build_network(params, cascade, 1984, 571, s);
  CHECK(net.agents.size() == 2299);
  int infected = 0;
  for (const auto& a : net.agents) {
    CHECK(a.age >= 15);
    CHECK(a.age <= 65);
    if (a.infected()) {
      ++infected;
      CHECK(a.stage == Stage::Asymptomatic);
      CHECK_FALSE(a.treated);  // no treatment in 1984
      CHECK(a.stage_elapsed <= a.ap_expected_duration);
    }
  }
  CHECK(infected == 571);
  CHECK(net.step == 0);
  net.check_invariants();
}

TEST_CASE("build: rejects an impossible seed count") {
  const auto params = small_network_params();
  CareCascadeParams cascade;
  RandomStream s(1, 1);
  CHECK_THROWS_AS(build_network(params, cascade, 1984, 1000, s), std::invalid_argument);
}

TEST_CASE("build: steady fraction tracks p_steady across builds") {
  const auto params = paper_network_params();
  CareCascadeParams cascade;
  long double frac_sum = 0.0L;
  const int builds = 30;
  for (int i = 0; i < builds; ++i) {
    RandomStream s(900 + i, 1);
    const auto net = build_network(params, cascade, 1984, 0, s);
    net.check_invariants();
    std::size_t steady = 0;
    for (const auto& e : net.edges) {
      if (e.kind == PartnershipKind::Steady) ++steady;
    }
    frac_sum += static_cast<long double>(steady) / static_cast<long double>(net.edges.size());
  }
  const double mean_fraction = static_cast<double>(frac_sum / builds);
  CHECK(std::abs(mean_fraction - params.p_steady) < 0.01);
}

TEST_CASE("demographic: over-age agents are removed and replaced") {
  auto params = small_network_params();
  CareCascadeParams cascade;
  RandomStream s(5, 5);
  auto net = build_network(params, cascade, 1984, 0, s);
  const auto doomed_id = net.agents[3].id;
  net.agents[3].age = 66;
  params.migration_fraction = 0.0;
  demographic_step(net, params, s);
  CHECK(net.agents.size() == static_cast<std::size_t>(params.n_zero));
  bool present = false;
  for (const auto& a : net.agents) {
    if (a.id == doomed_id) present = true;
  }
  CHECK_FALSE(present);
  reshuffle(net, params, s);
  net.check_invariants();
}

TEST_CASE("demographic: AIDS removal is delayed by one step") {
  auto params = small_network_params();
  params.migration_fraction = 0.0;
  CareCascadeParams cascade;
  RandomStream s(6, 6);
  auto net = build_network(params, cascade, 1984, 0, s);
  const auto id = net.agents[0].id;
  net.agents[0].stage = Stage::Aids;
  net.agents[0].aids_entry_step = 3;

  net.step = 3;  // the step AIDS was entered: still present afterwards
  demographic_step(net, params, s);
  CHECK_NOTHROW(net.index_of(id));

  net.step = 4;  // the next step: removed
  demographic_step(net, params, s);
  CHECK_THROWS_AS(net.index_of(id), std::logic_error);
  CHECK(net.agents.size() == static_cast<std::size_t>(params.n_zero));
}

TEST_CASE("demographic: migration removes the requested fraction of survivors") {
  auto params = small_network_params(100);
  params.migration_fraction = 0.25;
  CareCascadeParams cascade;
  RandomStream s(7, 7);
  auto net = build_network(params, cascade, 1984, 0, s);
  std::set<std::uint32_t> before;
  for (const auto& a : net.agents) before.insert(a.id);
  demographic_step(net, params, s);
  int survivors = 0;
  for (const auto& a : net.agents) {
    if (before.count(a.id)) ++survivors;
  }
  CHECK(survivors == 75);
  CHECK(net.agents.size() == 100);
}

TEST_CASE("demographic: casual retention coin at the extremes") {
  CareCascadeParams cascade;
  for (const double keep : {0.0, 1.0}) {
    auto params = small_network_params(80);
    params.migration_fraction = 0.0;
    params.p_casual_keep = keep;
    params.p_steady = 0.0;  // casual edges only
    RandomStream s(8, 8);
    auto net = build_network(params, cascade, 1984, 0, s);
    const auto edge_count = net.edges.size();
    REQUIRE(edge_count > 0);
    demographic_step(net, params, s);
    if (keep == 0.0) {
      CHECK(net.edges.empty());
    } else {
      CHECK(net.edges.size() == edge_count);
    }
  }
}

TEST_CASE("steady persistence: an unexpired steady edge survives the step") {
  auto params = small_network_params(80);
  params.migration_fraction = 0.0;
  params.p_casual_keep = 0.0;
  CareCascadeParams cascade;
  RandomStream s(9, 9);
  auto net = build_network(params, cascade, 1984, 0, s);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> persisting;
  for (auto& e : net.edges) {
    if (e.kind == PartnershipKind::Steady && e.elapsed < e.expected_duration) {
      persisting.emplace_back(e.a, e.b);
    }
  }
  REQUIRE(!persisting.empty());
  demographic_step(net, params, s);
  for (const auto& [a, b] : persisting) {
    CHECK(net.has_edge(a, b));
  }
}

TEST_CASE("expired steady edges are deleted") {
  auto params = small_network_params(80);
  params.migration_fraction = 0.0;
  CareCascadeParams cascade;
  RandomStream s(10, 10);
  auto net = build_network(params, cascade, 1984, 0, s);
  for (auto& e : net.edges) {
    if (e.kind == PartnershipKind::Steady) e.elapsed = e.expected_duration;
  }
  demographic_step(net, params, s);
  for (const auto& e : net.edges) {
    CHECK(e.kind == PartnershipKind::Casual);
  }
}

TEST_CASE("reshuffle: no free stubs is a fixpoint") {
  auto net = tiny_network(2, {1, 1});
  auto params = small_network_params(2);
  RandomStream s(11, 11);
  reshuffle(net, params, s);
  REQUIRE(net.edges.size() == 1);
  const auto before = net.edges;
  reshuffle(net, params, s);
  CHECK(net.edges.size() == 1);
  CHECK(net.edges[0].a == before[0].a);
  CHECK(net.edges[0].b == before[0].b);
}

TEST_CASE("reshuffle: two free stubs force exactly one edge") {
  auto net = tiny_network(2, {1, 1});
  auto params = small_network_params(2);
  RandomStream s(12, 12);
  reshuffle(net, params, s);
  CHECK(net.edges.size() == 1);
  CHECK(net.edges[0].a != net.edges[0].b);
  net.check_invariants();
}

TEST_CASE("degree conservation after every reshuffle") {
  auto params = small_network_params(120);
  CareCascadeParams cascade;
  RandomStream s(13, 13);
  auto net = build_network(params, cascade, 1984, 0, s);
  for (int t = 1; t <= 10; ++t) {
    net.step = t;
    for (auto& a : net.agents) a.age += 1;
    tick_partnerships(net);
    demographic_step(net, params, s);
    reshuffle(net, params, s);
    long long sum = 0;
    for (const int d : net.degree) sum += d;
    CHECK(sum % 2 == 0);
    CHECK(sum == 2 * static_cast<long long>(net.edges.size()));
    CHECK(net.agents.size() == static_cast<std::size_t>(params.n_zero));
    net.check_invariants();
  }
}

TEST_CASE("structural invariants hold over a 30-step case-study run") {
  auto params = paper_network_params();
  CareCascadeParams cascade;
  RandomStream s(14, 14);
  auto net = build_network(params, cascade, 1984, 0, s);
  net.check_invariants();
  for (int t = 1; t <= 30; ++t) {
    net.step = t;
    for (auto& a : net.agents) a.age += 1;
    tick_partnerships(net);
    demographic_step(net, params, s);
    reshuffle(net, params, s);
    net.check_invariants();
  }
}

TEST_CASE("metrics: empty network") {
  ContactNetwork net;
  const auto m = network_metrics(net);
  CHECK(m.mean_degree == 0.0);
  CHECK(m.steady_fraction == 0.0);
  CHECK(m.component_count == 0);
  CHECK(m.mean_path_length == 0.0);
}

TEST_CASE("metrics: a triangle") {
  auto net = tiny_network(3, {2, 2, 2});
  net.edges.push_back({0, 1, PartnershipKind::Casual, 0, 0});
  net.edges.push_back({1, 2, PartnershipKind::Casual, 0, 0});
  net.edges.push_back({0, 2, PartnershipKind::Steady, 0, 1});
  net.rebuild_derived();
  const auto m = network_metrics(net);
  CHECK(m.mean_degree == doctest::Approx(2.0));
  CHECK(m.mean_path_length == doctest::Approx(1.0));
  CHECK(m.component_count == 1);
  CHECK(m.largest_component_size == 3);
  CHECK(m.steady_fraction == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("metrics: realized degrees fit the target distribution") {
  const auto params = paper_network_params();
  CareCascadeParams cascade;
  RandomStream s(15, 15);
  const auto net = build_network(params, cascade, 1984, 0, s);
  const auto pmf = params.degree_spec.pmf();
  const auto n = static_cast<double>(net.agents.size());

  double stat = 0.0;
  int bins = 0;
  double exp_acc = 0.0;
  long long obs_acc = 0;
  const auto& hist = network_metrics(net).degree_histogram;
  for (int k = 0; k <= params.degree_spec.k_max; ++k) {
    exp_acc += pmf[static_cast<std::size_t>(k)] * n;
    obs_acc += k < static_cast<int>(hist.size()) ? hist[static_cast<std::size_t>(k)] : 0;
    if (exp_acc >= 5.0) {
      const double d = obs_acc - exp_acc;
      stat += d * d / exp_acc;
      ++bins;
      exp_acc = 0.0;
      obs_acc = 0;
    }
  }
  if (exp_acc > 0.0) {
    const double d = obs_acc - exp_acc;
    stat += d * d / exp_acc;
    ++bins;
  }
  CHECK(stat < chi_square_critical(0.01, bins - 1));
}

}  // TEST_SUITE
