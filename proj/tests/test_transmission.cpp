#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "hivnet/transmission.hpp"

using namespace hivnet;

namespace {

RiskFactorTable unit_risk_table() {
  RiskFactorTable t;
  t.rows = {{1900, 9999, 1.0, 1.0}};
  return t;
}

Agent make_agent(std::uint32_t id, Stage stage) {
  Agent a;
  a.id = id;
  a.age = 30;
  a.stage = stage;
  return a;
}

// Two susceptibles attached to one infected hub, or smaller variants, built
// directly so each micro-network is fully hand-checkable.
ContactNetwork micro_network(const std::vector<Stage>& stages,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                             const std::vector<PartnershipKind>& kinds) {
  ContactNetwork net;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    Agent a = make_agent(static_cast<std::uint32_t>(i), stages[i]);
    net.agents.push_back(a);
    net.target_degree.push_back(static_cast<int>(stages.size()));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Partnership p;
    p.a = edges[e].first;
    p.b = edges[e].second;
    p.kind = kinds[e];
    p.expected_duration = kinds[e] == PartnershipKind::Steady ? 2 : 0;
    net.edges.push_back(p);
  }
  net.rebuild_derived();
  return net;
}

}  // namespace

TEST_SUITE("transmission") {

TEST_CASE("role-averaged per-act probabilities") {
  TransmissionParams p;
  CHECK(role_averaged_tp(StagePhase::Aids, p) == 0.0);
  CHECK(role_averaged_tp(StagePhase::Ap, p) == doctest::Approx(0.0066).epsilon(1e-12));
  CHECK(role_averaged_tp(StagePhase::Pi1, p) == doctest::Approx(0.132).epsilon(1e-12));
  CHECK(role_averaged_tp(StagePhase::Pi2, p) == doctest::Approx(0.0066).epsilon(1e-12));
}

TEST_CASE("risk factor table lookups and the geometric-mean rule") {
  const auto table = RiskFactorTable::defaults();
  CHECK(table.negative_factor(1987) == doctest::Approx(2.50).epsilon(1e-12));
  CHECK(table.negative_factor(1987) ==
        doctest::Approx(0.5 * (table.negative_factor(1986) + table.negative_factor(1988)))
            .epsilon(1e-12));
  CHECK(edge_risk_factor(table, 1998) == doctest::Approx(std::sqrt(1.00 * 0.70)).epsilon(1e-12));
  CHECK(edge_risk_factor(table, 1985) == doctest::Approx(std::sqrt(3.50 * 2.80)).epsilon(1e-12));
  // Outside the table span: clamp to the boundary rows.
  CHECK(edge_risk_factor(table, 1984) == edge_risk_factor(table, 1985));
  CHECK(edge_risk_factor(table, 2035) == edge_risk_factor(table, 2000));
}

TEST_CASE("per-action probability") {
  CHECK(per_action_probability(1, 1, 1, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(per_action_probability(0.84, 1, 1, 0.0066) == doctest::Approx(0.005544).epsilon(1e-12));
  CHECK(per_action_probability(0.84, 3.13, 0.3, 0.0) == 0.0);
  bool clamped = false;
  CHECK(per_action_probability(10.0, 10.0, 1.0, 0.5, &clamped) == 1.0);
  CHECK(clamped);
  per_action_probability(1, 1, 1, 0.1, &clamped);
  CHECK_FALSE(clamped);
  CHECK_THROWS_AS(per_action_probability(-1, 1, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(per_action_probability(1, 1, 1, 1.5), std::invalid_argument);
}

TEST_CASE("closed-form yearly probabilities") {
  // Independent evaluation route: exp/log1p instead of pow.
  const double direct = steady_year_probability(0.0066, 30);
  const double via_log = 1.0 - std::exp(30.0 * std::log1p(-0.0066));
  CHECK(direct == doctest::Approx(via_log).epsilon(1e-12));
  CHECK(direct == doctest::Approx(0.1801683701570289).epsilon(1e-12));

  const double pi_casual = 0.25 * 0.132 + 0.75 * 0.0066;
  CHECK(pi_casual == doctest::Approx(0.03795).epsilon(1e-12));
}

TEST_CASE("steady-year probability is monotone in acts and per-act probability") {
  double prev = -1.0;
  for (int n = 0; n <= 60; ++n) {
    const double v = steady_year_probability(0.0066, n);
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1.0;
  for (double p = 0.0; p <= 0.3; p += 0.01) {
    const double v = steady_year_probability(p, 30);
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1.0;
  for (int n = 0; n <= 40; ++n) {
    const double v = steady_year_probability_pi(0.132, 8, 0.0066, n);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("per-year edge probability: degenerate transmitters") {
  TransmissionParams params;
  const auto table = unit_risk_table();
  RandomStream s(1, 1);
  const Agent susceptible = make_agent(0, Stage::Susceptible);
  Partnership casual{0, 1, PartnershipKind::Casual, 0, 0};

  CHECK(per_year_edge_probability(make_agent(1, Stage::Susceptible), susceptible, casual, false,
                                  2000, params, table, s) == 0.0);
  CHECK(per_year_edge_probability(make_agent(1, Stage::Aids), susceptible, casual, false, 2000,
                                  params, table, s) == 0.0);
  CHECK_THROWS_AS(per_year_edge_probability(make_agent(1, Stage::Asymptomatic),
                                            make_agent(0, Stage::Aids), casual, false, 2000,
                                            params, table, s),
                  std::logic_error);
}

TEST_CASE("per-year edge probability: closed-form cases") {
  TransmissionParams params;
  const auto table = unit_risk_table();
  RandomStream s(2, 2);
  const Agent susceptible = make_agent(0, Stage::Susceptible);
  const Agent ap = make_agent(1, Stage::Asymptomatic);
  const Agent pi = make_agent(1, Stage::PrimaryInfection);
  Partnership casual{0, 1, PartnershipKind::Casual, 0, 0};

  CHECK(per_year_edge_probability(ap, susceptible, casual, false, 2000, params, table, s) ==
        doctest::Approx(0.0066).epsilon(1e-12));
  CHECK(per_year_edge_probability(pi, susceptible, casual, false, 2000, params, table, s) ==
        doctest::Approx(0.03795).epsilon(1e-12));
}

TEST_CASE("partnership factor multiplies casual edges only") {
  TransmissionParams params;
  const auto table = unit_risk_table();
  const Agent susceptible = make_agent(0, Stage::Susceptible);
  const Agent ap = make_agent(1, Stage::Asymptomatic);
  Partnership casual{0, 1, PartnershipKind::Casual, 0, 0};
  Partnership steady{0, 1, PartnershipKind::Steady, 0, 2};

  RandomStream s1(3, 3);
  const double without = per_year_edge_probability(ap, susceptible, casual, false, 2000, params,
                                                   table, s1);
  RandomStream s2(3, 3);
  const double with = per_year_edge_probability(ap, susceptible, casual, true, 2000, params,
                                                table, s2);
  CHECK(with == doctest::Approx(0.84 * without).epsilon(1e-12));

  // Same stream state twice: the steady edge must be unaffected by the flag.
  RandomStream s3(4, 4);
  const double steady_without =
      per_year_edge_probability(ap, susceptible, steady, false, 2000, params, table, s3);
  RandomStream s4(4, 4);
  const double steady_with =
      per_year_edge_probability(ap, susceptible, steady, true, 2000, params, table, s4);
  CHECK(steady_without == steady_with);
}

TEST_CASE("combining per-edge probabilities") {
  CHECK(per_year_infection_probability({}) == 0.0);
  const std::vector<double> two{0.1, 0.2};
  CHECK(per_year_infection_probability(two) == doctest::Approx(0.28).epsilon(1e-12));
  const std::vector<double> sure{0.4, 1.0};
  CHECK(per_year_infection_probability(sure) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> bad{0.5, 1.2};
  CHECK_THROWS_AS(per_year_infection_probability(bad), std::invalid_argument);
}

TEST_CASE("combining is order independent") {
  RandomStream s(5, 5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> probs;
    const int n = 1 + static_cast<int>(s.next_below(6));
    for (int i = 0; i < n; ++i) probs.push_back(s.next_double());
    auto shuffled = probs;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(s.next_below(i))]);
    }
    CHECK(per_year_infection_probability(probs) ==
          doctest::Approx(per_year_infection_probability(shuffled)).epsilon(1e-12));
  }
}

TEST_CASE("infection step: fully susceptible network stays susceptible") {
  auto net = micro_network({Stage::Susceptible, Stage::Susceptible, Stage::Susceptible},
                           {{0, 1}, {1, 2}},
                           {PartnershipKind::Casual, PartnershipKind::Casual});
  TransmissionParams params;
  const auto table = unit_risk_table();
  RandomStream s(6, 6);
  const auto infected = infection_step(net, params, table, 2000, 1, s);
  CHECK(infected.empty());
}

TEST_CASE("infection step: casual AP line matches the closed form") {
  // S - I(AP) - S over casual edges, all factors 1: each susceptible is
  // infected with probability exactly 0.0066 per year.
  TransmissionParams params;
  const auto table = unit_risk_table();
  RandomStream s(7, 7);
  const int reps = 100000;
  long long infections = 0;
  auto net = micro_network({Stage::Susceptible, Stage::Asymptomatic, Stage::Susceptible},
                           {{0, 1}, {1, 2}},
                           {PartnershipKind::Casual, PartnershipKind::Casual});
  for (int r = 0; r < reps; ++r) {
    net.agents[0].stage = Stage::Susceptible;
    net.agents[2].stage = Stage::Susceptible;
    infections += static_cast<long long>(infection_step(net, params, table, 2000, 1, s).size());
  }
  const double p = 0.0066;
  const double freq = static_cast<double>(infections) / (2.0 * reps);
  const double se = std::sqrt(p * (1.0 - p) / (2.0 * reps));
  CHECK(std::abs(freq - p) < 3.0 * se);
}

TEST_CASE("infection step: steady AP pair matches the Poisson-marginal closed form") {
  // One AP transmitter with one steady partner. Over Poisson(30) action
  // counts the yearly infection probability marginalizes to
  // 1 - exp(-30 * 0.0066).
  TransmissionParams params;
  const auto table = unit_risk_table();
  RandomStream s(8, 8);
  const int reps = 100000;
  long long infections = 0;
  auto net = micro_network({Stage::Susceptible, Stage::Asymptomatic}, {{0, 1}},
                           {PartnershipKind::Steady});
  for (int r = 0; r < reps; ++r) {
    net.agents[0].stage = Stage::Susceptible;
    infections += static_cast<long long>(infection_step(net, params, table, 2000, 1, s).size());
  }
  const double expected = 1.0 - std::exp(-params.actions_steady_mean * 0.0066);
  const double freq = static_cast<double>(infections) / reps;
  const double se = std::sqrt(expected * (1.0 - expected) / reps);
  CHECK(std::abs(freq - expected) < 3.0 * se);
}

TEST_CASE("infection step: new infections do not transmit within the step") {
  // I(AP) - S(mid) - S(far): far's only infected path runs through mid, so
  // far can never seroconvert in the same step as mid.
  TransmissionParams params;
  params.tp_ap_receptive = 1.0;  // make mid infections frequent
  params.tp_ap_insertive = 1.0;
  const auto table = unit_risk_table();
  RandomStream s(9, 9);
  auto net = micro_network({Stage::Asymptomatic, Stage::Susceptible, Stage::Susceptible},
                           {{0, 1}, {1, 2}},
                           {PartnershipKind::Casual, PartnershipKind::Casual});
  int mid_infections = 0;
  for (int r = 0; r < 2000; ++r) {
    net.agents[1].stage = Stage::Susceptible;
    net.agents[2].stage = Stage::Susceptible;
    const auto infected = infection_step(net, params, table, 2000, 1, s);
    for (const auto id : infected) CHECK(id != 2);
    if (!infected.empty()) ++mid_infections;
  }
  CHECK(mid_infections > 0);
}

TEST_CASE("infection step: determinism") {
  TransmissionParams params;
  const auto table = unit_risk_table();
  auto make_net = [] {
    return micro_network({Stage::Susceptible, Stage::Asymptomatic, Stage::Susceptible,
                          Stage::PrimaryInfection},
                         {{0, 1}, {1, 2}, {2, 3}, {0, 3}},
                         {PartnershipKind::Casual, PartnershipKind::Steady,
                          PartnershipKind::Casual, PartnershipKind::Casual});
  };
  auto n1 = make_net();
  auto n2 = make_net();
  RandomStream s1(10, 10), s2(10, 10);
  for (int step = 1; step <= 20; ++step) {
    const auto i1 = infection_step(n1, params, table, 1990 + step, step, s1);
    const auto i2 = infection_step(n2, params, table, 1990 + step, step, s2);
    CHECK(i1 == i2);
  }
}

}  // TEST_SUITE
