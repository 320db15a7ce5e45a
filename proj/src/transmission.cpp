#include "hivnet/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hivnet {

void TransmissionParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (const double tp : {tp_pi1_receptive, tp_pi1_insertive, tp_pi2_receptive, tp_pi2_insertive,
                          tp_ap_receptive, tp_ap_insertive, tp_aids, f_p_steady}) {
    if (!prob(tp)) throw std::invalid_argument("transmission: probability out of [0,1]");
  }
  for (const double m :
       {actions_steady_mean, actions_pi_first_mean, actions_pi_rest_mean, actions_casual}) {
    if (!(m >= 0.0)) throw std::invalid_argument("transmission: action mean must be >= 0");
  }
  if (!(pi_time_first >= 0.0 && pi_time_rest >= 0.0 &&
        std::abs(pi_time_first + pi_time_rest - 1.0) < 1e-12)) {
    throw std::invalid_argument("transmission: PI time split must sum to 1");
  }
}

RiskFactorTable RiskFactorTable::defaults() {
  RiskFactorTable t;
  t.rows = {
      {1985, 1986, 3.50, 2.80},
      {1987, 1987, 2.50, 1.61},  // averages of the adjacent years in the source
      {1988, 1991, 1.50, 0.42},
      {1992, 1995, 0.80, 0.88},
      {1996, 1996, 0.90, 0.78},
      {1997, 1999, 1.00, 0.70},
      {2000, 9999, 1.30, 1.30},
  };
  return t;
}

const RiskFactorTable::Row& RiskFactorTable::row_for(int year) const {
  if (rows.empty()) throw std::logic_error("risk factor table is empty");
  if (year < rows.front().year_from) return rows.front();
  for (const auto& row : rows) {
    if (year >= row.year_from && year <= row.year_to) return row;
  }
  return rows.back();
}

void RiskFactorTable::validate() const {
  if (rows.empty()) throw std::invalid_argument("risk_table must not be empty");
  int prev_to = rows.front().year_from - 1;
  for (const auto& row : rows) {
    if (row.year_from != prev_to + 1 || row.year_to < row.year_from) {
      throw std::invalid_argument("risk_table rows must be contiguous ascending year ranges");
    }
    if (!(row.negative > 0.0 && row.positive > 0.0)) {
      throw std::invalid_argument("risk_table factors must be > 0");
    }
    prev_to = row.year_to;
  }
}

double role_averaged_tp(StagePhase phase, const TransmissionParams& params) {
  switch (phase) {
    case StagePhase::Pi1: return 0.5 * (params.tp_pi1_receptive + params.tp_pi1_insertive);
    case StagePhase::Pi2: return 0.5 * (params.tp_pi2_receptive + params.tp_pi2_insertive);
    case StagePhase::Ap: return 0.5 * (params.tp_ap_receptive + params.tp_ap_insertive);
    case StagePhase::Aids: return params.tp_aids;
  }
  return 0.0;
}

double edge_risk_factor(const RiskFactorTable& table, int year) {
  return std::sqrt(table.positive_factor(year) * table.negative_factor(year));
}

double per_action_probability(double f_p, double f_r, double f_t, double tp, bool* clamped) {
  if (!(f_p >= 0.0 && f_r >= 0.0 && f_t >= 0.0)) {
    throw std::invalid_argument("per_action_probability: factors must be >= 0");
  }
  if (!(tp >= 0.0 && tp <= 1.0)) {
    throw std::invalid_argument("per_action_probability: tp out of [0,1]");
  }
  double p = f_p * f_r * (f_t * tp);
  if (p > 1.0) {
    p = 1.0;
    if (clamped) *clamped = true;
  } else if (clamped) {
    *clamped = false;
  }
  return p;
}

double steady_year_probability(double per_act, int n_actions) {
  return 1.0 - std::pow(1.0 - per_act, n_actions);
}

double steady_year_probability_pi(double per_act_first, int n_first, double per_act_rest,
                                  int n_rest) {
  return 1.0 - std::pow(1.0 - per_act_first, n_first) * std::pow(1.0 - per_act_rest, n_rest);
}

double per_year_edge_probability(const Agent& transmitter, const Agent& susceptible,
                                 const Partnership& edge, bool susceptible_has_steady, int year,
                                 const TransmissionParams& params, const RiskFactorTable& table,
                                 RandomStream& stream) {
  if (susceptible.stage != Stage::Susceptible) {
    throw std::logic_error("per_year_edge_probability: target is not susceptible");
  }
  if (transmitter.stage == Stage::Susceptible || transmitter.stage == Stage::Aids) {
    return 0.0;
  }
  const bool casual = edge.kind == PartnershipKind::Casual;
  const double f_p = (casual && susceptible_has_steady) ? params.f_p_steady : 1.0;
  const double f_r = edge_risk_factor(table, year);
  const double f_t = effective_treatment_factor(transmitter);

  if (transmitter.stage == Stage::PrimaryInfection) {
    const double p1 = per_action_probability(f_p, f_r, f_t, role_averaged_tp(StagePhase::Pi1, params));
    const double p2 = per_action_probability(f_p, f_r, f_t, role_averaged_tp(StagePhase::Pi2, params));
    if (casual) {
      return params.pi_time_first * p1 + params.pi_time_rest * p2;
    }
    const int n1 = sample_poisson(params.actions_pi_first_mean, stream);
    const int n2 = sample_poisson(params.actions_pi_rest_mean, stream);
    return steady_year_probability_pi(p1, n1, p2, n2);
  }

  // Asymptomatic transmitter.
  const double p = per_action_probability(f_p, f_r, f_t, role_averaged_tp(StagePhase::Ap, params));
  if (casual) {
    return p;
  }
  const int n = sample_poisson(params.actions_steady_mean, stream);
  return steady_year_probability(p, n);
}

double per_year_infection_probability(std::span<const double> edge_probabilities) {
  double survive = 1.0;
  for (const double p : edge_probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("per_year_infection_probability: probability out of [0,1]");
    }
    survive *= 1.0 - p;
  }
  return 1.0 - survive;
}

std::vector<std::uint32_t> infection_step(ContactNetwork& net, const TransmissionParams& params,
                                          const RiskFactorTable& table, int year, int sim_step,
                                          RandomStream& stream) {
  const std::size_t n = net.agents.size();
  struct Incident {
    std::uint32_t partner_index;
    std::uint32_t edge_index;
  };
  std::vector<std::vector<Incident>> adj(n);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto ia = static_cast<std::uint32_t>(net.index_of(net.edges[e].a));
    const auto ib = static_cast<std::uint32_t>(net.index_of(net.edges[e].b));
    adj[ia].push_back({ib, static_cast<std::uint32_t>(e)});
    adj[ib].push_back({ia, static_cast<std::uint32_t>(e)});
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [&](const Incident& x, const Incident& y) {
      return net.agents[x.partner_index].id < net.agents[y.partner_index].id;
    });
  }

  // Phase 1: decide against the pre-step snapshot (no state changes yet).
  std::vector<std::uint32_t> newly_infected;
  std::vector<double> edge_probs;
  for (std::size_t i = 0; i < n; ++i) {
    const Agent& target = net.agents[i];
    if (target.stage != Stage::Susceptible) continue;
    edge_probs.clear();
    for (const auto& inc : adj[i]) {
      const Agent& partner = net.agents[inc.partner_index];
      if (partner.stage == Stage::Susceptible || partner.stage == Stage::Aids) continue;
      edge_probs.push_back(per_year_edge_probability(partner, target, net.edges[inc.edge_index],
                                                     net.has_steady[i] != 0, year, params, table,
                                                     stream));
    }
    if (edge_probs.empty()) continue;
    const double p = per_year_infection_probability(edge_probs);
    if (p > 0.0 && stream.next_double() < p) {
      newly_infected.push_back(target.id);
    }
  }

  // Phase 2: apply all seroconversions.
  for (const auto id : newly_infected) {
    seroconvert(net.agent_by_id(id), sim_step);
  }
  return newly_infected;
}

}  // namespace hivnet
