#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hivnet/contact_network.hpp"
#include "hivnet/population.hpp"
#include "hivnet/random.hpp"

namespace hivnet {

/// Transmitter stage phase for the per-act probability lookup. Primary
/// infection is split into its first three months and the remaining nine.
enum class StagePhase : std::uint8_t { Pi1, Pi2, Ap, Aids };

struct TransmissionParams {
  double tp_pi1_receptive = 0.22;
  double tp_pi1_insertive = 0.044;
  double tp_pi2_receptive = 0.011;
  double tp_pi2_insertive = 0.0022;
  double tp_ap_receptive = 0.011;
  double tp_ap_insertive = 0.0022;
  double tp_aids = 0.0;  // AIDS-stage agents have no contacts
  double f_p_steady = 0.84;
  double actions_steady_mean = 30.0;
  double actions_pi_first_mean = 8.0;
  double actions_pi_rest_mean = 22.0;
  double actions_casual = 1.0;
  double pi_time_first = 0.25;
  double pi_time_rest = 0.75;

  void validate() const;
};

/// Yearly relative risk-behavior factors for HIV-negative and HIV-positive
/// men. Years before the first row use the first row; years past the last row
/// use the last.
struct RiskFactorTable {
  struct Row {
    int year_from;
    int year_to;  // inclusive
    double negative;
    double positive;
  };
  std::vector<Row> rows;

  static RiskFactorTable defaults();
  const Row& row_for(int year) const;  // throws if the table is empty
  double negative_factor(int year) const { return row_for(year).negative; }
  double positive_factor(int year) const { return row_for(year).positive; }
  void validate() const;
};

/// Mean of the receptive and insertive per-act probabilities: the expectation
/// over the uniform role choice in each act.
double role_averaged_tp(StagePhase phase, const TransmissionParams& params);

/// Edge-level risk factor: geometric mean of the transmitter's positive-row
/// value and the susceptible's negative-row value for the year.
double edge_risk_factor(const RiskFactorTable& table, int year);

/// Per-action transmission probability F_P * F_R * (F_T * TP), clamped to
/// [0,1]. *clamped is set when clamping was needed (possible only with
/// out-of-range user parameter combinations).
double per_action_probability(double f_p, double f_r, double f_t, double tp,
                              bool* clamped = nullptr);

/// Closed-form yearly probability over a steady partnership with n acts.
double steady_year_probability(double per_act, int n_actions);
double steady_year_probability_pi(double per_act_first, int n_first, double per_act_rest,
                                  int n_rest);

/// Yearly transmission probability across one partnership. Action counts for
/// steady partnerships are drawn fresh (Poisson) on every call; casual
/// partnerships use the closed-form time-weighted single action. The
/// susceptible's partnership factor applies only on casual edges.
/// Throws std::logic_error if `susceptible` is not susceptible.
double per_year_edge_probability(const Agent& transmitter, const Agent& susceptible,
                                 const Partnership& edge, bool susceptible_has_steady, int year,
                                 const TransmissionParams& params, const RiskFactorTable& table,
                                 RandomStream& stream);

/// 1 - prod(1 - p) over the incident per-edge probabilities.
double per_year_infection_probability(std::span<const double> edge_probabilities);

/// Infection operator: evaluates every susceptible vertex against the
/// pre-step state snapshot, then applies all seroconversions at once, so new
/// infections never transmit within the step they occur. Per-vertex draws
/// follow ascending agent id; incident partners are visited in ascending
/// partner id. Returns the ids of the newly infected.
std::vector<std::uint32_t> infection_step(ContactNetwork& net, const TransmissionParams& params,
                                          const RiskFactorTable& table, int year, int sim_step,
                                          RandomStream& stream);

}  // namespace hivnet
