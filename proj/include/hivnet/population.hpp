#pragma once

#include <cstdint>

#include "hivnet/random.hpp"

namespace hivnet {

/// Infection stages, in their only admissible order.
enum class Stage : std::uint8_t { Susceptible, PrimaryInfection, Asymptomatic, Aids };

const char* stage_name(Stage s);

struct Agent {
  std::uint32_t id = 0;
  int age = 0;
  Stage stage = Stage::Susceptible;
  int stage_elapsed = 0;
  int ap_expected_duration = 0;  // sampled at AP entry
  bool diagnosed = false;
  bool treated = false;
  bool treatment_success = false;
  double treatment_factor = 1.0;  // F_T, 1 unless treated
  int infection_step = -1;        // simulation step of seroconversion
  int aids_entry_step = -1;       // step AIDS was entered; removal due next step

  bool infected() const { return stage != Stage::Susceptible; }
};

/// Diagnosis / treatment cascade and stage-duration parameters.
struct CareCascadeParams {
  double p_diagnosed = 0.42;
  double p_treated_given_diagnosed = 0.81;
  double p_success_given_treated = 0.7;
  int haart_start_year = 1996;
  double ap_mean_success = 22.0;
  double ap_mean_failed = 13.0;
  double ap_mean_untreated = 13.0;  // the source gives no separate untreated figure
  int pi_duration = 1;              // one yearly step; the 3/9 month split lives in the transmission terms
  double treatment_factor_min = 0.1;
  double treatment_factor_max = 0.5;

  void validate() const;
};

/// Susceptible -> PrimaryInfection. Throws std::logic_error if the agent is
/// already infected.
void seroconvert(Agent& agent, int current_step);

/// Draws the diagnosis/treatment cascade and the AP duration for an agent
/// entering the asymptomatic stage. Treatment exists only from
/// haart_start_year on, and only after diagnosis. Draw order is fixed:
/// diagnosis, treatment (if eligible), success (if treated), treatment factor
/// (if treated), AP duration.
void apply_care_cascade(Agent& agent, int calendar_year, const CareCascadeParams& cascade,
                        RandomStream& stream);

struct ProgressResult {
  bool entered_asymptomatic = false;
  bool entered_aids = false;
};

/// One yearly tick of the vertex half of the progression operator: age
/// increments, the current-stage clock advances, and the stage moves on when
/// its expected duration is used up.
ProgressResult progress(Agent& agent, int calendar_year, const CareCascadeParams& cascade,
                        RandomStream& stream);

/// F_T of a transmitter: the sampled factor while treated, otherwise 1.
double effective_treatment_factor(const Agent& agent);

/// Treatment rollout at the introduction year: every diagnosed, untreated
/// asymptomatic agent draws the treatment arm of the cascade once. A
/// successful treatment re-draws the remaining AP duration from the success
/// mean. Without this pass the introduction year would only affect agents
/// whose stage transition happens afterwards, and the prevalent diagnosed
/// pool would stay untreated forever.
void apply_treatment_rollout(Agent& agent, const CareCascadeParams& cascade,
                             RandomStream& stream);

}  // namespace hivnet
