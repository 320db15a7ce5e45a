#include "hivnet/population.hpp"

#include <algorithm>
#include <stdexcept>

namespace hivnet {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Susceptible: return "susceptible";
    case Stage::PrimaryInfection: return "primary_infection";
    case Stage::Asymptomatic: return "asymptomatic";
    case Stage::Aids: return "aids";
  }
  return "unknown";
}

void CareCascadeParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_diagnosed)) throw std::invalid_argument("cascade.p_diagnosed out of [0,1]");
  if (!prob(p_treated_given_diagnosed)) {
    throw std::invalid_argument("cascade.p_treated_given_diagnosed out of [0,1]");
  }
  if (!prob(p_success_given_treated)) {
    throw std::invalid_argument("cascade.p_success_given_treated out of [0,1]");
  }
  if (!(ap_mean_success > 0.0)) throw std::invalid_argument("cascade.ap_mean_success must be > 0");
  if (!(ap_mean_failed > 0.0)) throw std::invalid_argument("cascade.ap_mean_failed must be > 0");
  if (!(ap_mean_untreated > 0.0)) {
    throw std::invalid_argument("cascade.ap_mean_untreated must be > 0");
  }
  if (pi_duration < 1) throw std::invalid_argument("cascade.pi_duration must be >= 1");
  if (!(treatment_factor_min > 0.0 && treatment_factor_min <= treatment_factor_max &&
        treatment_factor_max <= 1.0)) {
    throw std::invalid_argument("cascade.treatment_factor range must satisfy 0 < min <= max <= 1");
  }
}

void seroconvert(Agent& agent, int current_step) {
  if (agent.stage != Stage::Susceptible) {
    throw std::logic_error("seroconvert: agent is not susceptible");
  }
  agent.stage = Stage::PrimaryInfection;
  agent.stage_elapsed = 0;
  agent.infection_step = current_step;
}

void apply_care_cascade(Agent& agent, int calendar_year, const CareCascadeParams& cascade,
                        RandomStream& stream) {
  agent.diagnosed = stream.bernoulli(cascade.p_diagnosed);
  agent.treated = false;
  agent.treatment_success = false;
  agent.treatment_factor = 1.0;
  if (agent.diagnosed && calendar_year >= cascade.haart_start_year) {
    agent.treated = stream.bernoulli(cascade.p_treated_given_diagnosed);
    if (agent.treated) {
      agent.treatment_success = stream.bernoulli(cascade.p_success_given_treated);
      agent.treatment_factor =
          sample_uniform_real(cascade.treatment_factor_min, cascade.treatment_factor_max, stream);
    }
  }
  double ap_mean = cascade.ap_mean_untreated;
  if (agent.treated) {
    ap_mean = agent.treatment_success ? cascade.ap_mean_success : cascade.ap_mean_failed;
  }
  agent.ap_expected_duration = sample_poisson(ap_mean, stream);
}

ProgressResult progress(Agent& agent, int calendar_year, const CareCascadeParams& cascade,
                        RandomStream& stream) {
  ProgressResult result;
  agent.age += 1;
  switch (agent.stage) {
    case Stage::Susceptible:
    case Stage::Aids:
      break;
    case Stage::PrimaryInfection:
      if (agent.stage_elapsed < cascade.pi_duration) {
        agent.stage_elapsed += 1;
      } else {
        agent.stage = Stage::Asymptomatic;
        agent.stage_elapsed = 0;
        apply_care_cascade(agent, calendar_year, cascade, stream);
        result.entered_asymptomatic = true;
      }
      break;
    case Stage::Asymptomatic:
      if (agent.stage_elapsed < agent.ap_expected_duration) {
        agent.stage_elapsed += 1;
      } else {
        agent.stage = Stage::Aids;
        agent.stage_elapsed = 0;
        result.entered_aids = true;
      }
      break;
  }
  return result;
}

double effective_treatment_factor(const Agent& agent) {
  return agent.treated ? agent.treatment_factor : 1.0;
}

void apply_treatment_rollout(Agent& agent, const CareCascadeParams& cascade,
                             RandomStream& stream) {
  if (agent.stage != Stage::Asymptomatic || !agent.diagnosed || agent.treated) return;
  agent.treated = stream.bernoulli(cascade.p_treated_given_diagnosed);
  if (!agent.treated) return;
  agent.treatment_success = stream.bernoulli(cascade.p_success_given_treated);
  agent.treatment_factor =
      sample_uniform_real(cascade.treatment_factor_min, cascade.treatment_factor_max, stream);
  if (agent.treatment_success) {
    const int fresh = sample_poisson(cascade.ap_mean_success, stream);
    agent.ap_expected_duration = std::max(agent.stage_elapsed, fresh);
  }
}

}  // namespace hivnet
