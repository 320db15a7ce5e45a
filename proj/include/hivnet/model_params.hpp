#pragma once

#include <cstdint>

#include "hivnet/contact_network.hpp"
#include "hivnet/population.hpp"
#include "hivnet/transmission.hpp"

namespace hivnet {

struct RunParams {
  int start_year = 1984;
  int end_year = 2006;
  int n_runs = 24;
  int stats_interval = 1;  // collect statistics every this many years
  int initial_positive = 571;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Every model constant in one validated record. defaults() reproduces the
/// Amsterdam MSM case study; an empty config file yields exactly this.
struct ModelParams {
  NetworkParams network;
  CareCascadeParams cascade;
  TransmissionParams transmission;
  RiskFactorTable risk_table;
  RunParams run;

  static ModelParams defaults();
  void validate() const;
};

}  // namespace hivnet
