#pragma once

#include <cstdint>
#include <vector>

#include "hivnet/population.hpp"
#include "hivnet/random.hpp"

namespace hivnet {

enum class PartnershipKind : std::uint8_t { Steady, Casual };

/// Undirected partnership between two agents, endpoints stored as a < b.
struct Partnership {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  PartnershipKind kind = PartnershipKind::Casual;
  int elapsed = 0;
  int expected_duration = 0;  // steady partnerships only, drawn from DU(1,2)
};

struct NetworkParams {
  int n_zero = 2299;
  DegreeDistributionSpec degree_spec;
  double p_steady = 0.0;  // fraction of new partnerships typed steady
  double p_casual_keep = 0.2;
  double migration_fraction = 0.01;
  int age_min = 15;
  int age_max = 65;
  int steady_duration_min = 1;
  int steady_duration_max = 2;
  // Upper bound on the stage clock of initially seeded positives, in years
  // (-1 = uncapped). Seeded infections can be at most as old as the epidemic
  // itself at the start year; an uncapped uniform clock would spread the
  // seeds' AIDS arrivals flat from the first year instead of building up.
  int seed_max_elapsed = 4;
  // Pairing attempts allowed before leftover stubs are dropped for the step,
  // as a multiple of the initial stub count.
  int pairing_retry_factor = 100;

  void validate() const;
};

/// Expected steady probability for a new partnership: half the population
/// reporting a steady partner divided by the expected edge count, which
/// reduces to 0.5 / <k>. Throws if the mean degree is zero.
double compute_p_steady(const DegreeDistributionSpec& spec);

/// The evolving contact network. Agents are kept sorted by id; edges keep
/// insertion order. Draw-consuming passes always iterate these containers in
/// order, which makes whole-run trajectories reproducible.
class ContactNetwork {
 public:
  std::vector<Agent> agents;        // ascending id
  std::vector<int> target_degree;   // parallel to agents; sampled propensity
  std::vector<int> degree;          // parallel to agents; current edge count
  std::vector<std::uint8_t> has_steady;  // parallel to agents
  std::vector<Partnership> edges;
  int step = 0;
  std::uint32_t next_agent_id = 0;

  std::size_t index_of(std::uint32_t id) const;  // binary search; throws if absent
  Agent& agent_by_id(std::uint32_t id) { return agents[index_of(id)]; }
  const Agent& agent_by_id(std::uint32_t id) const { return agents[index_of(id)]; }
  bool has_edge(std::uint32_t a, std::uint32_t b) const;
  int free_stub_count() const;

  /// Recomputes degree and has_steady from the edge list.
  void rebuild_derived();

  /// Throws std::logic_error when any structural invariant is violated
  /// (self-loop, parallel edge, degree above target, two steady partners,
  /// dangling endpoint, bad steady duration).
  void check_invariants() const;
};

/// Configuration-model construction: n_zero agents with ages uniform in
/// [age_min, age_max] and degrees from the spec, stubs paired uniformly,
/// self-loops and parallel edges rejected. initial_positive_count agents are
/// seeded in the asymptomatic stage with the care cascade applied at
/// start_year and a uniformly elapsed stage clock.
ContactNetwork build_network(const NetworkParams& params, const CareCascadeParams& cascade,
                             int start_year, int initial_positive_count, RandomStream& stream);

/// Edge half of the progression operator: steady partnerships age by one year
/// up to their expected duration.
void tick_partnerships(ContactNetwork& net);

/// Demographic rules, applied in fixed order: remove agents past age_max,
/// remove agents that entered AIDS on an earlier step, remove a migration
/// sample of the survivors; drop incident edges of removed agents, expired
/// steady edges, and casual edges that fail the retention coin; then top the
/// population back up to n_zero with fresh susceptible agents.
void demographic_step(ContactNetwork& net, const NetworkParams& params, RandomStream& stream);

/// Re-pairs every free stub through the configuration model; new edges are
/// typed steady with probability p_steady subject to the one-steady-partner
/// constraint. Surviving edges are untouched.
void reshuffle(ContactNetwork& net, const NetworkParams& params, RandomStream& stream);

struct NetworkMetrics {
  std::vector<int> degree_histogram;
  double mean_degree = 0.0;
  double steady_fraction = 0.0;
  int component_count = 0;
  std::size_t largest_component_size = 0;
  double mean_path_length = 0.0;  // over the largest component
};

NetworkMetrics network_metrics(const ContactNetwork& net);

}  // namespace hivnet
