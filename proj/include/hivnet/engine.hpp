#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivnet/contact_network.hpp"
#include "hivnet/model_params.hpp"
#include "hivnet/random.hpp"
#include "hivnet/stats.hpp"

namespace hivnet {

struct SnapshotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SnapshotCorruptError : SnapshotError {
  using SnapshotError::SnapshotError;
};
struct SnapshotVersionError : SnapshotError {
  using SnapshotError::SnapshotError;
};
struct EnsembleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One queued operator invocation. Execution order is strictly lexicographic
/// by (time, priority, ordinal); the insertion ordinal is the final tiebreak.
struct ScheduledEvent {
  double time = 0.0;  // years since start_year
  int priority = 0;   // lower runs first at equal time
  std::uint64_t ordinal = 0;
  std::uint32_t action_id = 0;
};

inline constexpr std::uint32_t kActionInfection = 0;
inline constexpr std::uint32_t kActionProgression = 1;
inline constexpr std::uint32_t kActionDemographic = 2;
inline constexpr std::uint32_t kActionStatistics = 3;
inline constexpr std::uint32_t kActionCustomBase = 16;

inline constexpr int kPriorityInfection = 0;
inline constexpr int kPriorityProgression = 1;
inline constexpr int kPriorityDemographic = 2;
inline constexpr int kPriorityStatistics = 3;

/// One simulation run: network, per-purpose random streams, the
/// double-precision event queue and the accumulated yearly statistics.
/// Everything a run does is a pure function of (params, master_seed,
/// run_index).
class Simulation {
 public:
  Simulation(const ModelParams& params, std::uint64_t master_seed, std::uint32_t run_index);

  /// Arms the four yearly operators (infection, progression,
  /// demographic-reshuffling, statistics). Throws std::logic_error when
  /// called twice.
  void register_yearly_operators();

  /// Registers (or rebinds, e.g. after restore) a named special action.
  void register_action(const std::string& name, std::function<void(Simulation&)> fn);

  /// Queues a special event at a possibly fractional time (years since
  /// start_year). Throws std::invalid_argument for times before the clock or
  /// unknown action names.
  void schedule_special(double time, int priority, const std::string& action_name);

  /// Executes every pending event with time <= end_year - start_year.
  void run_until(int end_year);

  double clock() const { return clock_; }
  int start_year() const { return params_.run.start_year; }
  const ModelParams& params() const { return params_; }
  ContactNetwork& network() { return net_; }
  const ContactNetwork& network() const { return net_; }
  const std::vector<YearStats>& stats_log() const { return stats_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint32_t run_index() const { return run_index_; }
  const std::vector<ScheduledEvent>& pending_events() const { return queue_; }

  /// Drops the statistics operator. The model trajectory must be unaffected;
  /// statistics draw from their own stream.
  void disable_statistics() { statistics_enabled_ = false; }

  // Checkpointing. Snapshots are versioned, checksummed binary containers and
  // are written only between events.
  void save_checkpoint(std::ostream& out) const;
  void save_checkpoint_file(const std::string& path) const;
  static Simulation restore_checkpoint(std::istream& in);
  static Simulation restore_checkpoint_file(const std::string& path);

  /// FNV-1a digest over network, streams and counters; used to verify
  /// trajectory identity in tests.
  std::uint64_t state_digest() const;

 private:
  friend struct CheckpointCodec;
  struct RestoreTag {};
  Simulation(const ModelParams& params, std::uint64_t master_seed, std::uint32_t run_index,
             RestoreTag);

  void derive_streams();
  void push_event(double time, int priority, std::uint32_t action_id);
  void schedule_years_through(int last_step);
  void execute(const ScheduledEvent& ev);
  std::uint32_t action_id_for(const std::string& name) const;

  ModelParams params_;
  std::uint64_t master_seed_ = 0;
  std::uint32_t run_index_ = 0;

  ContactNetwork net_;
  RandomStream build_stream_, infection_stream_, progression_stream_, demography_stream_,
      stats_stream_;

  double clock_ = 0.0;
  std::uint64_t next_ordinal_ = 0;
  int scheduled_through_ = -1;
  bool operators_registered_ = false;
  bool statistics_enabled_ = true;
  int year_new_infections_ = 0;
  int year_aids_diagnoses_ = 0;

  std::vector<ScheduledEvent> queue_;  // min-heap
  std::vector<YearStats> stats_;
  std::vector<std::string> custom_action_names_;
  std::vector<std::function<void(Simulation&)>> custom_action_fns_;
};

/// Ensemble outcome: the aggregate plus every per-run log (run order is the
/// stream order, so the aggregate is identical however runs were scheduled).
struct EnsembleResult {
  int n_runs = 0;
  std::vector<std::vector<YearStats>> runs;
  std::vector<YearAggregate> aggregate;
};

/// Runs n_runs independent simulations with streams derived from
/// (master_seed, run index), optionally in parallel. configure, when set, is
/// applied to each run before it starts (snapshot hooks and similar). Per-run
/// failures are collected and re-thrown as one EnsembleError naming the runs.
EnsembleResult run_ensemble(const ModelParams& params, int n_runs, std::uint64_t master_seed,
                            int n_threads = 0,
                            const std::function<void(Simulation&)>& configure = {});

}  // namespace hivnet
