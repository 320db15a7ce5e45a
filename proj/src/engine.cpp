#include "hivnet/engine.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "hivnet/transmission.hpp"

namespace hivnet {

namespace {

// Purpose tags for per-run substreams. Statistics own a stream even though
// the current collectors draw nothing, so adding a sampling consumer later
// cannot perturb the model trajectory.
constexpr std::uint64_t kPurposeBuild = 1;
constexpr std::uint64_t kPurposeInfection = 2;
constexpr std::uint64_t kPurposeProgression = 3;
constexpr std::uint64_t kPurposeDemography = 4;
constexpr std::uint64_t kPurposeStatistics = 5;

struct EventOrder {
  bool operator()(const ScheduledEvent& x, const ScheduledEvent& y) const {
    // std::push_heap builds a max-heap; invert for min-first execution.
    if (x.time != y.time) return x.time > y.time;
    if (x.priority != y.priority) return x.priority > y.priority;
    return x.ordinal > y.ordinal;
  }
};

}  // namespace

void RunParams::validate() const {
  if (start_year > end_year) throw std::invalid_argument("run.start_year must be <= end_year");
  if (n_runs < 1) throw std::invalid_argument("run.n_runs must be >= 1");
  if (stats_interval < 1) throw std::invalid_argument("run.stats_interval must be >= 1");
  if (initial_positive < 0) throw std::invalid_argument("run.initial_positive must be >= 0");
}

void ModelParams::validate() const {
  network.validate();
  cascade.validate();
  transmission.validate();
  risk_table.validate();
  run.validate();
  if (run.initial_positive > network.n_zero) {
    throw std::invalid_argument("run.initial_positive must be <= network.n_zero");
  }
}

Simulation::Simulation(const ModelParams& params, std::uint64_t master_seed,
                       std::uint32_t run_index)
    : params_(params), master_seed_(master_seed), run_index_(run_index) {
  params_.validate();
  derive_streams();
  net_ = build_network(params_.network, params_.cascade, params_.run.start_year,
                       params_.run.initial_positive, build_stream_);
}

Simulation::Simulation(const ModelParams& params, std::uint64_t master_seed,
                       std::uint32_t run_index, RestoreTag)
    : params_(params), master_seed_(master_seed), run_index_(run_index) {
  params_.validate();
  derive_streams();
}

void Simulation::derive_streams() {
  const RandomStream root(master_seed_, run_index_);
  build_stream_ = root.substream(kPurposeBuild);
  infection_stream_ = root.substream(kPurposeInfection);
  progression_stream_ = root.substream(kPurposeProgression);
  demography_stream_ = root.substream(kPurposeDemography);
  stats_stream_ = root.substream(kPurposeStatistics);
}

void Simulation::register_yearly_operators() {
  if (operators_registered_) {
    throw std::logic_error("register_yearly_operators: already registered");
  }
  operators_registered_ = true;
}

void Simulation::register_action(const std::string& name, std::function<void(Simulation&)> fn) {
  if (name.empty()) throw std::invalid_argument("register_action: empty name");
  for (std::size_t i = 0; i < custom_action_names_.size(); ++i) {
    if (custom_action_names_[i] == name) {
      custom_action_fns_[i] = std::move(fn);  // rebinding after restore
      return;
    }
  }
  custom_action_names_.push_back(name);
  custom_action_fns_.push_back(std::move(fn));
}

std::uint32_t Simulation::action_id_for(const std::string& name) const {
  if (name == "infection") return kActionInfection;
  if (name == "progression") return kActionProgression;
  if (name == "demographic") return kActionDemographic;
  if (name == "statistics") return kActionStatistics;
  for (std::size_t i = 0; i < custom_action_names_.size(); ++i) {
    if (custom_action_names_[i] == name) {
      return kActionCustomBase + static_cast<std::uint32_t>(i);
    }
  }
  throw std::invalid_argument("schedule_special: unknown action '" + name + "'");
}

void Simulation::schedule_special(double time, int priority, const std::string& action_name) {
  if (time < clock_) {
    throw std::invalid_argument("schedule_special: time is in the past");
  }
  push_event(time, priority, action_id_for(action_name));
}

void Simulation::push_event(double time, int priority, std::uint32_t action_id) {
  queue_.push_back({time, priority, next_ordinal_++, action_id});
  std::push_heap(queue_.begin(), queue_.end(), EventOrder{});
}

void Simulation::schedule_years_through(int last_step) {
  for (int t = scheduled_through_ + 1; t <= last_step; ++t) {
    if (t >= 1 && operators_registered_) {
      push_event(t, kPriorityInfection, kActionInfection);
      push_event(t, kPriorityProgression, kActionProgression);
      push_event(t, kPriorityDemographic, kActionDemographic);
    }
    if (statistics_enabled_ && t % params_.run.stats_interval == 0) {
      push_event(t, kPriorityStatistics, kActionStatistics);
    }
  }
  scheduled_through_ = std::max(scheduled_through_, last_step);
}

void Simulation::run_until(int end_year) {
  if (end_year < params_.run.start_year) {
    throw std::invalid_argument("run_until: end_year before start_year");
  }
  const int horizon = end_year - params_.run.start_year;
  schedule_years_through(horizon);
  while (!queue_.empty()) {
    const ScheduledEvent& top = queue_.front();
    if (top.time > static_cast<double>(horizon)) break;
    std::pop_heap(queue_.begin(), queue_.end(), EventOrder{});
    const ScheduledEvent ev = queue_.back();
    queue_.pop_back();
    clock_ = std::max(clock_, ev.time);
    try {
      execute(ev);
    } catch (const std::exception& e) {
      const int year = params_.run.start_year + static_cast<int>(std::floor(ev.time));
      throw std::runtime_error("year " + std::to_string(year) + ": " + e.what());
    }
  }
  clock_ = std::max(clock_, static_cast<double>(horizon));
}

void Simulation::execute(const ScheduledEvent& ev) {
  const int t = static_cast<int>(std::llround(std::floor(ev.time)));
  const int year = params_.run.start_year + t;
  switch (ev.action_id) {
    case kActionInfection: {
      net_.step = t;
      const auto infected =
          infection_step(net_, params_.transmission, params_.risk_table, year, t, infection_stream_);
      year_new_infections_ = static_cast<int>(infected.size());
      break;
    }
    case kActionProgression: {
      net_.step = t;
      int aids = 0;
      for (auto& agent : net_.agents) {
        const auto res = progress(agent, year, params_.cascade, progression_stream_);
        if (res.entered_aids) {
          agent.aids_entry_step = t;
          ++aids;
        }
      }
      if (year == params_.cascade.haart_start_year) {
        // Agents entering AP this very step already drew the treatment arm
        // in their transition cascade; the rollout covers everyone earlier.
        for (auto& agent : net_.agents) {
          if (agent.stage == Stage::Asymptomatic && agent.stage_elapsed == 0) continue;
          apply_treatment_rollout(agent, params_.cascade, progression_stream_);
        }
      }
      tick_partnerships(net_);
      year_aids_diagnoses_ = aids;
      break;
    }
    case kActionDemographic: {
      net_.step = t;
      demographic_step(net_, params_.network, demography_stream_);
      reshuffle(net_, params_.network, demography_stream_);
      break;
    }
    case kActionStatistics: {
      net_.step = t;
      stats_.push_back(collect_year_stats(net_, year_new_infections_, year_aids_diagnoses_, year));
      break;
    }
    default: {
      const std::size_t i = ev.action_id - kActionCustomBase;
      if (i >= custom_action_fns_.size()) {
        throw std::logic_error("execute: unknown action id");
      }
      if (!custom_action_fns_[i]) {
        throw std::runtime_error("execute: action '" + custom_action_names_[i] +
                                 "' was not rebound after restore");
      }
      custom_action_fns_[i](*this);
      break;
    }
  }
}

std::uint64_t Simulation::state_digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xFFU;
      h *= 1099511628211ULL;
    }
  };
  auto mix_double = [&](double d) { mix(std::bit_cast<std::uint64_t>(d)); };
  mix(static_cast<std::uint64_t>(net_.agents.size()));
  for (std::size_t i = 0; i < net_.agents.size(); ++i) {
    const Agent& a = net_.agents[i];
    mix(a.id);
    mix(static_cast<std::uint64_t>(a.age));
    mix(static_cast<std::uint64_t>(a.stage));
    mix(static_cast<std::uint64_t>(a.stage_elapsed));
    mix(static_cast<std::uint64_t>(a.ap_expected_duration));
    mix(static_cast<std::uint64_t>(a.diagnosed) | (static_cast<std::uint64_t>(a.treated) << 1) |
        (static_cast<std::uint64_t>(a.treatment_success) << 2));
    mix_double(a.treatment_factor);
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(a.infection_step)));
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(a.aids_entry_step)));
    mix(static_cast<std::uint64_t>(net_.target_degree[i]));
  }
  mix(static_cast<std::uint64_t>(net_.edges.size()));
  for (const auto& e : net_.edges) {
    mix(e.a);
    mix(e.b);
    mix(static_cast<std::uint64_t>(e.kind));
    mix(static_cast<std::uint64_t>(e.elapsed));
    mix(static_cast<std::uint64_t>(e.expected_duration));
  }
  for (const RandomStream* s :
       {&build_stream_, &infection_stream_, &progression_stream_, &demography_stream_}) {
    for (const auto w : s->state()) mix(w);
  }
  mix_double(clock_);
  mix(static_cast<std::uint64_t>(year_new_infections_));
  mix(static_cast<std::uint64_t>(year_aids_diagnoses_));
  return h;
}

EnsembleResult run_ensemble(const ModelParams& params, int n_runs, std::uint64_t master_seed,
                            int n_threads, const std::function<void(Simulation&)>& configure) {
  if (n_runs < 1) throw std::invalid_argument("run_ensemble: n_runs must be >= 1");
  params.validate();

  EnsembleResult result;
  result.n_runs = n_runs;
  result.runs.resize(static_cast<std::size_t>(n_runs));
  std::vector<std::string> failures(static_cast<std::size_t>(n_runs));

  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, n_runs);

  std::atomic<int> next_run{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next_run.fetch_add(1);
      if (idx >= n_runs) return;
      try {
        Simulation sim(params, master_seed, static_cast<std::uint32_t>(idx));
        sim.register_yearly_operators();
        if (configure) configure(sim);
        sim.run_until(params.run.end_year);
        result.runs[static_cast<std::size_t>(idx)] = sim.stats_log();
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(idx)] = e.what();
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::string failure_report;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      if (!failure_report.empty()) failure_report += "; ";
      failure_report += "run " + std::to_string(i) + ": " + failures[i];
    }
  }
  if (!failure_report.empty()) throw EnsembleError(failure_report);

  result.aggregate = aggregate_runs(result.runs);
  return result;
}

}  // namespace hivnet
