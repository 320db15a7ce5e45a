#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hivnet/engine.hpp"

namespace hivnet {

namespace {

constexpr char kMagic[4] = {'H', 'V', 'N', 'S'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = kFnvOffset;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (i * 8)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (i * 8)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (i * 8);
    return v;
  }
  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (i * 8);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    const char* p = take(n);
    return std::string(p, n);
  }
  bool exhausted() const { return pos_ == buf_.size(); }

 private:
  const char* take(std::size_t n) {
    if (pos_ + n > buf_.size()) {
      throw SnapshotCorruptError("snapshot truncated");
    }
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

void write_params(Writer& w, const ModelParams& p) {
  w.f64(p.network.degree_spec.gamma);
  w.i32(p.network.degree_spec.k_max);
  w.f64(p.network.degree_spec.p_zero);
  w.f64(p.network.degree_spec.norm_c);
  w.i32(p.network.n_zero);
  w.f64(p.network.p_steady);
  w.f64(p.network.p_casual_keep);
  w.f64(p.network.migration_fraction);
  w.i32(p.network.age_min);
  w.i32(p.network.age_max);
  w.i32(p.network.steady_duration_min);
  w.i32(p.network.steady_duration_max);
  w.i32(p.network.seed_max_elapsed);
  w.i32(p.network.pairing_retry_factor);

  w.f64(p.cascade.p_diagnosed);
  w.f64(p.cascade.p_treated_given_diagnosed);
  w.f64(p.cascade.p_success_given_treated);
  w.i32(p.cascade.haart_start_year);
  w.f64(p.cascade.ap_mean_success);
  w.f64(p.cascade.ap_mean_failed);
  w.f64(p.cascade.ap_mean_untreated);
  w.i32(p.cascade.pi_duration);
  w.f64(p.cascade.treatment_factor_min);
  w.f64(p.cascade.treatment_factor_max);

  w.f64(p.transmission.tp_pi1_receptive);
  w.f64(p.transmission.tp_pi1_insertive);
  w.f64(p.transmission.tp_pi2_receptive);
  w.f64(p.transmission.tp_pi2_insertive);
  w.f64(p.transmission.tp_ap_receptive);
  w.f64(p.transmission.tp_ap_insertive);
  w.f64(p.transmission.tp_aids);
  w.f64(p.transmission.f_p_steady);
  w.f64(p.transmission.actions_steady_mean);
  w.f64(p.transmission.actions_pi_first_mean);
  w.f64(p.transmission.actions_pi_rest_mean);
  w.f64(p.transmission.actions_casual);
  w.f64(p.transmission.pi_time_first);
  w.f64(p.transmission.pi_time_rest);

  w.u32(static_cast<std::uint32_t>(p.risk_table.rows.size()));
  for (const auto& r : p.risk_table.rows) {
    w.i32(r.year_from);
    w.i32(r.year_to);
    w.f64(r.negative);
    w.f64(r.positive);
  }

  w.i32(p.run.start_year);
  w.i32(p.run.end_year);
  w.i32(p.run.n_runs);
  w.i32(p.run.stats_interval);
  w.i32(p.run.initial_positive);
  w.u64(p.run.seed);
}

ModelParams read_params(Reader& r) {
  ModelParams p;
  p.network.degree_spec.gamma = r.f64();
  p.network.degree_spec.k_max = r.i32();
  p.network.degree_spec.p_zero = r.f64();
  p.network.degree_spec.norm_c = r.f64();
  p.network.n_zero = r.i32();
  p.network.p_steady = r.f64();
  p.network.p_casual_keep = r.f64();
  p.network.migration_fraction = r.f64();
  p.network.age_min = r.i32();
  p.network.age_max = r.i32();
  p.network.steady_duration_min = r.i32();
  p.network.steady_duration_max = r.i32();
  p.network.seed_max_elapsed = r.i32();
  p.network.pairing_retry_factor = r.i32();

  p.cascade.p_diagnosed = r.f64();
  p.cascade.p_treated_given_diagnosed = r.f64();
  p.cascade.p_success_given_treated = r.f64();
  p.cascade.haart_start_year = r.i32();
  p.cascade.ap_mean_success = r.f64();
  p.cascade.ap_mean_failed = r.f64();
  p.cascade.ap_mean_untreated = r.f64();
  p.cascade.pi_duration = r.i32();
  p.cascade.treatment_factor_min = r.f64();
  p.cascade.treatment_factor_max = r.f64();

  p.transmission.tp_pi1_receptive = r.f64();
  p.transmission.tp_pi1_insertive = r.f64();
  p.transmission.tp_pi2_receptive = r.f64();
  p.transmission.tp_pi2_insertive = r.f64();
  p.transmission.tp_ap_receptive = r.f64();
  p.transmission.tp_ap_insertive = r.f64();
  p.transmission.tp_aids = r.f64();
  p.transmission.f_p_steady = r.f64();
  p.transmission.actions_steady_mean = r.f64();
  p.transmission.actions_pi_first_mean = r.f64();
  p.transmission.actions_pi_rest_mean = r.f64();
  p.transmission.actions_casual = r.f64();
  p.transmission.pi_time_first = r.f64();
  p.transmission.pi_time_rest = r.f64();

  const std::uint32_t rows = r.u32();
  p.risk_table.rows.clear();
  for (std::uint32_t i = 0; i < rows; ++i) {
    RiskFactorTable::Row row{};
    row.year_from = r.i32();
    row.year_to = r.i32();
    row.negative = r.f64();
    row.positive = r.f64();
    p.risk_table.rows.push_back(row);
  }

  p.run.start_year = r.i32();
  p.run.end_year = r.i32();
  p.run.n_runs = r.i32();
  p.run.stats_interval = r.i32();
  p.run.initial_positive = r.i32();
  p.run.seed = r.u64();
  return p;
}

void write_stream(Writer& w, const RandomStream& s) {
  w.u64(s.seed());
  w.u64(s.stream_id());
  for (const auto word : s.state()) w.u64(word);
}

RandomStream read_stream(Reader& r) {
  const std::uint64_t seed = r.u64();
  const std::uint64_t id = r.u64();
  RandomStream s(seed, id);
  std::array<std::uint64_t, 4> st{};
  for (auto& word : st) word = r.u64();
  s.set_state(st);
  return s;
}

}  // namespace

struct CheckpointCodec {
  static void save(const Simulation& sim, std::ostream& out) {
    Writer w;
    write_params(w, sim.params_);
    w.u64(sim.master_seed_);
    w.u32(sim.run_index_);
    w.f64(sim.clock_);
    w.u64(sim.next_ordinal_);
    w.i32(sim.scheduled_through_);
    w.u8(sim.operators_registered_ ? 1 : 0);
    w.u8(sim.statistics_enabled_ ? 1 : 0);
    w.i32(sim.year_new_infections_);
    w.i32(sim.year_aids_diagnoses_);

    write_stream(w, sim.build_stream_);
    write_stream(w, sim.infection_stream_);
    write_stream(w, sim.progression_stream_);
    write_stream(w, sim.demography_stream_);
    write_stream(w, sim.stats_stream_);

    const ContactNetwork& net = sim.net_;
    w.i32(net.step);
    w.u32(net.next_agent_id);
    w.u64(net.agents.size());
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
      const Agent& a = net.agents[i];
      w.u32(a.id);
      w.i32(a.age);
      w.u8(static_cast<std::uint8_t>(a.stage));
      w.i32(a.stage_elapsed);
      w.i32(a.ap_expected_duration);
      w.u8(a.diagnosed ? 1 : 0);
      w.u8(a.treated ? 1 : 0);
      w.u8(a.treatment_success ? 1 : 0);
      w.f64(a.treatment_factor);
      w.i32(a.infection_step);
      w.i32(a.aids_entry_step);
      w.i32(net.target_degree[i]);
    }
    w.u64(net.edges.size());
    for (const auto& e : net.edges) {
      w.u32(e.a);
      w.u32(e.b);
      w.u8(static_cast<std::uint8_t>(e.kind));
      w.i32(e.elapsed);
      w.i32(e.expected_duration);
    }

    w.u64(sim.stats_.size());
    for (const auto& s : sim.stats_) {
      w.i32(s.calendar_year);
      w.i32(s.population);
      w.i32(s.new_infections);
      w.f64(s.incidence);
      w.i32(s.aids_diagnoses);
      w.f64(s.prevalence);
      w.f64(s.steady_fraction);
      w.f64(s.mean_degree);
    }

    w.u32(static_cast<std::uint32_t>(sim.custom_action_names_.size()));
    for (const auto& name : sim.custom_action_names_) w.str(name);

    auto events = sim.queue_;
    std::sort(events.begin(), events.end(), [](const ScheduledEvent& x, const ScheduledEvent& y) {
      return x.ordinal < y.ordinal;
    });
    w.u64(events.size());
    for (const auto& ev : events) {
      w.f64(ev.time);
      w.i32(ev.priority);
      w.u64(ev.ordinal);
      w.u32(ev.action_id);
    }

    const std::string& payload = w.bytes();
    out.write(kMagic, 4);
    Writer header;
    header.u32(kFormatVersion);
    header.u64(payload.size());
    out.write(header.bytes().data(), static_cast<std::streamsize>(header.bytes().size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    Writer footer;
    footer.u64(fnv1a(payload));
    out.write(footer.bytes().data(), static_cast<std::streamsize>(footer.bytes().size()));
    if (!out) throw SnapshotError("snapshot write failed");
  }

  static Simulation load(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
      throw SnapshotCorruptError("not a snapshot file (bad magic)");
    }
    char head[12];
    in.read(head, 12);
    if (!in) throw SnapshotCorruptError("snapshot truncated");
    std::uint32_t version = 0;
    for (int i = 0; i < 4; ++i) {
      version |= static_cast<std::uint32_t>(static_cast<unsigned char>(head[i])) << (i * 8);
    }
    if (version != kFormatVersion) {
      throw SnapshotVersionError("unsupported snapshot format version " + std::to_string(version));
    }
    std::uint64_t payload_len = 0;
    for (int i = 0; i < 8; ++i) {
      payload_len |= static_cast<std::uint64_t>(static_cast<unsigned char>(head[4 + i])) << (i * 8);
    }
    std::string payload(payload_len, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload_len));
    if (static_cast<std::uint64_t>(in.gcount()) != payload_len) {
      throw SnapshotCorruptError("snapshot truncated");
    }
    char sumbuf[8];
    in.read(sumbuf, 8);
    if (!in) throw SnapshotCorruptError("snapshot truncated (missing checksum)");
    std::uint64_t checksum = 0;
    for (int i = 0; i < 8; ++i) {
      checksum |= static_cast<std::uint64_t>(static_cast<unsigned char>(sumbuf[i])) << (i * 8);
    }
    if (checksum != fnv1a(payload)) {
      throw SnapshotCorruptError("snapshot checksum mismatch");
    }

    Reader r(std::move(payload));
    const ModelParams params = read_params(r);
    const std::uint64_t master_seed = r.u64();
    const std::uint32_t run_index = r.u32();

    Simulation sim(params, master_seed, run_index, Simulation::RestoreTag{});
    sim.clock_ = r.f64();
    sim.next_ordinal_ = r.u64();
    sim.scheduled_through_ = r.i32();
    sim.operators_registered_ = r.u8() != 0;
    sim.statistics_enabled_ = r.u8() != 0;
    sim.year_new_infections_ = r.i32();
    sim.year_aids_diagnoses_ = r.i32();

    sim.build_stream_ = read_stream(r);
    sim.infection_stream_ = read_stream(r);
    sim.progression_stream_ = read_stream(r);
    sim.demography_stream_ = read_stream(r);
    sim.stats_stream_ = read_stream(r);

    ContactNetwork& net = sim.net_;
    net.step = r.i32();
    net.next_agent_id = r.u32();
    const std::uint64_t n_agents = r.u64();
    net.agents.resize(n_agents);
    net.target_degree.resize(n_agents);
    for (std::uint64_t i = 0; i < n_agents; ++i) {
      Agent& a = net.agents[i];
      a.id = r.u32();
      a.age = r.i32();
      a.stage = static_cast<Stage>(r.u8());
      a.stage_elapsed = r.i32();
      a.ap_expected_duration = r.i32();
      a.diagnosed = r.u8() != 0;
      a.treated = r.u8() != 0;
      a.treatment_success = r.u8() != 0;
      a.treatment_factor = r.f64();
      a.infection_step = r.i32();
      a.aids_entry_step = r.i32();
      net.target_degree[i] = r.i32();
    }
    const std::uint64_t n_edges = r.u64();
    net.edges.resize(n_edges);
    for (std::uint64_t i = 0; i < n_edges; ++i) {
      Partnership& e = net.edges[i];
      e.a = r.u32();
      e.b = r.u32();
      e.kind = static_cast<PartnershipKind>(r.u8());
      e.elapsed = r.i32();
      e.expected_duration = r.i32();
    }
    net.rebuild_derived();

    const std::uint64_t n_stats = r.u64();
    sim.stats_.resize(n_stats);
    for (std::uint64_t i = 0; i < n_stats; ++i) {
      YearStats& s = sim.stats_[i];
      s.calendar_year = r.i32();
      s.population = r.i32();
      s.new_infections = r.i32();
      s.incidence = r.f64();
      s.aids_diagnoses = r.i32();
      s.prevalence = r.f64();
      s.steady_fraction = r.f64();
      s.mean_degree = r.f64();
    }

    const std::uint32_t n_actions = r.u32();
    sim.custom_action_names_.resize(n_actions);
    sim.custom_action_fns_.resize(n_actions);
    for (std::uint32_t i = 0; i < n_actions; ++i) {
      sim.custom_action_names_[i] = r.str();
    }

    const std::uint64_t n_events = r.u64();
    sim.queue_.clear();
    sim.queue_.reserve(n_events);
    for (std::uint64_t i = 0; i < n_events; ++i) {
      ScheduledEvent ev{};
      ev.time = r.f64();
      ev.priority = r.i32();
      ev.ordinal = r.u64();
      ev.action_id = r.u32();
      sim.queue_.push_back(ev);
    }
    std::make_heap(sim.queue_.begin(), sim.queue_.end(),
                   [](const ScheduledEvent& x, const ScheduledEvent& y) {
                     if (x.time != y.time) return x.time > y.time;
                     if (x.priority != y.priority) return x.priority > y.priority;
                     return x.ordinal > y.ordinal;
                   });
    if (!r.exhausted()) {
      throw SnapshotCorruptError("snapshot has trailing bytes");
    }
    return sim;
  }
};

void Simulation::save_checkpoint(std::ostream& out) const {
  CheckpointCodec::save(*this, out);
}

void Simulation::save_checkpoint_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open snapshot file for writing: " + path);
  save_checkpoint(out);
}

Simulation Simulation::restore_checkpoint(std::istream& in) {
  return CheckpointCodec::load(in);
}

Simulation Simulation::restore_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot file: " + path);
  return restore_checkpoint(in);
}

}  // namespace hivnet
