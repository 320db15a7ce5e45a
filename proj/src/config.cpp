#include "hivnet/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hivnet/contact_network.hpp"

namespace hivnet {

ModelParams ModelParams::defaults() {
  ModelParams p;
  p.network.degree_spec = normalize_degree_distribution(1.6, 200, 0.01);
  p.network.p_steady = compute_p_steady(p.network.degree_spec);
  p.risk_table = RiskFactorTable::defaults();
  return p;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw ConfigError(what);
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail("config: '" + path + "' must be a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail("config: '" + path + "' must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    fail("config: '" + path + "' must be a non-negative integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    fail("config: '" + path + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail("config: '" + path + "' must be an object");
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

ModelParams apply_config(const json& doc) {
  ModelParams p = ModelParams::defaults();
  if (doc.is_null()) return p;
  if (!doc.is_object()) fail("config: top level must be a JSON object");

  double gamma = p.network.degree_spec.gamma;
  int k_max = p.network.degree_spec.k_max;
  double p_zero = p.network.degree_spec.p_zero;
  bool p_steady_pinned = false;
  double p_steady_value = 0.0;

  for (const auto& [section, body] : doc.items()) {
    if (section == "network") {
      require_object(body, section);
      for (const auto& [key, v] : body.items()) {
        const std::string path = section + "." + key;
        if (key == "n_zero") p.network.n_zero = get_int(v, path);
        else if (key == "gamma") gamma = get_number(v, path);
        else if (key == "k_max") k_max = get_int(v, path);
        else if (key == "p_zero") p_zero = get_number(v, path);
        else if (key == "p_steady") { p_steady_pinned = true; p_steady_value = get_number(v, path); }
        else if (key == "p_casual_keep") p.network.p_casual_keep = get_number(v, path);
        else if (key == "migration_fraction") p.network.migration_fraction = get_number(v, path);
        else if (key == "age_min") p.network.age_min = get_int(v, path);
        else if (key == "age_max") p.network.age_max = get_int(v, path);
        else if (key == "steady_duration_min") p.network.steady_duration_min = get_int(v, path);
        else if (key == "steady_duration_max") p.network.steady_duration_max = get_int(v, path);
        else if (key == "seed_max_elapsed") p.network.seed_max_elapsed = get_int(v, path);
        else fail("config: unknown key '" + path + "'");
      }
    } else if (section == "cascade") {
      require_object(body, section);
      for (const auto& [key, v] : body.items()) {
        const std::string path = section + "." + key;
        if (key == "p_diagnosed") p.cascade.p_diagnosed = get_number(v, path);
        else if (key == "p_treated_given_diagnosed") p.cascade.p_treated_given_diagnosed = get_number(v, path);
        else if (key == "p_success_given_treated") p.cascade.p_success_given_treated = get_number(v, path);
        else if (key == "haart_start_year") p.cascade.haart_start_year = get_int(v, path);
        else if (key == "ap_mean_success") p.cascade.ap_mean_success = get_number(v, path);
        else if (key == "ap_mean_failed") p.cascade.ap_mean_failed = get_number(v, path);
        else if (key == "ap_mean_untreated") p.cascade.ap_mean_untreated = get_number(v, path);
        else if (key == "treatment_factor_min") p.cascade.treatment_factor_min = get_number(v, path);
        else if (key == "treatment_factor_max") p.cascade.treatment_factor_max = get_number(v, path);
        else fail("config: unknown key '" + path + "'");
      }
    } else if (section == "transmission") {
      require_object(body, section);
      for (const auto& [key, v] : body.items()) {
        const std::string path = section + "." + key;
        if (key == "tp_pi1_receptive") p.transmission.tp_pi1_receptive = get_number(v, path);
        else if (key == "tp_pi1_insertive") p.transmission.tp_pi1_insertive = get_number(v, path);
        else if (key == "tp_pi2_receptive") p.transmission.tp_pi2_receptive = get_number(v, path);
        else if (key == "tp_pi2_insertive") p.transmission.tp_pi2_insertive = get_number(v, path);
        else if (key == "tp_ap_receptive") p.transmission.tp_ap_receptive = get_number(v, path);
        else if (key == "tp_ap_insertive") p.transmission.tp_ap_insertive = get_number(v, path);
        else if (key == "tp_aids") p.transmission.tp_aids = get_number(v, path);
        else if (key == "f_p_steady") p.transmission.f_p_steady = get_number(v, path);
        else if (key == "actions_steady_mean") p.transmission.actions_steady_mean = get_number(v, path);
        else if (key == "actions_pi_first_mean") p.transmission.actions_pi_first_mean = get_number(v, path);
        else if (key == "actions_pi_rest_mean") p.transmission.actions_pi_rest_mean = get_number(v, path);
        else if (key == "actions_casual") p.transmission.actions_casual = get_number(v, path);
        else fail("config: unknown key '" + path + "'");
      }
    } else if (section == "risk_table") {
      if (!body.is_array()) fail("config: 'risk_table' must be an array of rows");
      RiskFactorTable table;
      for (const auto& row : body) {
        require_object(row, "risk_table[]");
        RiskFactorTable::Row r{};
        bool have_from = false, have_to = false, have_neg = false, have_pos = false;
        for (const auto& [key, v] : row.items()) {
          const std::string path = "risk_table[]." + key;
          if (key == "from") { r.year_from = get_int(v, path); have_from = true; }
          else if (key == "to") { r.year_to = get_int(v, path); have_to = true; }
          else if (key == "negative") { r.negative = get_number(v, path); have_neg = true; }
          else if (key == "positive") { r.positive = get_number(v, path); have_pos = true; }
          else fail("config: unknown key '" + path + "'");
        }
        if (!have_from || !have_to || !have_neg || !have_pos) {
          fail("config: risk_table rows need from, to, negative, positive");
        }
        table.rows.push_back(r);
      }
      p.risk_table = table;
    } else if (section == "run") {
      require_object(body, section);
      for (const auto& [key, v] : body.items()) {
        const std::string path = section + "." + key;
        if (key == "start_year") p.run.start_year = get_int(v, path);
        else if (key == "end_year") p.run.end_year = get_int(v, path);
        else if (key == "runs" || key == "n_runs") p.run.n_runs = get_int(v, path);
        else if (key == "stats_interval") p.run.stats_interval = get_int(v, path);
        else if (key == "initial_positive") p.run.initial_positive = get_int(v, path);
        else if (key == "seed") p.run.seed = get_u64(v, path);
        else fail("config: unknown key '" + path + "'");
      }
    } else {
      fail("config: unknown section '" + section + "'");
    }
  }

  try {
    p.network.degree_spec = normalize_degree_distribution(gamma, k_max, p_zero);
    p.network.p_steady =
        p_steady_pinned ? p_steady_value : compute_p_steady(p.network.degree_spec);
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("config: ") + e.what());
  } catch (const std::domain_error& e) {
    fail(std::string("config: ") + e.what());
  }
  return p;
}

}  // namespace

ModelParams load_config_string(const std::string& text) {
  // An empty (or whitespace-only) document means "all defaults".
  bool blank = true;
  for (const char c : text) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
      blank = false;
      break;
    }
  }
  if (blank) return ModelParams::defaults();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: JSON parse error at line " +
                      std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
  return apply_config(doc);
}

ModelParams load_config(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_string(buf.str());
}

ModelParams load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  return load_config(in);
}

}  // namespace hivnet
