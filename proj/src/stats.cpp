#include "hivnet/stats.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hivnet {

YearStats collect_year_stats(const ContactNetwork& net, int new_infections, int new_aids,
                             int calendar_year) {
  YearStats s;
  s.calendar_year = calendar_year;
  s.population = static_cast<int>(net.agents.size());
  s.new_infections = new_infections;
  s.incidence = s.population > 0
                    ? static_cast<double>(new_infections) / static_cast<double>(s.population)
                    : 0.0;
  s.aids_diagnoses = new_aids;
  int infected = 0;
  for (const auto& a : net.agents) {
    if (a.infected()) ++infected;
  }
  s.prevalence =
      s.population > 0 ? static_cast<double>(infected) / static_cast<double>(s.population) : 0.0;
  if (!net.edges.empty()) {
    std::size_t steady = 0;
    for (const auto& e : net.edges) {
      if (e.kind == PartnershipKind::Steady) ++steady;
    }
    s.steady_fraction = static_cast<double>(steady) / static_cast<double>(net.edges.size());
  }
  s.mean_degree = s.population > 0 ? 2.0 * static_cast<double>(net.edges.size()) /
                                         static_cast<double>(s.population)
                                   : 0.0;
  return s;
}

std::vector<YearAggregate> aggregate_runs(const std::vector<std::vector<YearStats>>& runs) {
  std::vector<YearAggregate> out;
  if (runs.empty()) return out;
  const std::size_t n_years = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != n_years) {
      throw std::invalid_argument("aggregate_runs: runs have different lengths");
    }
  }
  const auto n_runs = static_cast<double>(runs.size());
  out.resize(n_years);
  for (std::size_t y = 0; y < n_years; ++y) {
    YearAggregate& agg = out[y];
    agg.calendar_year = runs.front()[y].calendar_year;
    for (const auto& run : runs) {
      if (run[y].calendar_year != agg.calendar_year) {
        throw std::invalid_argument("aggregate_runs: calendar years misaligned across runs");
      }
    }
    auto fill = [&](FieldAggregate& f, auto getter) {
      double mean = 0.0;
      f.min = std::numeric_limits<double>::infinity();
      f.max = -std::numeric_limits<double>::infinity();
      for (const auto& run : runs) {
        const double v = getter(run[y]);
        mean += v;
        f.min = std::min(f.min, v);
        f.max = std::max(f.max, v);
      }
      mean /= n_runs;
      double var = 0.0;
      for (const auto& run : runs) {
        const double d = getter(run[y]) - mean;
        var += d * d;
      }
      f.mean = mean;
      f.sd = std::sqrt(var / n_runs);
    };
    fill(agg.population, [](const YearStats& s) { return static_cast<double>(s.population); });
    fill(agg.new_infections,
         [](const YearStats& s) { return static_cast<double>(s.new_infections); });
    fill(agg.incidence, [](const YearStats& s) { return s.incidence; });
    fill(agg.aids_diagnoses,
         [](const YearStats& s) { return static_cast<double>(s.aids_diagnoses); });
    fill(agg.prevalence, [](const YearStats& s) { return s.prevalence; });
    fill(agg.steady_fraction, [](const YearStats& s) { return s.steady_fraction; });
    fill(agg.mean_degree, [](const YearStats& s) { return s.mean_degree; });
  }
  return out;
}

void ReferenceSeries::validate() const {
  int prev_year = std::numeric_limits<int>::min();
  for (const auto& [year, value] : points) {
    if (year <= prev_year) {
      throw std::invalid_argument("reference series: years must be strictly increasing");
    }
    if (!(value >= 0.0)) {
      throw std::invalid_argument("reference series: values must be >= 0");
    }
    prev_year = year;
  }
}

ReferenceSeries load_reference_csv(std::istream& in) {
  ReferenceSeries series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "year,value") continue;  // optional header
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("reference csv line " + std::to_string(line_no) +
                               ": expected 'year,value'");
    }
    try {
      const int year = std::stoi(line.substr(0, comma));
      const double value = std::stod(line.substr(comma + 1));
      series.points.emplace_back(year, value);
    } catch (const std::exception&) {
      throw std::runtime_error("reference csv line " + std::to_string(line_no) +
                               ": cannot parse 'year,value'");
    }
  }
  series.validate();
  return series;
}

namespace {

// Regularized incomplete gamma P(a, x) by series expansion; valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized incomplete gamma Q(a, x) by continued fraction (modified
// Lentz); valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("regularized_gamma_q: requires a > 0, x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_cdf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return 1.0 - regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_critical(double alpha, int df) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("chi_square_critical: alpha must be in (0,1)");
  }
  if (df < 1) throw std::invalid_argument("chi_square_critical: df must be >= 1");
  double lo = 0.0;
  double hi = 1.0;
  while (regularized_gamma_q(0.5 * df, 0.5 * hi) > alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_gamma_q(0.5 * df, 0.5 * mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ChiSquareResult chi_square_compare(const std::vector<std::pair<int, double>>& simulated,
                                   const ReferenceSeries& reference, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("chi_square_compare: alpha must be in (0,1)");
  }
  ChiSquareResult result;
  result.alpha = alpha;
  bool any_overlap = false;
  for (const auto& [year, sim_value] : simulated) {
    for (const auto& [ref_year, ref_value] : reference.points) {
      if (ref_year != year) continue;
      any_overlap = true;
      if (ref_value == 0.0) {
        result.skipped_years.push_back(year);
      } else {
        const double d = sim_value - ref_value;
        result.statistic += d * d / ref_value;
        result.degrees_of_freedom += 1;
      }
      break;
    }
  }
  if (!any_overlap) {
    throw std::invalid_argument("chi_square_compare: year ranges do not overlap");
  }
  if (result.degrees_of_freedom == 0) {
    throw std::invalid_argument(
        "chi_square_compare: every overlapping year has a zero reference value");
  }
  result.critical_value = chi_square_critical(alpha, result.degrees_of_freedom);
  result.accepted = result.statistic < result.critical_value;
  return result;
}

namespace {

constexpr const char* kStatsHeader =
    "year,population,new_infections,incidence,aids_diagnoses,prevalence,steady_fraction,"
    "mean_degree";

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

const char* const kEnsembleFields[] = {"population",     "new_infections", "incidence",
                                       "aids_diagnoses", "prevalence",     "steady_fraction",
                                       "mean_degree"};
const char* const kAggSuffixes[] = {"_mean", "_sd", "_min", "_max"};

std::string ensemble_header() {
  std::string h = "year";
  for (const auto* field : kEnsembleFields) {
    for (const auto* suffix : kAggSuffixes) {
      h += ',';
      h += field;
      h += suffix;
    }
  }
  return h;
}

}  // namespace

void export_csv(const std::vector<YearStats>& stats, std::ostream& out) {
  out << kStatsHeader << '\n';
  for (const auto& s : stats) {
    out << s.calendar_year << ',' << s.population << ',' << s.new_infections << ','
        << fixed6(s.incidence) << ',' << s.aids_diagnoses << ',' << fixed6(s.prevalence) << ','
        << fixed6(s.steady_fraction) << ',' << fixed6(s.mean_degree) << '\n';
  }
}

std::string csv_string(const std::vector<YearStats>& stats) {
  std::ostringstream out;
  export_csv(stats, out);
  return out.str();
}

std::vector<YearStats> parse_stats_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("stats csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kStatsHeader) throw std::runtime_error("stats csv: unexpected header");
  std::vector<YearStats> stats;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8) {
      throw std::runtime_error("stats csv line " + std::to_string(line_no) + ": expected 8 fields");
    }
    try {
      YearStats s;
      s.calendar_year = std::stoi(fields[0]);
      s.population = std::stoi(fields[1]);
      s.new_infections = std::stoi(fields[2]);
      s.incidence = std::stod(fields[3]);
      s.aids_diagnoses = std::stoi(fields[4]);
      s.prevalence = std::stod(fields[5]);
      s.steady_fraction = std::stod(fields[6]);
      s.mean_degree = std::stod(fields[7]);
      stats.push_back(s);
    } catch (const std::exception&) {
      throw std::runtime_error("stats csv line " + std::to_string(line_no) + ": parse error");
    }
  }
  return stats;
}

void export_ensemble_csv(const std::vector<YearAggregate>& agg, std::ostream& out) {
  out << ensemble_header() << '\n';
  for (const auto& row : agg) {
    out << row.calendar_year;
    for (const FieldAggregate* f : {&row.population, &row.new_infections, &row.incidence,
                                    &row.aids_diagnoses, &row.prevalence, &row.steady_fraction,
                                    &row.mean_degree}) {
      out << ',' << fixed6(f->mean) << ',' << fixed6(f->sd) << ',' << fixed6(f->min) << ','
          << fixed6(f->max);
    }
    out << '\n';
  }
}

std::vector<YearAggregate> parse_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ensemble csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != ensemble_header()) throw std::runtime_error("ensemble csv: unexpected header");
  std::vector<YearAggregate> agg;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 1 + 7 * 4) {
      throw std::runtime_error("ensemble csv line " + std::to_string(line_no) +
                               ": expected 29 fields");
    }
    try {
      YearAggregate row;
      row.calendar_year = std::stoi(fields[0]);
      std::size_t i = 1;
      for (FieldAggregate* f : {&row.population, &row.new_infections, &row.incidence,
                                &row.aids_diagnoses, &row.prevalence, &row.steady_fraction,
                                &row.mean_degree}) {
        f->mean = std::stod(fields[i++]);
        f->sd = std::stod(fields[i++]);
        f->min = std::stod(fields[i++]);
        f->max = std::stod(fields[i++]);
      }
      agg.push_back(row);
    } catch (const std::exception&) {
      throw std::runtime_error("ensemble csv line " + std::to_string(line_no) + ": parse error");
    }
  }
  return agg;
}

}  // namespace hivnet
