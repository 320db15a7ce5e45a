#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hivnet/contact_network.hpp"

namespace hivnet {

/// Per-calendar-year outputs of one run.
struct YearStats {
  int calendar_year = 0;
  int population = 0;
  int new_infections = 0;
  double incidence = 0.0;  // new_infections / population
  int aids_diagnoses = 0;  // agents entering the AIDS stage this year
  double prevalence = 0.0;
  double steady_fraction = 0.0;
  double mean_degree = 0.0;

  bool operator==(const YearStats&) const = default;
};

YearStats collect_year_stats(const ContactNetwork& net, int new_infections, int new_aids,
                             int calendar_year);

struct FieldAggregate {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation across runs
  double min = 0.0;
  double max = 0.0;

  bool operator==(const FieldAggregate&) const = default;
};

/// Cross-run aggregate of every YearStats field for one calendar year.
struct YearAggregate {
  int calendar_year = 0;
  FieldAggregate population, new_infections, incidence, aids_diagnoses, prevalence,
      steady_fraction, mean_degree;

  bool operator==(const YearAggregate&) const = default;
};

std::vector<YearAggregate> aggregate_runs(const std::vector<std::vector<YearStats>>& runs);

/// User-supplied observed series (e.g. cohort incidence), strictly ascending
/// years, non-negative values.
struct ReferenceSeries {
  std::vector<std::pair<int, double>> points;
  void validate() const;
};

ReferenceSeries load_reference_csv(std::istream& in);

// Chi-square machinery (regularized incomplete gamma based, no tables).
double regularized_gamma_q(double a, double x);
double chi_square_cdf(double x, int df);
double chi_square_critical(double alpha, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double critical_value = 0.0;
  double alpha = 0.0;
  bool accepted = false;
  std::vector<int> skipped_years;  // reference value of zero: excluded with a warning
};

/// Pearson chi-square of a simulated series against the reference over the
/// overlapping years, expected = reference. Throws std::invalid_argument when
/// the year ranges do not overlap.
ChiSquareResult chi_square_compare(const std::vector<std::pair<int, double>>& simulated,
                                   const ReferenceSeries& reference, double alpha);

// CSV I/O. Fixed %.6f formatting for reals, LF line endings; parsing an
// exported file reproduces the written values exactly at that precision.
void export_csv(const std::vector<YearStats>& stats, std::ostream& out);
std::vector<YearStats> parse_stats_csv(std::istream& in);
void export_ensemble_csv(const std::vector<YearAggregate>& agg, std::ostream& out);
std::vector<YearAggregate> parse_ensemble_csv(std::istream& in);
std::string csv_string(const std::vector<YearStats>& stats);

}  // namespace hivnet
