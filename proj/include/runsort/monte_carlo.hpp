#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "runsort/empirical_measure.hpp"
#include "runsort/errors.hpp"
#include "runsort/permutation.hpp"

namespace runsort {

/// Thrown when a worker runs out of memory mid-experiment.
class ExperimentAborted : public ResourceLimit {
 public:
  ExperimentAborted(const std::string& what, bool partial_results)
      : ResourceLimit(what), partial_results_(partial_results) {}
  bool partial_results() const { return partial_results_; }

 private:
  bool partial_results_;
};

struct ExperimentConfig {
  std::size_t n = 1000;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::size_t grid_m = 20;
  std::vector<double> y_values;
  std::string family = "inc";
  std::size_t buckets = 20;
  unsigned threads = 1;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::size_t num_runs = 0;
  std::size_t max_run_length = 0;
  /// One L value per configured y, on the sorted output.
  std::vector<std::size_t> l_values;
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Merge-only accumulator. All totals are integers, so merging is exact,
/// associative and commutative; records are kept sorted by trial index.
struct AggregateStats {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t buckets = 0;
  /// m x m cell masses of the sorted outputs in units of 1/(n m^2), summed over trials.
  std::vector<std::int64_t> count_grid;
  /// Run-start (F-run minimum) values per vertical bucket, summed over trials.
  std::vector<std::uint64_t> run_start_histogram;
  std::vector<TrialRecord> records;

  static AggregateStats empty(std::size_t n, std::size_t m, std::size_t buckets);
  void merge(const AggregateStats& other);
  friend bool operator==(const AggregateStats&, const AggregateStats&) = default;

  std::size_t trials() const { return records.size(); }
  /// Vertical bucket of value v in [1, n].
  std::size_t bucket_of(std::size_t value) const { return (value - 1) * buckets / n; }
};

/// Runs cfg.trials trials; trial t sorts sample_uniform(n, Rng::substream(seed, t))
/// with cfg.family. Output is independent of cfg.threads.
AggregateStats run_experiment(const ExperimentConfig& cfg);

/// Statistics of one trial, merged into `into`.
void accumulate_trial(const ExperimentConfig& cfg, std::uint64_t trial, AggregateStats& into);

struct SampleSummary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};
SampleSummary summarize(std::vector<double> samples);

struct StabilityReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double l_bound = 0.0;     // 9 ln n
  double mass_bound = 0.0;  // 20 ln n / n
  std::size_t l_violations = 0;
  std::size_t mass_violations = 0;
  std::size_t max_l_difference = 0;
  double max_mass_difference = 0.0;
  /// Trials where runsort(pi) == runsort_bar(pi).
  std::size_t runsort_equals_bar = 0;
  /// 1 - n^{-(ln ln n)/2}.
  double equality_floor = 0.0;
  /// 1 - (n - T + 1) / T! with T = floor(ln n) + 1; holds for every n.
  double union_bound_floor = 0.0;
};

/// Per trial: uniform pi, uniform transposition (possibly trivial), uniform y
/// and a uniform rectangle with corners on the n-grid; compares runsort_bar
/// outputs of pi and pi o (i1 i2). Throws InvalidInput if floor(ln n) < 1.
StabilityReport transposition_stability_test(std::size_t n, std::size_t trials, std::uint64_t seed,
                                             unsigned threads = 1);

struct CurveMassReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t buckets = 0;
  double y = 0.5;
  double run_start_fraction = 0.0;
  double expected_run_start_fraction = 0.0;  // (n + 1) / (2n)
  /// Run-start mass per bucket divided by bucket height, and 1 - (bucket centre).
  std::vector<double> bucket_density;
  std::vector<double> bucket_target;
  double max_density_deviation = 0.0;
  /// Position of value ceil(y n) in the output minus n y e^{1-y}, over trials
  /// where that value starts a run.
  std::vector<double> displacements;
  double displacement_tolerance = 0.0;  // 0.05 n
  double within_tolerance_fraction = 0.0;
  /// max |displacement| / (sqrt(n) (ln n)^2).
  double displacement_constant = 0.0;
  /// Fraction of run-start entries placed more than 0.05 n left of the curve.
  double left_of_curve_fraction = 0.0;
};

CurveMassReport curve_mass_experiment(std::size_t n, std::size_t trials, std::uint64_t seed,
                                      std::size_t buckets, double y = 0.5, unsigned threads = 1);

struct ConvergenceRow {
  std::size_t n = 0;
  std::vector<DistanceEstimate> estimates;  // one per trial
  double median_lower = 0.0;
  double median_upper = 0.0;
  /// Mass of points (i/n, pi_i/n) with x > curve_x(y) + buffer; max over trials.
  double beyond_buffer_mass = 0.0;
  /// Max over cells of |trial-averaged cell mass - R cell mass| at resolution cell_m.
  double cell_max_difference = 0.0;
};

struct ConvergenceReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t m = 0;
  std::size_t corner_m = 0;
  std::size_t cell_m = 0;
  double buffer = 0.0;
  std::vector<ConvergenceRow> rows;
};

/// Trial t at size n uses Rng::substream(substream_seed(seed, n), t).
ConvergenceReport convergence_experiment(const std::vector<std::size_t>& n_list, std::size_t trials,
                                         std::uint64_t seed, std::size_t m, unsigned threads = 1,
                                         std::size_t corner_m = 512, std::size_t cell_m = 20,
                                         double buffer = 0.02);

}  // namespace runsort
