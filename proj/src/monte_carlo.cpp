#include "runsort/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <new>

#include "parallel.hpp"
#include "runsort/analytic_permuton.hpp"
#include "runsort/fsort.hpp"
#include "runsort/random.hpp"

namespace runsort {

namespace {

constexpr std::size_t kMaxGrid = 4096;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Cell masses of a grid CDF, in the grid's numerator units, row-major m x m.
std::vector<std::int64_t> cell_masses(const GridCdf& grid) {
  std::vector<std::int64_t> cells(grid.m * grid.m);
  for (std::size_t b = 0; b < grid.m; ++b) {
    for (std::size_t c = 0; c < grid.m; ++c) cells[b * grid.m + c] = grid.rect_numerator(b, b + 1, c, c + 1);
  }
  return cells;
}

}  // namespace

AggregateStats AggregateStats::empty(std::size_t n, std::size_t m, std::size_t buckets) {
  AggregateStats s;
  s.n = n;
  s.m = m;
  s.buckets = buckets;
  s.count_grid.assign(m * m, 0);
  s.run_start_histogram.assign(buckets, 0);
  return s;
}

void AggregateStats::merge(const AggregateStats& other) {
  if (other.n != n || other.m != m || other.buckets != buckets) {
    throw InvalidInput("cannot merge statistics of different shapes");
  }
  for (std::size_t k = 0; k < count_grid.size(); ++k) count_grid[k] += other.count_grid[k];
  for (std::size_t k = 0; k < buckets; ++k) run_start_histogram[k] += other.run_start_histogram[k];
  std::vector<TrialRecord> merged;
  merged.reserve(records.size() + other.records.size());
  std::merge(records.begin(), records.end(), other.records.begin(), other.records.end(),
             std::back_inserter(merged), [](const TrialRecord& a, const TrialRecord& b) { return a.trial < b.trial; });
  records = std::move(merged);
}

void accumulate_trial(const ExperimentConfig& cfg, std::uint64_t trial, AggregateStats& into) {
  const FamilyOracle& family = family_by_name(cfg.family);
  Rng rng = Rng::substream(cfg.master_seed, trial);
  const Permutation perm = sample_uniform(cfg.n, rng);
  const FRunDecomposition runs = f_runs(perm, family);
  const Permutation sorted = sort_blocks_by_min(perm, runs.f_runs);

  TrialRecord rec;
  rec.trial = trial;
  rec.num_runs = runs.f_runs.size();
  for (const Block& b : runs.f_runs) {
    rec.max_run_length = std::max(rec.max_run_length, b.length);
    const auto v = perm.values().subspan(b.start - 1, b.length);
    ++into.run_start_histogram[into.bucket_of(static_cast<std::size_t>(*std::min_element(v.begin(), v.end())))];
  }
  const auto table = l_statistic_table(sorted);
  for (double y : cfg.y_values) rec.l_values.push_back(table[scaled_floor(y, cfg.n)]);

  const auto cells = cell_masses(EmpiricalMeasure(sorted).build_grid_cdf(cfg.grid_m));
  for (std::size_t k = 0; k < cells.size(); ++k) into.count_grid[k] += cells[k];

  const auto at = std::lower_bound(into.records.begin(), into.records.end(), trial,
                                   [](const TrialRecord& r, std::uint64_t t) { return r.trial < t; });
  into.records.insert(at, std::move(rec));
}

AggregateStats run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw InvalidInput("experiment requires n >= 1");
  if (cfg.trials < 1) throw InvalidInput("experiment requires trials >= 1");
  if (cfg.grid_m < 1 || cfg.buckets < 1) throw InvalidInput("grid and bucket counts must be >= 1");
  if (cfg.grid_m > kMaxGrid) throw ResourceLimit("grid resolution above " + std::to_string(kMaxGrid));
  for (double y : cfg.y_values) {
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("y values must lie in [0, 1]");
  }
  family_by_name(cfg.family);

  const unsigned workers = std::max(1u, cfg.threads);
  std::vector<AggregateStats> partial(workers, AggregateStats::empty(cfg.n, cfg.grid_m, cfg.buckets));
  std::vector<std::size_t> done(workers, 0);
  try {
    detail::parallel_chunks(cfg.trials, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        accumulate_trial(cfg, t, partial[w]);
        ++done[w];
      }
    });
  } catch (const std::bad_alloc&) {
    std::size_t completed = 0;
    for (std::size_t d : done) completed += d;
    throw ExperimentAborted("out of memory after " + std::to_string(completed) + " trials", completed > 0);
  }
  AggregateStats total = AggregateStats::empty(cfg.n, cfg.grid_m, cfg.buckets);
  for (const AggregateStats& p : partial) total.merge(p);
  return total;
}

SampleSummary summarize(std::vector<double> samples) {
  SampleSummary s;
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double v : samples) sq += (v - s.mean) * (v - s.mean);
  s.stddev = samples.size() > 1 ? std::sqrt(sq / static_cast<double>(samples.size() - 1)) : 0.0;
  s.min = *std::min_element(samples.begin(), samples.end());
  s.max = *std::max_element(samples.begin(), samples.end());
  s.median = median_of(std::move(samples));
  return s;
}

StabilityReport transposition_stability_test(std::size_t n, std::size_t trials, std::uint64_t seed,
                                             unsigned threads) {
  if (log_cap(n) < 1) throw InvalidInput("stability test requires floor(ln n) >= 1");
  StabilityReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  const double ln_n = std::log(static_cast<double>(n));
  rep.l_bound = 9.0 * ln_n;
  rep.mass_bound = 20.0 * ln_n / static_cast<double>(n);
  rep.equality_floor = 1.0 - std::pow(static_cast<double>(n), -std::log(ln_n) / 2.0);
  // Union bound over windows of length T = floor(ln n) + 1: P[long run] <= (n - T + 1) / T!.
  const double T = static_cast<double>(log_cap(n) + 1);
  rep.union_bound_floor = n + 1 > log_cap(n) + 1
                              ? std::max(0.0, 1.0 - std::exp(std::log(static_cast<double>(n) - T + 1.0) - std::lgamma(T + 1.0)))
                              : 1.0;

  struct Outcome {
    std::size_t l_diff = 0;
    std::size_t count_diff = 0;
    bool equal = false;
  };
  const auto outcomes = detail::parallel_map<Outcome>(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    const Permutation perm = sample_uniform(n, rng);
    const std::size_t i1 = rng.below(n), i2 = rng.below(n);
    const double y = rng.unit();
    std::size_t xa = rng.between(0, n), xb = rng.between(0, n);
    std::size_t ya = rng.between(0, n), yb = rng.between(0, n);
    if (xa > xb) std::swap(xa, xb);
    if (ya > yb) std::swap(ya, yb);

    std::vector<Value> swapped(perm.values().begin(), perm.values().end());
    std::swap(swapped[i1], swapped[i2]);
    const Permutation other = from_trusted(std::move(swapped));

    const Permutation bar = runsort_bar(perm);
    const Permutation bar_other = runsort_bar(other);
    const std::size_t threshold = scaled_floor(y, n);
    const std::size_t l1 = l_statistic_at(bar, threshold), l2 = l_statistic_at(bar_other, threshold);
    const std::size_t c1 = EmpiricalMeasure(bar).aligned_count(xa, xb, ya, yb);
    const std::size_t c2 = EmpiricalMeasure(bar_other).aligned_count(xa, xb, ya, yb);
    Outcome o;
    o.l_diff = l1 > l2 ? l1 - l2 : l2 - l1;
    o.count_diff = c1 > c2 ? c1 - c2 : c2 - c1;
    o.equal = run_stats(perm).max_run_length <= log_cap(n);
    return o;
  });
  for (const Outcome& o : outcomes) {
    const double mass_diff = static_cast<double>(o.count_diff) / static_cast<double>(n);
    if (static_cast<double>(o.l_diff) > rep.l_bound) ++rep.l_violations;
    if (mass_diff > rep.mass_bound) ++rep.mass_violations;
    rep.max_l_difference = std::max(rep.max_l_difference, o.l_diff);
    rep.max_mass_difference = std::max(rep.max_mass_difference, mass_diff);
    if (o.equal) ++rep.runsort_equals_bar;
  }
  return rep;
}

CurveMassReport curve_mass_experiment(std::size_t n, std::size_t trials, std::uint64_t seed,
                                      std::size_t buckets, double y, unsigned threads) {
  if (buckets < 10) throw InvalidInput("curve mass experiment requires at least 10 buckets");
  if (buckets > n) throw InvalidInput("more buckets than values");
  if (trials < 1) throw InvalidInput("curve mass experiment requires trials >= 1");
  if (!(y > 0.0 && y <= 1.0)) throw InvalidInput("y must lie in (0, 1]");
  CurveMassReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.buckets = buckets;
  rep.y = y;
  const double dn = static_cast<double>(n);
  const double centre = dn * y * std::exp(1.0 - y);
  const std::size_t probe = std::max<std::size_t>(1, scaled_ceil(y, n));
  rep.displacement_tolerance = 0.05 * dn;

  struct Outcome {
    std::vector<std::uint64_t> histogram;
    std::uint64_t starts = 0;
    std::uint64_t left_of_curve = 0;
    bool probe_is_start = false;
    double displacement = 0.0;
  };
  const auto outcomes = detail::parallel_map<Outcome>(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    const Permutation perm = sample_uniform(n, rng);
    const RunStats stats = run_stats(perm);
    const auto positions = runsort(perm).positions();
    Outcome o;
    o.histogram.assign(buckets, 0);
    for (std::size_t v = 1; v <= n; ++v) {
      if (!stats.run_start_flags[v - 1]) continue;
      ++o.starts;
      ++o.histogram[(v - 1) * buckets / n];
      const double pos = static_cast<double>(positions[v - 1]);
      if (pos < dn * curve_x(static_cast<double>(v) / dn) - 0.05 * dn) ++o.left_of_curve;
    }
    o.probe_is_start = stats.run_start_flags[probe - 1];
    o.displacement = static_cast<double>(positions[probe - 1]) - centre;
    return o;
  });

  std::vector<std::uint64_t> histogram(buckets, 0);
  std::uint64_t starts = 0, left = 0;
  for (const Outcome& o : outcomes) {
    for (std::size_t b = 0; b < buckets; ++b) histogram[b] += o.histogram[b];
    starts += o.starts;
    left += o.left_of_curve;
    if (o.probe_is_start) rep.displacements.push_back(o.displacement);
  }
  const double total_entries = dn * static_cast<double>(trials);
  rep.run_start_fraction = static_cast<double>(starts) / total_entries;
  rep.expected_run_start_fraction = (dn + 1.0) / (2.0 * dn);
  rep.left_of_curve_fraction = starts ? static_cast<double>(left) / static_cast<double>(starts) : 0.0;
  for (std::size_t b = 0; b < buckets; ++b) {
    // Values v with (v - 1) * buckets / n == b.
    const std::size_t first = (b * n + buckets - 1) / buckets + 1;
    const std::size_t last = ((b + 1) * n + buckets - 1) / buckets;
    const double height = static_cast<double>(last - first + 1) / dn;
    rep.bucket_density.push_back(static_cast<double>(histogram[b]) / total_entries / height);
    rep.bucket_target.push_back(1.0 - static_cast<double>(first - 1 + last) / (2.0 * dn));
    rep.max_density_deviation =
        std::max(rep.max_density_deviation, std::abs(rep.bucket_density.back() - rep.bucket_target.back()));
  }
  std::size_t within = 0;
  double worst = 0.0;
  for (double d : rep.displacements) {
    if (std::abs(d) <= rep.displacement_tolerance) ++within;
    worst = std::max(worst, std::abs(d));
  }
  if (!rep.displacements.empty()) {
    rep.within_tolerance_fraction = static_cast<double>(within) / static_cast<double>(rep.displacements.size());
  }
  const double ln_n = std::log(dn);
  rep.displacement_constant = worst / (std::sqrt(dn) * ln_n * ln_n);
  return rep;
}

ConvergenceReport convergence_experiment(const std::vector<std::size_t>& n_list, std::size_t trials,
                                         std::uint64_t seed, std::size_t m, unsigned threads,
                                         std::size_t corner_m, std::size_t cell_m, double buffer) {
  if (trials < 1) throw InvalidInput("convergence experiment requires trials >= 1");
  if (m < 2 || cell_m < 1) throw InvalidInput("grid resolutions must be positive (m >= 2)");
  ConvergenceReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.m = m;
  rep.corner_m = corner_m;
  rep.cell_m = cell_m;
  rep.buffer = buffer;
  const RunsortPermuton permuton;

  const std::vector<double> analytic = analytic_grid_cdf(permuton, cell_m);
  const std::size_t side = cell_m + 1;
  auto analytic_cell = [&](std::size_t b, std::size_t c) {
    return analytic[(b + 1) * side + c + 1] - analytic[b * side + c + 1] - analytic[(b + 1) * side + c] +
           analytic[b * side + c];
  };

  struct Outcome {
    DistanceEstimate estimate;
    double beyond = 0.0;
    std::vector<std::int64_t> cells;
  };
  for (std::size_t n : n_list) {
    if (n < 1) throw InvalidInput("sizes must be >= 1");
    const std::uint64_t size_seed = substream_seed(seed, n);
    const auto outcomes = detail::parallel_map<Outcome>(trials, threads, [&](std::size_t t) {
      Rng rng = Rng::substream(size_seed, t);
      const EmpiricalMeasure gamma(runsort(sample_uniform(n, rng)));
      Outcome o;
      o.estimate = d_square_estimate(gamma, permuton, m, corner_m, 1);
      const double dn = static_cast<double>(n);
      std::size_t beyond = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        const double x = static_cast<double>(i) / dn;
        if (x > curve_x(gamma.permutation().at(i) / dn) + buffer) ++beyond;
      }
      o.beyond = static_cast<double>(beyond) / dn;
      o.cells = cell_masses(gamma.build_grid_cdf(cell_m));
      return o;
    });
    ConvergenceRow row;
    row.n = n;
    std::vector<double> lowers, uppers;
    std::vector<std::int64_t> cells(cell_m * cell_m, 0);
    for (const Outcome& o : outcomes) {
      row.estimates.push_back(o.estimate);
      lowers.push_back(o.estimate.lower);
      uppers.push_back(o.estimate.upper);
      row.beyond_buffer_mass = std::max(row.beyond_buffer_mass, o.beyond);
      for (std::size_t k = 0; k < cells.size(); ++k) cells[k] += o.cells[k];
    }
    row.median_lower = median_of(lowers);
    row.median_upper = median_of(uppers);
    const double unit = static_cast<double>(n) * static_cast<double>(cell_m * cell_m) * static_cast<double>(trials);
    for (std::size_t b = 0; b < cell_m; ++b) {
      for (std::size_t c = 0; c < cell_m; ++c) {
        const double estimate = static_cast<double>(cells[b * cell_m + c]) / unit;
        row.cell_max_difference = std::max(row.cell_max_difference, std::abs(estimate - analytic_cell(b, c)));
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace runsort
