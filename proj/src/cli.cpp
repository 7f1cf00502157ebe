#include "runsort/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "runsort/analytic_permuton.hpp"
#include "runsort/empirical_measure.hpp"
#include "runsort/errors.hpp"
#include "runsort/exact_oracle.hpp"
#include "runsort/fsort.hpp"
#include "runsort/monte_carlo.hpp"
#include "runsort/random.hpp"

namespace runsort {

namespace {

using Json = nlohmann::ordered_json;

/// A reported invariant failed; exit code 1.
class InvariantViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Doubles in reports carry 12 significant digits.
double sig12(double v) { return std::stod(fmt::format("{:.12g}", v)); }

std::string decimal(double v) { return fmt::format("{:.12f}", v); }

Json summary_json(const SampleSummary& s) {
  return Json{{"mean", sig12(s.mean)},
              {"median", sig12(s.median)},
              {"stddev", sig12(s.stddev)},
              {"min", sig12(s.min)},
              {"max", sig12(s.max)}};
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt::format("{:.12g}", v[k]);
  return s;
}

struct Options {
  // Shared.
  std::string out_path;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  // plot
  std::string family = "inc";
  std::string perm;
  std::string svg_path;
  // mass / cdf
  double x1 = 0.0, x2 = 1.0, y1 = 0.0, y2 = 1.0;
  double x = 1.0, y = 1.0;
  bool components = false;
  // dsq / convergence
  std::size_t m = 64;
  std::size_t convergence_m = 100;
  std::size_t experiment_m = 20;
  double curve_y = 0.5;
  std::size_t corner_m = 512;
  std::size_t cell_m = 20;
  double buffer = 0.02;
  std::vector<std::size_t> n_list;
  // oracle / ptilde
  std::size_t max_n = 9;
  std::size_t ptilde_max_n = 30;
  std::size_t i = 0, j = 0;
  std::string mode = "recurrence";
  // curvemass / experiment
  std::size_t buckets = 20;
  std::vector<double> y_values;
  std::string histogram_path;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InvalidInput("cannot open output file " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_json(const Options& o, std::ostream& out, const Json& report) {
  Output sink(o.out_path, out);
  sink.stream() << report.dump(2) << '\n';
}

void cmd_plot(const Options& o, std::ostream& out) {
  const FamilyOracle& family = family_by_name(o.family);
  Json config;
  Permutation input = Permutation::identity(1);
  if (!o.perm.empty()) {
    input = Permutation::parse(o.perm);
  } else {
    if (o.n < 1) throw InvalidInput("--n must be >= 1");
    Rng rng = Rng::substream(o.seed, 0);
    input = sample_uniform(o.n, rng);
  }
  const FRunDecomposition runs = f_runs(input, family);
  const Permutation sorted = sort_blocks_by_min(input, runs.f_runs);
  std::vector<bool> is_min(input.size() + 1, false);
  for (const Block& b : runs.f_runs) {
    const auto v = input.values().subspan(b.start - 1, b.length);
    is_min[static_cast<std::size_t>(*std::min_element(v.begin(), v.end()))] = true;
  }
  Output sink(o.out_path, out);
  std::ostream& csv = sink.stream();
  csv << "position,value,is_f_run_start\n";
  for (std::size_t pos = 1; pos <= sorted.size(); ++pos) {
    const auto v = static_cast<std::size_t>(sorted.at(pos));
    csv << pos << ',' << v << ',' << (is_min[v] ? 1 : 0) << '\n';
  }
  if (!o.svg_path.empty()) {
    std::ofstream svg(o.svg_path, std::ios::binary);
    if (!svg) throw InvalidInput("cannot open svg file " + o.svg_path);
    constexpr double kSide = 600.0;
    const double n = static_cast<double>(sorted.size());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
    svg << "<rect width=\"600\" height=\"600\" fill=\"white\" stroke=\"black\"/>\n";
    for (std::size_t pos = 1; pos <= sorted.size(); ++pos) {
      const auto v = static_cast<std::size_t>(sorted.at(pos));
      svg << fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{}\" fill=\"{}\"/>\n", kSide * pos / n,
                         kSide - kSide * static_cast<double>(v) / n, is_min[v] ? "0.9" : "0.5",
                         is_min[v] ? "#c0392b" : "#2c3e50");
    }
    svg << "</svg>\n";
  }
}

void cmd_mass(const Options& o, std::ostream& out) {
  const RunsortPermuton permuton;
  const MassComponents m = permuton.rect_mass_components(Rectangle::make(o.x1, o.x2, o.y1, o.y2));
  Output sink(o.out_path, out);
  if (o.components) {
    sink.stream() << "total " << decimal(m.total()) << "\nac " << decimal(m.ac_mass) << "\nsingular "
                  << decimal(m.singular_mass) << '\n';
  } else {
    sink.stream() << decimal(m.total()) << '\n';
  }
}

void cmd_cdf(const Options& o, std::ostream& out) {
  const RunsortPermuton permuton;
  Output sink(o.out_path, out);
  sink.stream() << decimal(permuton.cdf(o.x, o.y)) << '\n';
}

void cmd_dsq(const Options& o, std::ostream& out) {
  if (o.n < 1) throw InvalidInput("--n must be >= 1");
  Rng rng = Rng::substream(o.seed, 0);
  const EmpiricalMeasure gamma(runsort(sample_uniform(o.n, rng)));
  const DistanceEstimate est = d_square_estimate(gamma, RunsortPermuton(), o.m, o.corner_m, o.threads);
  Json report{{"n", o.n},
              {"seed", o.seed},
              {"m", o.m},
              {"corner_m", o.corner_m},
              {"lower", sig12(est.lower)},
              {"upper", sig12(est.upper)},
              {"corner_sup", sig12(est.corner_sup)}};
  write_json(o, out, report);
}

void cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const ProbabilityTables t = enumerate_tables(o.n, o.threads, o.max_n);
  std::vector<std::string> problems;
  const std::size_t n = t.n;
  for (std::size_t a = 1; a <= n; ++a) {
    Rational row = 0, col = 0, qcol = 0;
    for (std::size_t b = 1; b <= n; ++b) {
      row += t.p(a, b);
      col += t.p(b, a);
      qcol += t.q(b, a);
    }
    if (row != 1) problems.push_back(fmt::format("row {} of p sums to {}", a, to_string(row)));
    if (col != 1) problems.push_back(fmt::format("column {} of p sums to {}", a, to_string(col)));
    if (qcol != Rational(n - a + 1) / n) problems.push_back(fmt::format("column {} of q sums to {}", a, to_string(qcol)));
  }
  if (n >= 2) {
    const ProbabilityTables smaller = enumerate_tables(n - 1, o.threads, o.max_n);
    for (const RecurrenceWitness& w : verify_recurrence(t, smaller)) {
      problems.push_back(fmt::format("recurrence fails at ({}, {}): {} vs {}", w.i, w.j, to_string(w.lhs), to_string(w.rhs)));
    }
  }
  Output sink(o.out_path, out);
  std::ostream& csv = sink.stream();
  csv << "i,j,p,q,p_prime\n";
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b <= n; ++b) {
      csv << a << ',' << b << ',' << to_string(t.p(a, b)) << ',' << to_string(t.q(a, b)) << ','
          << to_string(t.p_prime(a, b)) << '\n';
    }
  }
  if (!problems.empty()) {
    for (const auto& p : problems) err << "invariant violated: " << p << '\n';
    throw InvariantViolated("oracle tables violate their invariants");
  }
}

void cmd_ptilde(const Options& o, std::ostream& out) {
  std::string value;
  if (o.mode == "recurrence") {
    value = to_string(p_tilde_recurrence(o.n, o.i, o.j, o.ptilde_max_n));
  } else if (o.mode == "float") {
    value = fmt::format("{:.12g}", p_tilde_recurrence_float(o.n, o.i, o.j));
  } else if (o.mode == "s2") {
    value = to_string(p_tilde_formula_s2(o.n, o.i, o.j));
  } else if (o.mode == "full") {
    value = to_string(p_tilde_formula_full(o.n, o.i, o.j));
  } else {
    throw InvalidInput("unknown --mode " + o.mode + " (expected recurrence, float, s2 or full)");
  }
  Output sink(o.out_path, out);
  sink.stream() << value << '\n';
}

void cmd_convergence(const Options& o, std::ostream& out) {
  const ConvergenceReport rep =
      convergence_experiment(o.n_list, o.trials, o.seed, o.convergence_m, o.threads, o.corner_m, o.cell_m, o.buffer);
  Json rows = Json::array();
  for (const ConvergenceRow& r : rep.rows) {
    std::vector<double> lowers, uppers;
    for (const auto& e : r.estimates) {
      lowers.push_back(e.lower);
      uppers.push_back(e.upper);
    }
    rows.push_back(Json{{"n", r.n},
                        {"median_lower", sig12(r.median_lower)},
                        {"median_upper", sig12(r.median_upper)},
                        {"lower", summary_json(summarize(lowers))},
                        {"upper", summary_json(summarize(uppers))},
                        {"beyond_buffer_mass", sig12(r.beyond_buffer_mass)},
                        {"cell_max_difference", sig12(r.cell_max_difference)}});
  }
  Json report{{"command", "convergence"},
              {"config", {{"n-list", join(o.n_list)},
                          {"trials", o.trials},
                          {"seed", o.seed},
                          {"m", o.convergence_m},
                          {"corner-m", o.corner_m},
                          {"cell-m", o.cell_m},
                          {"buffer", o.buffer}}},
              {"rows", rows}};
  write_json(o, out, report);
}

void cmd_stability(const Options& o, std::ostream& out, std::ostream& err) {
  const StabilityReport rep = transposition_stability_test(o.n, o.trials, o.seed, o.threads);
  Json report{{"command", "stability"},
              {"config", {{"n", o.n}, {"trials", o.trials}, {"seed", o.seed}}},
              {"l_bound", sig12(rep.l_bound)},
              {"mass_bound", sig12(rep.mass_bound)},
              {"l_violations", rep.l_violations},
              {"mass_violations", rep.mass_violations},
              {"max_l_difference", rep.max_l_difference},
              {"max_mass_difference", sig12(rep.max_mass_difference)},
              {"runsort_equals_bar_fraction", sig12(static_cast<double>(rep.runsort_equals_bar) / rep.trials)},
              {"equality_floor", sig12(rep.equality_floor)},
              {"union_bound_floor", sig12(rep.union_bound_floor)}};
  write_json(o, out, report);
  if (rep.l_violations || rep.mass_violations) {
    err << "invariant violated: " << rep.l_violations << " L-bound and " << rep.mass_violations
        << " mass-bound violations\n";
    throw InvariantViolated("transposition bounds violated");
  }
}

void cmd_curvemass(const Options& o, std::ostream& out) {
  const CurveMassReport rep = curve_mass_experiment(o.n, o.trials, o.seed, o.buckets, o.curve_y, o.threads);
  Json density = Json::array(), target = Json::array();
  for (std::size_t b = 0; b < rep.buckets; ++b) {
    density.push_back(sig12(rep.bucket_density[b]));
    target.push_back(sig12(rep.bucket_target[b]));
  }
  Json report{{"command", "curvemass"},
              {"config", {{"n", o.n}, {"trials", o.trials}, {"seed", o.seed}, {"buckets", o.buckets}, {"y", o.curve_y}}},
              {"run_start_fraction", sig12(rep.run_start_fraction)},
              {"expected_run_start_fraction", sig12(rep.expected_run_start_fraction)},
              {"bucket_density", density},
              {"bucket_target", target},
              {"max_density_deviation", sig12(rep.max_density_deviation)},
              {"displacement", summary_json(summarize(rep.displacements))},
              {"displacement_samples", rep.displacements.size()},
              {"displacement_tolerance", sig12(rep.displacement_tolerance)},
              {"within_tolerance_fraction", sig12(rep.within_tolerance_fraction)},
              {"displacement_constant", sig12(rep.displacement_constant)},
              {"left_of_curve_fraction", sig12(rep.left_of_curve_fraction)}};
  write_json(o, out, report);
  if (!o.histogram_path.empty()) {
    std::ofstream csv(o.histogram_path, std::ios::binary);
    if (!csv) throw InvalidInput("cannot open histogram file " + o.histogram_path);
    csv << "bucket,y_low,y_high,density,target\n";
    for (std::size_t b = 0; b < rep.buckets; ++b) {
      csv << b << ',' << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g}", static_cast<double>(b) / rep.buckets,
                                     static_cast<double>(b + 1) / rep.buckets, rep.bucket_density[b],
                                     rep.bucket_target[b])
          << '\n';
    }
  }
}

void cmd_experiment(const Options& o, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.trials = o.trials;
  cfg.master_seed = o.seed;
  cfg.grid_m = o.experiment_m;
  cfg.y_values = o.y_values;
  cfg.family = o.family;
  cfg.buckets = o.buckets;
  cfg.threads = o.threads;
  const AggregateStats stats = run_experiment(cfg);
  std::vector<double> runs, max_runs;
  for (const auto& r : stats.records) {
    runs.push_back(static_cast<double>(r.num_runs));
    max_runs.push_back(static_cast<double>(r.max_run_length));
  }
  Json l_stats = Json::array();
  for (std::size_t k = 0; k < cfg.y_values.size(); ++k) {
    std::vector<double> ls;
    for (const auto& r : stats.records) ls.push_back(static_cast<double>(r.l_values[k]));
    const double y = cfg.y_values[k];
    Json entry = summary_json(summarize(ls));
    entry["y"] = y;
    entry["curve_prediction"] = sig12(static_cast<double>(cfg.n) * y * std::exp(1.0 - y));
    l_stats.push_back(entry);
  }
  Json histogram = Json::array();
  for (auto c : stats.run_start_histogram) histogram.push_back(c);
  Json report{{"command", "experiment"},
              {"config", {{"n", cfg.n},
                          {"trials", cfg.trials},
                          {"seed", cfg.master_seed},
                          {"m", cfg.grid_m},
                          {"y", join(cfg.y_values)},
                          {"family", cfg.family},
                          {"buckets", cfg.buckets}}},
              {"run_count", summary_json(summarize(runs))},
              {"max_run_length", summary_json(summarize(max_runs))},
              {"l_statistic", l_stats},
              {"run_start_histogram", histogram}};
  write_json(o, out, report);
}

template <typename T>
void parse_list(const std::string& text, std::vector<T>& into) {
  into.clear();
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream cell(item);
    T v;
    if (!(cell >> v)) throw InvalidInput("bad list element '" + item + "'");
    into.push_back(v);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"runsort_lab: runsort, F-sort and the runsort permuton"};
  app.require_subcommand(1);
  std::string n_list_text, y_text = "0.5";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_path, "Output path (default stdout)");
    sub->add_option("--threads", o.threads, "Worker threads (never changes output)")->check(CLI::PositiveNumber);
  };
  auto* plot = app.add_subcommand("plot", "Scaled plot of F-sort(pi) as CSV (and SVG)");
  plot->add_option("--n", o.n, "Permutation size");
  plot->add_option("--seed", o.seed, "Master seed");
  plot->add_option("--family", o.family, "inc, ddes or val");
  plot->add_option("--perm", o.perm, "Explicit input permutation instead of a sample");
  plot->add_option("--svg", o.svg_path, "Also write an SVG scatter plot");
  add_common(plot);

  auto* mass = app.add_subcommand("mass", "Mass of a rectangle under the runsort permuton");
  mass->add_option("--x1", o.x1);
  mass->add_option("--x2", o.x2);
  mass->add_option("--y1", o.y1);
  mass->add_option("--y2", o.y2);
  mass->add_flag("--components", o.components, "Print ac and singular parts");
  add_common(mass);

  auto* cdf = app.add_subcommand("cdf", "CDF of the runsort permuton at (x, y)");
  cdf->add_option("--x", o.x)->required();
  cdf->add_option("--y", o.y)->required();
  add_common(cdf);

  auto* dsq = app.add_subcommand("dsq", "Two-sided rectangle distance of runsort(pi) to the permuton");
  dsq->add_option("--n", o.n)->required();
  dsq->add_option("--seed", o.seed)->required();
  dsq->add_option("--m", o.m, "Grid resolution of the rectangle scan");
  dsq->add_option("--corner-m", o.corner_m, "Grid resolution of the corner bound");
  add_common(dsq);

  auto* oracle = app.add_subcommand("oracle", "Exact p, q, p' tables by enumerating S_n");
  oracle->add_option("--n", o.n)->required();
  oracle->add_option("--max-n", o.max_n, "Enumeration cap");
  add_common(oracle);

  auto* ptilde = app.add_subcommand("ptilde", "One value of p~_n(i, j)");
  ptilde->add_option("--n", o.n)->required();
  ptilde->add_option("--i", o.i)->required();
  ptilde->add_option("--j", o.j)->required();
  ptilde->add_option("--mode", o.mode, "recurrence, float, s2 or full");
  ptilde->add_option("--max-n", o.ptilde_max_n, "Exact-mode cap");
  add_common(ptilde);

  auto* convergence = app.add_subcommand("convergence", "Median distance to the permuton over sizes");
  convergence->add_option("--n-list", n_list_text, "Comma-separated sizes")->required();
  convergence->add_option("--trials", o.trials)->required();
  convergence->add_option("--seed", o.seed)->required();
  convergence->add_option("--m", o.convergence_m);
  convergence->add_option("--corner-m", o.corner_m);
  convergence->add_option("--cell-m", o.cell_m);
  convergence->add_option("--buffer", o.buffer);
  add_common(convergence);

  auto* stability = app.add_subcommand("stability", "Transposition bounds for runsort_bar");
  stability->add_option("--n", o.n)->required();
  stability->add_option("--trials", o.trials)->required();
  stability->add_option("--seed", o.seed)->required();
  add_common(stability);

  auto* curvemass = app.add_subcommand("curvemass", "Run-start mass along the curve");
  curvemass->add_option("--n", o.n)->required();
  curvemass->add_option("--trials", o.trials)->required();
  curvemass->add_option("--seed", o.seed)->required();
  curvemass->add_option("--buckets", o.buckets);
  curvemass->add_option("--y", o.curve_y);
  curvemass->add_option("--histogram-csv", o.histogram_path);
  add_common(curvemass);

  auto* experiment = app.add_subcommand("experiment", "Aggregate run and L statistics of F-sort(pi)");
  experiment->add_option("--n", o.n)->required();
  experiment->add_option("--trials", o.trials)->required();
  experiment->add_option("--seed", o.seed)->required();
  experiment->add_option("--m", o.experiment_m);
  experiment->add_option("--y", y_text, "Comma-separated y values");
  experiment->add_option("--family", o.family);
  experiment->add_option("--buckets", o.buckets);
  add_common(experiment);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (plot->parsed() && o.perm.empty() && (plot->count("--n") == 0 || plot->count("--seed") == 0)) {
      throw InvalidInput("plot needs --n and --seed (or --perm)");
    }
    if (!n_list_text.empty()) parse_list(n_list_text, o.n_list);
    parse_list(y_text, o.y_values);

    if (plot->parsed()) cmd_plot(o, out);
    else if (mass->parsed()) cmd_mass(o, out);
    else if (cdf->parsed()) cmd_cdf(o, out);
    else if (dsq->parsed()) cmd_dsq(o, out);
    else if (oracle->parsed()) cmd_oracle(o, out, err);
    else if (ptilde->parsed()) cmd_ptilde(o, out);
    else if (convergence->parsed()) cmd_convergence(o, out);
    else if (stability->parsed()) cmd_stability(o, out, err);
    else if (curvemass->parsed()) cmd_curvemass(o, out);
    else if (experiment->parsed()) cmd_experiment(o, out);
  } catch (const InvariantViolated& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariantViolated;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitResourceLimit;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace runsort
