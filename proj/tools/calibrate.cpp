// Ten independent batches per Monte Carlo criterion (ten times the trials the
// acceptance run uses); the worst batch is pinned in the fixtures file.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "criteria.hpp"

namespace {

constexpr int kBatches = 10;
constexpr std::uint64_t kCalibrationSeed = 0xca11b;

template <typename F>
nlohmann::ordered_json calibrate(double stated_tolerance, F&& statistic) {
  double worst = 0.0;
  nlohmann::ordered_json batches = nlohmann::ordered_json::array();
  for (int b = 0; b < kBatches; ++b) {
    const double v = statistic(kCalibrationSeed + b);
    batches.push_back(v);
    worst = std::max(worst, v);
  }
  return {{"tolerance", stated_tolerance}, {"calibrated", worst}, {"batches", batches}};
}

}  // namespace

int main(int argc, char** argv) {
  std::string path = "tests/fixtures/tolerances.json";
  CLI::App app{"Pins Monte Carlo tolerances"};
  app.add_option("--out", path);
  CLI11_PARSE(app, argc, argv);

  nlohmann::ordered_json out;
  out["batches"] = kBatches;
  out["seed"] = kCalibrationSeed;
  out["mean_l_deviation"] = calibrate(50.0, criteria::mean_l_deviation);
  std::cerr << "mean L done\n";
  out["run_start_fraction_deviation"] = calibrate(0.01, criteria::run_start_fraction_deviation);
  out["histogram_deviation"] = calibrate(0.02, criteria::histogram_deviation);
  std::cerr << "curve mass done\n";

  std::vector<runsort::ConvergenceReport> reports;
  for (int b = 0; b < kBatches; ++b) reports.push_back(criteria::convergence(kCalibrationSeed + b));
  auto pick = [&](double tolerance, auto field) {
    double worst = 0.0;
    nlohmann::ordered_json batches = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
      batches.push_back(field(r.rows.back()));
      worst = std::max(worst, field(r.rows.back()));
    }
    return nlohmann::ordered_json{{"tolerance", tolerance}, {"calibrated", worst}, {"batches", batches}};
  };
  out["median_lower_50000"] = pick(0.05, [](const runsort::ConvergenceRow& r) { return r.median_lower; });
  out["beyond_buffer_mass_50000"] = pick(0.01, [](const runsort::ConvergenceRow& r) { return r.beyond_buffer_mass; });
  int decreasing = 0;
  for (const auto& r : reports)
    decreasing += r.rows[0].median_lower > r.rows[1].median_lower && r.rows[1].median_lower > r.rows[2].median_lower;
  out["median_strictly_decreasing_batches"] = decreasing;

  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "cannot write " << path << '\n';
    return 1;
  }
  file << out.dump(2) << '\n';
  return 0;
}
