#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "wvsim/errors.hpp"
#include "wvsim/report_io.hpp"
#include "wvsim/sampling.hpp"

using namespace wvsim;

namespace {

ShotCounts synthetic_counts(const OutcomeDistribution& dist, std::uint64_t m) {
  // counts = m * probabilities; m must make every product integral.
  ShotCounts out;
  for (Setting s : kAllSettings) {
    if (!dist.has(s)) continue;
    ShotCounts::SettingCounts sc;
    sc.shots = m;
    for (const auto& [label, p] : dist.at(s).outcomes) {
      const double c = p * static_cast<double>(m);
      REQUIRE(std::abs(c - std::round(c)) < 1e-6);
      sc.counts.emplace_back(label, static_cast<std::uint64_t>(std::llround(c)));
    }
    out.by_setting[static_cast<std::size_t>(s)] = sc;
  }
  return out;
}

}  // namespace

TEST_CASE("sample: point mass lands every shot on one outcome") {
  OutcomeDistribution dist;
  dist.emplace(Setting::X).outcomes = {{"+", 1.0}, {"-", 0.0}, {"discard", 0.0}};
  SamplerConfig cfg;
  cfg.shots = {1000, 1000, 1000};
  const ShotCounts counts = sample(dist, cfg);
  CHECK(counts.at(Setting::X).count("+") == 1000);
  CHECK(counts.at(Setting::X).count("-") == 0);
}

TEST_CASE("sample: identical seeds give identical counts") {
  const ProtocolRun run = make_run(anomalous_benchmark(ModifiedWeak{1.0}));
  SamplerConfig cfg;
  cfg.seed = 77;
  cfg.shots = {5000, 5000, 5000};
  const ShotCounts a = sample(run.exact, cfg, 3);
  const ShotCounts b = sample(run.exact, cfg, 3);
  for (Setting s : kAllSettings) {
    REQUIRE(a.has(s));
    CHECK(a.at(s).counts == b.at(s).counts);
  }
  // A different repetition index is a different stream.
  const ShotCounts c = sample(run.exact, cfg, 4);
  bool any_diff = false;
  for (Setting s : kAllSettings)
    if (a.at(s).counts != c.at(s).counts) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("sample: million-shot frequencies sit inside 5-sigma binomial bands") {
  const ControlledTransform ct(Operator::identity(2), pauli_z());
  const Boundary b = Boundary::pure(ket_plus(), ket0());
  const OutcomeDistribution dist = joint_probabilities(ct, b);

  SamplerConfig cfg;
  cfg.seed = 2024;
  cfg.shots = {1000000, 1000000, 1000000};
  const ShotCounts counts = sample(dist, cfg);
  const double m = 1e6;
  auto check_band = [&](Setting s, const char* label, double p) {
    const double freq = static_cast<double>(counts.at(s).count(label)) / m;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / m);
    CHECK(std::abs(freq - p) <= 5.0 * sigma + 1e-9);
  };
  check_band(Setting::X, "+", 0.5);
  check_band(Setting::X, "-", 0.0);
  check_band(Setting::Y, "+i", 0.25);
  check_band(Setting::Y, "-i", 0.25);
}

TEST_CASE("sample rejects invalid distributions") {
  OutcomeDistribution dist;
  dist.emplace(Setting::X).outcomes = {{"+", 0.7}, {"-", 0.7}};
  SamplerConfig cfg;
  CHECK_THROWS_AS(sample(dist, cfg), std::invalid_argument);
}

TEST_CASE("estimate_from_counts: plug-in consistency on synthetic exact counts") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  const ProtocolRun run = make_run(spec);
  // Probabilities on this instance are multiples of 1/16.
  const ShotCounts counts = synthetic_counts(run.exact, 16000);
  const EstimateReport from_counts = estimate_from_counts(counts, spec);
  const EstimateReport exact = run_exact(spec);
  CHECK(std::abs(from_counts.estimate - exact.estimate) < 1e-12);
  CHECK(from_counts.shots_used[2].value() == 16000);
}

TEST_CASE("estimate_from_counts: seeded million-shot run lands within 5 stderr") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  const ProtocolRun run = make_run(spec);
  SamplerConfig cfg;
  cfg.seed = 5;
  cfg.shots = {1000000, 1000000, 1000000};
  int hits = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const ShotCounts counts = sample(run.exact, cfg, r);
    const EstimateReport rep = estimate_from_counts(counts, spec, &cfg);
    REQUIRE(rep.std_error.has_value());
    if (std::abs(rep.estimate - Complex{-2.0, 0.0}) < 5.0 * *rep.std_error) ++hits;
  }
  CHECK(hits >= reps - 1);
}

TEST_CASE("estimate_from_counts: all-discard counts raise a degenerate error") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  ShotCounts counts;
  for (Setting s : kAllSettings) {
    ShotCounts::SettingCounts sc;
    sc.shots = 100;
    const ProtocolRun run = make_run(spec);
    for (const auto& [label, p] : run.exact.at(s).outcomes)
      sc.counts.emplace_back(label, label == "discard" ? 100 : 0);
    counts.by_setting[static_cast<std::size_t>(s)] = sc;
  }
  CHECK_THROWS_AS(estimate_from_counts(counts, spec), DegenerateEstimatorError);
}

TEST_CASE("estimate_from_counts: missing settings are rejected") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  ShotCounts counts;
  CHECK_THROWS_AS(estimate_from_counts(counts, spec), std::invalid_argument);
}

TEST_CASE("stderr calibration: reported uncertainty tracks the empirical spread") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  const ProtocolRun run = make_run(spec);
  SamplerConfig cfg;
  cfg.seed = 11;
  cfg.shots = {10000, 10000, 10000};
  const int reps = 200;
  std::vector<Complex> estimates(reps);
  double mean_stderr = 0.0;
  for (int r = 0; r < reps; ++r) {
    const ShotCounts counts = sample(run.exact, cfg, r);
    const EstimateReport rep = estimate_from_counts(counts, spec, &cfg);
    estimates[r] = rep.estimate;
    mean_stderr += *rep.std_error;
  }
  mean_stderr /= reps;
  Complex mean{0.0, 0.0};
  for (const Complex& e : estimates) mean += e;
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (const Complex& e : estimates) var += std::norm(e - mean);
  const double emp_std = std::sqrt(var / (reps - 1));
  CHECK(emp_std / mean_stderr > 0.7);
  CHECK(emp_std / mean_stderr < 1.4);
}

TEST_CASE("bootstrap stderr roughly matches the delta method") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  const ProtocolRun run = make_run(spec);
  SamplerConfig cfg;
  cfg.seed = 12;
  cfg.shots = {20000, 20000, 20000};
  const ShotCounts counts = sample(run.exact, cfg, 0);
  const EstimateReport delta = estimate_from_counts(counts, spec, nullptr);
  SamplerConfig boot_cfg = cfg;
  boot_cfg.bootstrap = 200;
  const EstimateReport boot = estimate_from_counts(counts, spec, &boot_cfg);
  CHECK(*boot.std_error / *delta.std_error > 0.5);
  CHECK(*boot.std_error / *delta.std_error < 2.0);
}

TEST_CASE("consistency: error shrinks with the shot budget and stays calibrated") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  const ProtocolRun run = make_run(spec);
  const std::uint64_t budgets[4] = {1000, 10000, 100000, 1000000};
  double prev_median = 1e300;
  int within = 0, total = 0;
  for (std::uint64_t m : budgets) {
    SamplerConfig cfg;
    cfg.seed = 13;
    cfg.shots = {m, m, m};
    const int reps = (m >= 1000000) ? 20 : 60;
    std::vector<double> errors(reps);
    for (int r = 0; r < reps; ++r) {
      const ShotCounts counts = sample(run.exact, cfg, r);
      const EstimateReport rep = estimate_from_counts(counts, spec, &cfg);
      errors[r] = std::abs(rep.estimate - Complex{-2.0, 0.0});
      ++total;
      if (errors[r] <= 5.0 * *rep.std_error) ++within;
    }
    std::sort(errors.begin(), errors.end());
    const double median = errors[reps / 2];
    CHECK(median < prev_median);
    prev_median = median;
  }
  CHECK(static_cast<double>(within) / total >= 0.99);
}

TEST_CASE("bias_variance_sweep: determinism and row layout") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  SamplerConfig cfg;
  cfg.seed = 21;
  cfg.shots = {2000, 2000, 2000};
  cfg.repetitions = 10;
  const std::vector<double> grid{0.5, 0.8, 1.0};
  const auto rows1 = bias_variance_sweep(spec, grid, cfg);
  const auto rows2 = bias_variance_sweep(spec, grid, cfg);
  REQUIRE(rows1.size() == 3);
  CHECK(sweep_csv(rows1) == sweep_csv(rows2));
  for (std::size_t g = 0; g < 3; ++g) {
    CHECK(rows1[g].xi == doctest::Approx(grid[g]));
    CHECK(rows1[g].protocol == "modified_weak");
    CHECK(rows1[g].reps == 10);
  }

  // Single point, single repetition: one reproducible row.
  SamplerConfig one = cfg;
  one.repetitions = 1;
  const auto single = bias_variance_sweep(spec, {1.0}, one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].empirical_std == 0.0);
}

TEST_CASE("bias_variance_sweep: determinism across worker counts") {
  const ProtocolSpec spec = anomalous_benchmark(ConventionalWeak{0.1});
  SamplerConfig cfg;
  cfg.seed = 22;
  cfg.shots = {5000, 5000, 0};
  cfg.repetitions = 16;
  setenv("WVSIM_THREADS", "1", 1);
  const auto serial = bias_variance_sweep(spec, {0.1, 0.2}, cfg);
  setenv("WVSIM_THREADS", "4", 1);
  const auto parallel = bias_variance_sweep(spec, {0.1, 0.2}, cfg);
  unsetenv("WVSIM_THREADS");
  CHECK(sweep_csv(serial) == sweep_csv(parallel));
}

TEST_CASE("bias_variance_sweep: conventional spread grows as the coupling shrinks") {
  const ProtocolSpec spec = anomalous_benchmark(ConventionalWeak{0.1});
  SamplerConfig cfg;
  cfg.seed = 23;
  cfg.shots = {20000, 20000, 0};
  cfg.repetitions = 60;
  const auto rows = bias_variance_sweep(spec, {0.05, 0.1, 0.2}, cfg);
  CHECK(rows[0].empirical_std > rows[1].empirical_std);
  CHECK(rows[1].empirical_std > rows[2].empirical_std);
  CHECK(rows[0].shots_z == 0);  // conventional readout needs X and Y only
}

TEST_CASE("bias_variance_sweep: modified estimator is empirically unbiased") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  SamplerConfig cfg;
  cfg.seed = 24;
  cfg.shots = {20000, 20000, 20000};
  cfg.repetitions = 100;
  const auto rows = bias_variance_sweep(spec, {1.0}, cfg);
  const double band = 5.0 * rows[0].empirical_std / std::sqrt(100.0);
  CHECK(std::abs(rows[0].empirical_bias) <= band);
}

TEST_CASE("bias_variance_sweep rejects empty grids") {
  const ProtocolSpec spec = anomalous_benchmark(ModifiedWeak{1.0});
  SamplerConfig cfg;
  CHECK_THROWS_AS(bias_variance_sweep(spec, {}, cfg), std::invalid_argument);
}
