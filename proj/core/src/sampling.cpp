#include "wvsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "wvsim/errors.hpp"

namespace wvsim {

std::uint64_t RandomStream::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
    : key_(mix(seed)) {
  for (std::uint64_t t : tags) key_ = mix(key_ ^ mix(t));
}

std::uint64_t RandomStream::next_u64() { return mix(key_ ^ mix(++counter_)); }

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

unsigned thread_count() {
  if (const char* env = std::getenv("WVSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

std::uint64_t ShotCounts::SettingCounts::count(const std::string& label) const {
  for (const auto& [l, c] : counts)
    if (l == label) return c;
  throw std::out_of_range("no counted outcome labeled '" + label + "'");
}

const ShotCounts::SettingCounts& ShotCounts::at(Setting s) const {
  const auto& slot = by_setting[static_cast<std::size_t>(s)];
  if (!slot) throw std::out_of_range(std::string("setting ") + setting_name(s) + " not counted");
  return *slot;
}

bool ShotCounts::has(Setting s) const {
  return by_setting[static_cast<std::size_t>(s)].has_value();
}

OutcomeDistribution ShotCounts::frequencies() const {
  OutcomeDistribution dist;
  for (Setting s : kAllSettings) {
    if (!has(s)) continue;
    const SettingCounts& sc = at(s);
    SettingDist& sd = dist.emplace(s);
    sd.outcomes.reserve(sc.counts.size());
    const double m = static_cast<double>(sc.shots);
    for (const auto& [label, c] : sc.counts)
      sd.outcomes.emplace_back(label, static_cast<double>(c) / m);
  }
  return dist;
}

namespace {

ShotCounts::SettingCounts draw_multinomial(const SettingDist& sd, std::uint64_t shots,
                                           RandomStream& stream) {
  const std::size_t k = sd.outcomes.size();
  std::vector<double> cdf(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += sd.outcomes[i].second;
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-12)
    throw std::invalid_argument("invalid distribution: outcomes do not sum to 1");
  cdf.back() = 1.0;

  ShotCounts::SettingCounts out;
  out.shots = shots;
  out.counts.reserve(k);
  for (const auto& [label, p] : sd.outcomes) out.counts.emplace_back(label, 0);

  if (k <= 4) {
    for (std::uint64_t n = 0; n < shots; ++n) {
      const double u = stream.next_double();
      std::size_t i = 0;
      while (u >= cdf[i]) ++i;
      ++out.counts[i].second;
    }
  } else {
    for (std::uint64_t n = 0; n < shots; ++n) {
      const double u = stream.next_double();
      const std::size_t i =
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      ++out.counts[std::min(i, k - 1)].second;
    }
  }
  return out;
}

double complex_std(const std::vector<Complex>& xs) {
  if (xs.size() < 2) return 0.0;
  Complex mean{0.0, 0.0};
  for (const Complex& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double s = 0.0;
  for (const Complex& x : xs) s += std::norm(x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// First-order propagation of multinomial frequency noise through the
// inversion map: Var = sum_s (1/M_s) g^T (diag(p) - p p^T) g, with the
// gradient taken numerically per outcome label.
double delta_method_stderr(const ProtocolRun& run, const OutcomeDistribution& freqs,
                           const ShotCounts& counts) {
  auto eval = [&](const OutcomeDistribution& f) -> std::optional<Complex> {
    try {
      return run.invert(f);
    } catch (const DegenerateEstimatorError&) {
      return std::nullopt;
    }
  };

  double var = 0.0;
  for (Setting s : run.required) {
    const SettingDist& sd = freqs.at(s);
    const double m = static_cast<double>(counts.at(s).shots);
    const std::size_t k = sd.outcomes.size();
    std::vector<Complex> grad(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double p = sd.outcomes[i].second;
      const double h = std::max(1e-8, 1e-3 * p);
      OutcomeDistribution up = freqs, dn = freqs;
      up.by_setting[static_cast<std::size_t>(s)]->outcomes[i].second = p + h;
      dn.by_setting[static_cast<std::size_t>(s)]->outcomes[i].second = p - h;
      const auto fu = eval(up), fd = eval(dn);
      if (fu && fd) {
        grad[i] = (*fu - *fd) / (2.0 * h);
      } else if (fu) {
        grad[i] = (*fu - run.invert(freqs)) / h;
      } else if (fd) {
        grad[i] = (run.invert(freqs) - *fd) / h;
      } else {
        grad[i] = Complex{0.0, 0.0};
      }
    }
    // g^T (diag(p) - p p^T) g for real and imaginary parts.
    Complex gp{0.0, 0.0};
    for (std::size_t i = 0; i < k; ++i) gp += grad[i] * sd.outcomes[i].second;
    for (std::size_t i = 0; i < k; ++i) {
      const double p = sd.outcomes[i].second;
      const Complex gi = grad[i];
      var += (gi.real() * gi.real() + gi.imag() * gi.imag()) * p / m;
    }
    var -= (gp.real() * gp.real() + gp.imag() * gp.imag()) / m;
  }
  return std::sqrt(std::max(0.0, var));
}

}  // namespace

ShotCounts sample(const OutcomeDistribution& dist, const SamplerConfig& cfg,
                  std::uint64_t repetition, std::uint64_t salt) {
  ShotCounts out;
  for (Setting s : kAllSettings) {
    if (!dist.has(s)) continue;
    const SettingDist& sd = dist.at(s);
    const std::uint64_t shots = cfg.shots_for(s);
    if (shots == 0)
      throw std::invalid_argument(std::string("no shot budget for required setting ") +
                                  setting_name(s));
    RandomStream stream(cfg.seed,
                        {static_cast<std::uint64_t>(s) + 1, repetition, salt});
    out.by_setting[static_cast<std::size_t>(s)] = draw_multinomial(sd, shots, stream);
  }
  return out;
}

EstimateReport estimate_from_counts(const ShotCounts& counts, const ProtocolSpec& spec,
                                    const SamplerConfig* cfg) {
  const ProtocolRun run = make_run(spec);
  for (Setting s : run.required)
    if (!counts.has(s))
      throw std::invalid_argument(std::string("counts missing required setting ") +
                                  setting_name(s));

  const OutcomeDistribution freqs = counts.frequencies();
  EstimateReport report;
  try {
    report.estimate = run.invert(freqs);
  } catch (const DegenerateEstimatorError& e) {
    std::string detail = std::string(e.what()) + " [counts:";
    for (Setting s : run.required) {
      detail += std::string(" ") + setting_name(s) + "=";
      const auto& sc = counts.at(s);
      for (std::size_t i = 0; i < sc.counts.size(); ++i)
        detail += (i ? "/" : "") + std::to_string(sc.counts[i].second);
    }
    detail += "]";
    throw DegenerateEstimatorError(detail);
  }
  report.exact_target = run.exact_target;
  report.success_probability = run.success_probability;
  for (Setting s : run.required)
    report.shots_used[static_cast<std::size_t>(s)] = counts.at(s).shots;

  if (cfg != nullptr && cfg->bootstrap > 0) {
    std::vector<Complex> estimates;
    estimates.reserve(cfg->bootstrap);
    for (std::uint64_t b = 0; b < cfg->bootstrap; ++b) {
      SamplerConfig boot = *cfg;
      for (Setting s : run.required)
        boot.shots[static_cast<std::size_t>(s)] = counts.at(s).shots;
      const ShotCounts resampled = sample(freqs, boot, b, 0xb007ULL);
      try {
        estimates.push_back(run.invert(resampled.frequencies()));
      } catch (const DegenerateEstimatorError&) {
      }
    }
    report.std_error = complex_std(estimates);
  } else {
    report.std_error = delta_method_stderr(run, freqs, counts);
  }
  return report;
}

std::vector<SweepRow> bias_variance_sweep(const ProtocolSpec& spec,
                                          const std::vector<double>& xi_grid,
                                          const SamplerConfig& cfg) {
  if (xi_grid.empty()) throw std::invalid_argument("xi grid is empty");
  if (cfg.repetitions == 0) throw std::invalid_argument("repetitions must be positive");

  std::vector<SweepRow> rows(xi_grid.size());
  for (std::size_t g = 0; g < xi_grid.size(); ++g) {
    ProtocolSpec point = spec;
    point.variant = with_xi(spec.variant, xi_grid[g]);
    const ProtocolRun run = make_run(point);

    const std::uint64_t reps = cfg.repetitions;
    std::vector<Complex> estimates(reps);
    std::vector<double> stderrs(reps);
    parallel_for(reps, [&](std::size_t r) {
      const ShotCounts counts = sample(run.exact, cfg, r, g);
      const EstimateReport rep = estimate_from_counts(counts, point, &cfg);
      estimates[r] = rep.estimate;
      stderrs[r] = rep.std_error.value_or(0.0);
    });

    SweepRow& row = rows[g];
    row.protocol = protocol_name(point.variant);
    row.xi = xi_grid[g];
    row.shots_x = std::count(run.required.begin(), run.required.end(), Setting::X)
                      ? cfg.shots_for(Setting::X) : 0;
    row.shots_y = std::count(run.required.begin(), run.required.end(), Setting::Y)
                      ? cfg.shots_for(Setting::Y) : 0;
    row.shots_z = std::count(run.required.begin(), run.required.end(), Setting::Z)
                      ? cfg.shots_for(Setting::Z) : 0;
    row.reps = reps;
    Complex mean{0.0, 0.0};
    for (const Complex& e : estimates) mean += e;
    mean /= static_cast<double>(reps);
    row.mean_estimate = mean;
    row.empirical_bias = mean - run.exact_target;
    row.empirical_std = complex_std(estimates);
    double ms = 0.0;
    for (double se : stderrs) ms += se;
    row.mean_stderr = ms / static_cast<double>(reps);
    row.success_probability = run.success_probability;
    row.seed = cfg.seed;
  }
  return rows;
}

}  // namespace wvsim
