#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wvsim/framework.hpp"
#include "wvsim/protocols.hpp"

namespace wvsim {

/// Counter-based deterministic stream. Sub-streams are keyed by hashing the
/// seed with caller-chosen tags, so parallel execution cannot change what
/// any one stream produces.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_u64();
  double next_double();  // uniform in [0, 1)

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Worker cap from WVSIM_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

/// Deterministic parallel loop: fn(i) for i in [0, n); each index owns its
/// output slot, so scheduling cannot affect results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct SamplerConfig {
  std::uint64_t seed = 1;
  std::array<std::uint64_t, 3> shots{10000, 10000, 10000};  // per setting X/Y/Z
  std::uint64_t repetitions = 1;
  std::uint64_t bootstrap = 0;  // 0 = delta-method uncertainty

  std::uint64_t shots_for(Setting s) const { return shots[static_cast<std::size_t>(s)]; }
};

struct ShotCounts {
  struct SettingCounts {
    std::vector<std::pair<std::string, std::uint64_t>> counts;
    std::uint64_t shots = 0;

    std::uint64_t count(const std::string& label) const;
  };
  std::array<std::optional<SettingCounts>, 3> by_setting;

  const SettingCounts& at(Setting s) const;
  bool has(Setting s) const;

  /// Empirical frequencies, same label layout as the source distribution.
  OutcomeDistribution frequencies() const;
};

/// Multinomial draw per populated setting. Deterministic given
/// (seed, setting, repetition, salt).
ShotCounts sample(const OutcomeDistribution& dist, const SamplerConfig& cfg,
                  std::uint64_t repetition = 0, std::uint64_t salt = 0);

/// Plug the empirical frequencies into the protocol's inversion. Uncertainty
/// comes from first-order (delta-method) propagation of the per-setting
/// multinomial covariance, or from a bootstrap when cfg->bootstrap > 0.
EstimateReport estimate_from_counts(const ShotCounts& counts, const ProtocolSpec& spec,
                                    const SamplerConfig* cfg = nullptr);

struct SweepRow {
  std::string protocol;
  double xi = 0.0;
  std::uint64_t shots_x = 0, shots_y = 0, shots_z = 0;
  std::uint64_t reps = 0;
  Complex mean_estimate{0.0, 0.0};
  Complex empirical_bias{0.0, 0.0};
  double empirical_std = 0.0;
  double mean_stderr = 0.0;
  double success_probability = 0.0;
  std::uint64_t seed = 0;
};

/// Repeat seeded experiments over a coupling grid; rows come back in grid
/// order regardless of execution schedule.
std::vector<SweepRow> bias_variance_sweep(const ProtocolSpec& spec,
                                          const std::vector<double>& xi_grid,
                                          const SamplerConfig& cfg);

}  // namespace wvsim
