#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wvsim/linalg.hpp"
#include "wvsim/sampling.hpp"

namespace wvsim {

/// Normalized wavefunction on an N-point periodic grid, psi(x) = <x|psi>.
/// Construction rejects states with vanishing DC component <p0|psi>
/// (PhysicalityError), since both direct-measurement pipelines reference it.
class GridState {
 public:
  explicit GridState(std::vector<Complex> amps, bool require_dc = true);

  std::size_t n() const { return amps_.size(); }
  const std::vector<Complex>& amps() const { return amps_; }
  Complex operator[](std::size_t x) const { return amps_[x]; }
  Ket ket() const { return Ket(amps_); }

  /// <p0|psi> = sum_x psi(x) / sqrt(N).
  Complex dc_component() const;

 private:
  std::vector<Complex> amps_;
};

/// amps proportional to exp(-(x - x0)^2 / (4 sigma^2) + i k x).
GridState gaussian_state(std::size_t n, double x0, double sigma, double k);

/// Two Gaussian humps with a fixed relative phase.
GridState two_peak_state(std::size_t n);

/// Band-limited random state: Fourier modes |p| <= cutoff drawn from a
/// seeded stream, with the p = 0 mode kept away from zero.
GridState random_smooth_state(std::size_t n, std::uint64_t seed, std::size_t cutoff);

/// Default benchmark state: N = 64 Gaussian, x0 = 24, sigma = 6,
/// k = 2 pi 2/64.
GridState gaussian_benchmark_64();

double fidelity(const GridState& a, const GridState& b);

/// Normalize the measured raw values into a state; the global phase stays
/// as measured. Throws DegenerateEstimatorError when raw is all zero.
GridState recover(const std::vector<Complex>& raw);

enum class DirectMethod { Scanning, ScanFree };
const char* method_name(DirectMethod m);

struct DirectMeasResult {
  std::vector<Complex> raw;  // measured C(x)
  GridState recovered;
  double fidelity = 0.0;  // against the true input state
  std::uint64_t total_shots = 0;
  DirectMethod method = DirectMethod::ScanFree;
};

/// Position-by-position direct measurement: one weak-coupling experiment
/// per x with A = |x><x|, post-selected on |p0>. cfg shot budgets are per
/// position and per setting (X and Y are used); nullopt runs on exact
/// probabilities.
DirectMeasResult scanning_measure(const GridState& psi, double xi,
                                  const std::optional<SamplerConfig>& cfg,
                                  std::uint64_t repetition = 0);

/// Scan-free direct measurement: T0 = |p0><p0|, T1 = 1, probe prepared in
/// |+>, final measurement position-resolved jointly with the probe X/Y
/// readout. One apparatus setting per probe basis. cfg budgets are per
/// setting; nullopt runs on exact probabilities.
DirectMeasResult scan_free_measure(const GridState& psi,
                                   const std::optional<SamplerConfig>& cfg,
                                   std::uint64_t repetition = 0);

struct EfficiencyComparison {
  std::uint64_t shots_scanning = 0;
  std::uint64_t shots_scan_free = 0;
  double ratio = 0.0;  // scanning / scan-free, when both reached the target
  bool scanning_reached = false;
  bool scan_free_reached = false;
  double scanning_floor_fidelity = 1.0;  // exact-probability ceiling at xi_scan
};

/// Doubling search over total shot budget per method until the median
/// fidelity over 20 seeded repetitions meets the target. A target above the
/// scanning method's exact-probability ceiling is reported as unreachable
/// with the ceiling attached.
EfficiencyComparison efficiency_compare(const GridState& psi, double target_fidelity,
                                        double xi_scan, std::uint64_t seed);

}  // namespace wvsim
