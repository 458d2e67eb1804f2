#include "wvsim/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wvsim/errors.hpp"

namespace wvsim {

namespace {

constexpr double kDcFloor = 1e-10;

double clampp(double p) { return (p < 0.0 && p > -1e-12) ? 0.0 : p; }

std::vector<Complex> normalized_amps(std::vector<Complex> amps) {
  double s = 0.0;
  for (const Complex& a : amps) s += std::norm(a);
  if (s < 1e-300) throw std::invalid_argument("grid state must be nonzero");
  const double inv = 1.0 / std::sqrt(s);
  for (Complex& a : amps) a *= inv;
  return amps;
}

}  // namespace

GridState::GridState(std::vector<Complex> amps, bool require_dc)
    : amps_(normalized_amps(std::move(amps))) {
  if (amps_.size() < 2) throw std::invalid_argument("grid state needs n >= 2");
  for (const Complex& a : amps_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("grid state has non-finite amplitudes");
  if (require_dc && std::abs(dc_component()) < kDcFloor)
    throw PhysicalityError("grid state has vanishing DC component <p0|psi>");
}

Complex GridState::dc_component() const {
  Complex s{0.0, 0.0};
  for (const Complex& a : amps_) s += a;
  return s / std::sqrt(static_cast<double>(amps_.size()));
}

GridState gaussian_state(std::size_t n, double x0, double sigma, double k) {
  if (n < 2) throw std::invalid_argument("gaussian state needs n >= 2");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian width must be positive");
  std::vector<Complex> amps(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double dx = static_cast<double>(x) - x0;
    const double mag = std::exp(-dx * dx / (4.0 * sigma * sigma));
    const double phase = k * static_cast<double>(x);
    amps[x] = mag * Complex{std::cos(phase), std::sin(phase)};
  }
  return GridState(std::move(amps));
}

GridState two_peak_state(std::size_t n) {
  if (n < 8) throw std::invalid_argument("two-peak state needs n >= 8");
  const double sigma = static_cast<double>(n) / 16.0;
  const double xa = static_cast<double>(n) / 4.0;
  const double xb = 3.0 * static_cast<double>(n) / 4.0;
  const Complex rel{std::cos(std::numbers::pi / 3.0), std::sin(std::numbers::pi / 3.0)};
  std::vector<Complex> amps(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double da = static_cast<double>(x) - xa;
    const double db = static_cast<double>(x) - xb;
    amps[x] = Complex{std::exp(-da * da / (4.0 * sigma * sigma)), 0.0} +
              rel * std::exp(-db * db / (4.0 * sigma * sigma));
  }
  return GridState(std::move(amps));
}

GridState random_smooth_state(std::size_t n, std::uint64_t seed, std::size_t cutoff) {
  if (n < 2) throw std::invalid_argument("random smooth state needs n >= 2");
  if (cutoff >= n / 2) cutoff = n / 2 - 1;
  RandomStream stream(seed, {0x57a7eULL});
  std::vector<Complex> modes(n, Complex{0.0, 0.0});
  for (std::size_t m = 0; m <= cutoff; ++m) {
    const double re = 2.0 * stream.next_double() - 1.0;
    const double im = 2.0 * stream.next_double() - 1.0;
    modes[m] = Complex{re, im};
    if (m > 0) {
      const double re2 = 2.0 * stream.next_double() - 1.0;
      const double im2 = 2.0 * stream.next_double() - 1.0;
      modes[n - m] = Complex{re2, im2};
    }
  }
  // Keep the p = 0 mode comfortably nonzero: push its magnitude to at least
  // half the rms of the others, preserving its phase.
  double rms = 0.0;
  std::size_t populated = 0;
  for (std::size_t m = 1; m < n; ++m) {
    if (modes[m] != Complex{0.0, 0.0}) {
      rms += std::norm(modes[m]);
      ++populated;
    }
  }
  rms = populated ? std::sqrt(rms / static_cast<double>(populated)) : 1.0;
  const double floor = 0.5 * rms;
  if (std::abs(modes[0]) < floor) {
    modes[0] = (modes[0] == Complex{0.0, 0.0})
                   ? Complex{floor, 0.0}
                   : modes[0] * (floor / std::abs(modes[0]));
  }
  // psi(x) = sum_p modes[p] conj(F(p, x)); row p of F is the p-momentum bra.
  const Operator f = dft_matrix(n);
  std::vector<Complex> amps(n, Complex{0.0, 0.0});
  for (std::size_t p = 0; p < n; ++p) {
    if (modes[p] == Complex{0.0, 0.0}) continue;
    for (std::size_t x = 0; x < n; ++x) amps[x] += modes[p] * std::conj(f.at(p, x));
  }
  return GridState(std::move(amps));
}

GridState gaussian_benchmark_64() {
  return gaussian_state(64, 24.0, 6.0, 2.0 * std::numbers::pi * 2.0 / 64.0);
}

double fidelity(const GridState& a, const GridState& b) {
  if (a.n() != b.n()) throw std::invalid_argument("fidelity: grid size mismatch");
  Complex s{0.0, 0.0};
  for (std::size_t x = 0; x < a.n(); ++x) s += std::conj(a[x]) * b[x];
  return std::min(1.0, std::norm(s));
}

GridState recover(const std::vector<Complex>& raw) {
  double s = 0.0;
  for (const Complex& c : raw) s += std::norm(c);
  if (s < 1e-280)
    throw DegenerateEstimatorError("recover: raw values are all zero");
  std::vector<Complex> amps = raw;
  const double inv = 1.0 / std::sqrt(s);
  for (Complex& a : amps) a *= inv;
  return GridState(std::move(amps), /*require_dc=*/false);
}

const char* method_name(DirectMethod m) {
  return m == DirectMethod::Scanning ? "scanning" : "scan_free";
}

DirectMeasResult scanning_measure(const GridState& psi, double xi,
                                  const std::optional<SamplerConfig>& cfg,
                                  std::uint64_t repetition) {
  if (xi <= 0.0 || xi > std::numbers::pi / 2.0)
    throw PhysicalityError("scanning coupling must satisfy 0 < xi <= pi/2");
  const std::size_t n = psi.n();
  const Complex dc = psi.dc_component();
  const double f0 = 1.0 / std::sqrt(static_cast<double>(n));
  const double cm1 = std::cos(xi) - 1.0;
  const double sx = std::sin(xi);

  std::vector<Complex> raw(n, Complex{0.0, 0.0});
  std::uint64_t total_shots = 0;

  // Projector closed form: cos(xi |x><x|) = 1 + (cos xi - 1)|x><x| and
  // sin(xi |x><x|) = sin(xi) |x><x|, so per position
  // z0 = <p0|psi> + (cos xi - 1) <p0|x> psi(x), z1 = sin(xi) <p0|x> psi(x).
  auto amplitudes = [&](std::size_t x) {
    const Complex z0 = dc + cm1 * f0 * psi[x];
    const Complex z1 = sx * f0 * psi[x];
    return std::pair<Complex, Complex>{z0, z1};
  };

  if (!cfg) {
    for (std::size_t x = 0; x < n; ++x) {
      const auto [z0, z1] = amplitudes(x);
      const double s = std::norm(z0) + std::norm(z1);
      raw[x] = (s > 1e-300) ? std::conj(z0) * z1 / (xi * s) : Complex{0.0, 0.0};
    }
  } else {
    const std::uint64_t mx = cfg->shots_for(Setting::X);
    const std::uint64_t my = cfg->shots_for(Setting::Y);
    if (mx == 0 || my == 0)
      throw std::invalid_argument("scanning needs X and Y shot budgets");
    total_shots = n * (mx + my);
    parallel_for(n, [&](std::size_t x) {
      const auto [z0, z1] = amplitudes(x);
      const Complex i{0.0, 1.0};
      double px_p = clampp(0.5 * std::norm(z0 + z1));
      double px_m = clampp(0.5 * std::norm(z0 - z1));
      double py_p = clampp(0.5 * std::norm(z0 - i * z1));
      double py_m = clampp(0.5 * std::norm(z0 + i * z1));
      OutcomeDistribution dist;
      dist.emplace(Setting::X).outcomes = {
          {"+", px_p}, {"-", px_m}, {"discard", clampp(1.0 - px_p - px_m)}};
      dist.emplace(Setting::Y).outcomes = {
          {"+i", py_p}, {"-i", py_m}, {"discard", clampp(1.0 - py_p - py_m)}};
      const ShotCounts counts = sample(dist, *cfg, repetition, /*salt=*/0x5ca0ULL + x);
      const auto& cx = counts.at(Setting::X);
      const auto& cy = counts.at(Setting::Y);
      const double dpx = (static_cast<double>(cx.count("+")) -
                          static_cast<double>(cx.count("-"))) / static_cast<double>(mx);
      const double dpy = (static_cast<double>(cy.count("+i")) -
                          static_cast<double>(cy.count("-i"))) / static_cast<double>(my);
      const double post = (static_cast<double>(cx.count("+")) +
                           static_cast<double>(cx.count("-"))) / static_cast<double>(mx);
      raw[x] = (post > 0.0) ? Complex{dpx, dpy} / (2.0 * xi * post) : Complex{0.0, 0.0};
    });
  }

  GridState recovered = recover(raw);
  return DirectMeasResult{std::move(raw), recovered, fidelity(recovered, psi), total_shots,
                          DirectMethod::Scanning};
}

DirectMeasResult scan_free_measure(const GridState& psi,
                                   const std::optional<SamplerConfig>& cfg,
                                   std::uint64_t repetition) {
  const std::size_t n = psi.n();
  const Complex dc = psi.dc_component();
  const double f0 = 1.0 / std::sqrt(static_cast<double>(n));
  const Complex ref = dc * f0;  // <x|p0><p0|psi>, x-independent

  std::vector<Complex> raw(n, Complex{0.0, 0.0});
  std::uint64_t total_shots = 0;

  if (!cfg) {
    // C(x) = <psi|p0><p0|x><x|psi>, exact.
    for (std::size_t x = 0; x < n; ++x) raw[x] = std::conj(ref) * psi[x];
  } else {
    const std::uint64_t mx = cfg->shots_for(Setting::X);
    const std::uint64_t my = cfg->shots_for(Setting::Y);
    if (mx == 0 || my == 0)
      throw std::invalid_argument("scan-free needs X and Y shot budgets");
    total_shots = mx + my;
    // One joint distribution per setting over (x, probe outcome) + discard.
    OutcomeDistribution dist;
    SettingDist& sx = dist.emplace(Setting::X);
    SettingDist& sy = dist.emplace(Setting::Y);
    double sum_x = 0.0, sum_y = 0.0;
    const Complex i{0.0, 1.0};
    for (std::size_t x = 0; x < n; ++x) {
      const std::string tag = std::to_string(x);
      const double pp = clampp(0.25 * std::norm(ref + psi[x]));
      const double pm = clampp(0.25 * std::norm(ref - psi[x]));
      const double qp = clampp(0.25 * std::norm(ref - i * psi[x]));
      const double qm = clampp(0.25 * std::norm(ref + i * psi[x]));
      sx.outcomes.emplace_back(tag + ":+", pp);
      sx.outcomes.emplace_back(tag + ":-", pm);
      sy.outcomes.emplace_back(tag + ":+i", qp);
      sy.outcomes.emplace_back(tag + ":-i", qm);
      sum_x += pp + pm;
      sum_y += qp + qm;
    }
    sx.outcomes.emplace_back("discard", clampp(1.0 - sum_x));
    sy.outcomes.emplace_back("discard", clampp(1.0 - sum_y));

    const ShotCounts counts = sample(dist, *cfg, repetition, /*salt=*/0x5cf3ULL);
    const auto& cx = counts.at(Setting::X);
    const auto& cy = counts.at(Setting::Y);
    for (std::size_t x = 0; x < n; ++x) {
      const std::string tag = std::to_string(x);
      const double dpx = (static_cast<double>(cx.count(tag + ":+")) -
                          static_cast<double>(cx.count(tag + ":-"))) / static_cast<double>(mx);
      const double dpy = (static_cast<double>(cy.count(tag + ":+i")) -
                          static_cast<double>(cy.count(tag + ":-i"))) / static_cast<double>(my);
      raw[x] = Complex{dpx, dpy};
    }
  }

  GridState recovered = recover(raw);
  return DirectMeasResult{std::move(raw), recovered, fidelity(recovered, psi), total_shots,
                          DirectMethod::ScanFree};
}

namespace {

constexpr std::uint64_t kCompareReps = 20;
constexpr std::uint64_t kBudgetCap = std::uint64_t{1} << 31;

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Doubling search; runner(per_setting_budget, rep) -> fidelity (0 on a
// degenerate repetition). Returns the total budget, or nullopt at cap.
std::optional<std::uint64_t> doubling_search(
    double target, std::uint64_t settings_per_unit,
    const std::function<double(std::uint64_t, std::uint64_t)>& runner) {
  for (std::uint64_t per = 1;; per *= 2) {
    const std::uint64_t total = per * settings_per_unit;
    if (total > kBudgetCap) return std::nullopt;
    std::vector<double> fids(kCompareReps, 0.0);
    parallel_for(kCompareReps, [&](std::size_t r) { fids[r] = runner(per, r); });
    if (median(fids) >= target) return total;
  }
}

}  // namespace

EfficiencyComparison efficiency_compare(const GridState& psi, double target_fidelity,
                                        double xi_scan, std::uint64_t seed) {
  if (target_fidelity < 0.0 || target_fidelity >= 1.0)
    throw std::invalid_argument("target fidelity must lie in [0, 1)");

  EfficiencyComparison out;
  out.scanning_floor_fidelity = scanning_measure(psi, xi_scan, std::nullopt).fidelity;

  const std::size_t n = psi.n();
  auto scan_runner = [&](std::uint64_t per, std::uint64_t rep) {
    SamplerConfig cfg;
    cfg.seed = RandomStream::mix(seed ^ 0x5caULL);
    cfg.shots = {per, per, 0};
    try {
      return scanning_measure(psi, xi_scan, cfg, rep).fidelity;
    } catch (const DegenerateEstimatorError&) {
      return 0.0;
    }
  };
  auto free_runner = [&](std::uint64_t per, std::uint64_t rep) {
    SamplerConfig cfg;
    cfg.seed = RandomStream::mix(seed ^ 0xf3eULL);
    cfg.shots = {per, per, 0};
    try {
      return scan_free_measure(psi, cfg, rep).fidelity;
    } catch (const DegenerateEstimatorError&) {
      return 0.0;
    }
  };

  if (out.scanning_floor_fidelity >= target_fidelity) {
    // 2 settings per position and per unit of the doubling parameter.
    if (const auto total = doubling_search(target_fidelity, 2 * n, scan_runner)) {
      out.shots_scanning = *total;
      out.scanning_reached = true;
    }
  }
  if (const auto total = doubling_search(target_fidelity, 2, free_runner)) {
    out.shots_scan_free = *total;
    out.scan_free_reached = true;
  }
  if (out.scanning_reached && out.scan_free_reached && out.shots_scan_free > 0)
    out.ratio = static_cast<double>(out.shots_scanning) /
                static_cast<double>(out.shots_scan_free);
  return out;
}

}  // namespace wvsim
