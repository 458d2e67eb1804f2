#include "wvsim/framework.hpp"

#include <cmath>
#include <stdexcept>

#include "wvsim/errors.hpp"

namespace wvsim {

namespace {

constexpr double kNormSlack = 1e-9;
constexpr double kOverlapFloor = 1e-12;

Complex trace_product(const Operator& a, const Operator& b) {
  // tr(a b) without forming the product.
  Complex s{0.0, 0.0};
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) s += a.at(r, c) * b.at(c, r);
  return s;
}

double clamp_probability(double p) {
  if (p < 0.0 && p > -1e-12) return 0.0;
  return p;
}

}  // namespace

Ket ket0() { return Ket{1.0, 0.0}; }
Ket ket1() { return Ket{0.0, 1.0}; }
Ket ket_plus() { return Ket{Complex{std::sqrt(0.5), 0.0}, Complex{std::sqrt(0.5), 0.0}}; }
Ket ket_minus() { return Ket{Complex{std::sqrt(0.5), 0.0}, Complex{-std::sqrt(0.5), 0.0}}; }
Ket ket_plus_i() { return Ket{Complex{std::sqrt(0.5), 0.0}, Complex{0.0, std::sqrt(0.5)}}; }
Ket ket_minus_i() { return Ket{Complex{std::sqrt(0.5), 0.0}, Complex{0.0, -std::sqrt(0.5)}}; }

const char* setting_name(Setting s) {
  switch (s) {
    case Setting::X: return "x";
    case Setting::Y: return "y";
    case Setting::Z: return "z";
  }
  return "?";
}

ControlledTransform::ControlledTransform(Operator t0_in, Operator t1_in)
    : t0(std::move(t0_in)), t1(std::move(t1_in)) {
  if (t0.dim() != t1.dim())
    throw std::invalid_argument("controlled transform branches must share a dimension");
  if (!t0.is_finite() || !t1.is_finite())
    throw PhysicalityError("controlled transform branch has non-finite entries");
  if (spectral_norm(t0) > 1.0 + kNormSlack)
    throw PhysicalityError("T0 is not a contraction (largest singular value > 1)");
  if (spectral_norm(t1) > 1.0 + kNormSlack)
    throw PhysicalityError("T1 is not a contraction (largest singular value > 1)");
}

Boundary::Boundary(Operator initial_in, Operator final_effect_in)
    : initial(std::move(initial_in)), final_effect(std::move(final_effect_in)) {
  if (initial.dim() != final_effect.dim())
    throw std::invalid_argument("boundary operators must share a dimension");
  if (!is_hermitian(initial)) throw PhysicalityError("initial state is not Hermitian");
  if (!is_psd(initial)) throw PhysicalityError("initial state is not positive semidefinite");
  if (std::abs(initial.trace().real() - 1.0) > 1e-9 || std::abs(initial.trace().imag()) > 1e-9)
    throw PhysicalityError("initial state must have trace 1");
  if (!is_hermitian(final_effect)) throw PhysicalityError("final effect is not Hermitian");
  if (!is_psd(final_effect)) throw PhysicalityError("final effect is not positive semidefinite");
  if (spectral_norm(final_effect) > 1.0 + kNormSlack)
    throw PhysicalityError("final effect exceeds unit spectral norm");
}

Boundary Boundary::pure(const Ket& psi_i, const Ket& psi_f) {
  Ket i = psi_i.normalized();
  Ket f = psi_f.normalized();
  return Boundary(outer(i, i), outer(f, f));
}

double SettingDist::prob(const std::string& label) const {
  for (const auto& [l, p] : outcomes)
    if (l == label) return p;
  throw std::out_of_range("no outcome labeled '" + label + "'");
}

double SettingDist::sum() const {
  double s = 0.0;
  for (const auto& [l, p] : outcomes) s += p;
  return s;
}

const SettingDist& OutcomeDistribution::at(Setting s) const {
  const auto& slot = by_setting[static_cast<std::size_t>(s)];
  if (!slot) throw std::out_of_range(std::string("setting ") + setting_name(s) + " not populated");
  return *slot;
}

SettingDist& OutcomeDistribution::emplace(Setting s) {
  auto& slot = by_setting[static_cast<std::size_t>(s)];
  slot.emplace();
  return *slot;
}

bool OutcomeDistribution::has(Setting s) const {
  return by_setting[static_cast<std::size_t>(s)].has_value();
}

double OutcomeDistribution::prob(Setting s, const std::string& label) const {
  return at(s).prob(label);
}

void OutcomeDistribution::merge(const OutcomeDistribution& other) {
  for (std::size_t i = 0; i < 3; ++i)
    if (other.by_setting[i]) by_setting[i] = other.by_setting[i];
}

OutcomeDistribution joint_probabilities(const ControlledTransform& ct, const Boundary& b,
                                        Setting s) {
  if (ct.t0.dim() != b.initial.dim())
    throw std::invalid_argument("transform/boundary dimension mismatch");

  const Operator& rho = b.initial;
  const Operator& f = b.final_effect;
  // p0 = tr(T0 rho T0^dag F), p1 = tr(T1 rho T1^dag F), cross = tr(rho T0^dag F T1)
  const double p0 = trace_product(ct.t0 * rho * dagger(ct.t0), f).real();
  const double p1 = trace_product(ct.t1 * rho * dagger(ct.t1), f).real();
  const Complex cross = trace_product(rho * dagger(ct.t0), f * ct.t1);

  OutcomeDistribution dist;
  SettingDist& sd = dist.emplace(s);
  switch (s) {
    case Setting::X: {
      const double pp = clamp_probability(0.25 * (p0 + p1 + 2.0 * cross.real()));
      const double pm = clamp_probability(0.25 * (p0 + p1 - 2.0 * cross.real()));
      sd.outcomes = {{"+", pp}, {"-", pm}, {"discard", clamp_probability(1.0 - pp - pm)}};
      break;
    }
    case Setting::Y: {
      const double pp = clamp_probability(0.25 * (p0 + p1 + 2.0 * cross.imag()));
      const double pm = clamp_probability(0.25 * (p0 + p1 - 2.0 * cross.imag()));
      sd.outcomes = {{"+i", pp}, {"-i", pm}, {"discard", clamp_probability(1.0 - pp - pm)}};
      break;
    }
    case Setting::Z: {
      const double pz0 = clamp_probability(0.5 * p0);
      const double pz1 = clamp_probability(0.5 * p1);
      sd.outcomes = {{"0", pz0}, {"1", pz1}, {"discard", clamp_probability(1.0 - pz0 - pz1)}};
      break;
    }
  }
  return dist;
}

OutcomeDistribution joint_probabilities(const ControlledTransform& ct, const Boundary& b) {
  OutcomeDistribution dist = joint_probabilities(ct, b, Setting::X);
  dist.merge(joint_probabilities(ct, b, Setting::Y));
  dist.merge(joint_probabilities(ct, b, Setting::Z));
  return dist;
}

Complex extract_complex(const OutcomeDistribution& dist) {
  const SettingDist& x = dist.at(Setting::X);
  const SettingDist& y = dist.at(Setting::Y);
  return Complex{x.prob("+") - x.prob("-"), y.prob("+i") - y.prob("-i")};
}

Complex weak_value(const Operator& a, const Ket& psi_i, const Ket& psi_f) {
  if (a.dim() != psi_i.dim() || a.dim() != psi_f.dim())
    throw std::invalid_argument("observable/state dimension mismatch");
  const Complex ovl = inner(psi_f, psi_i);
  if (std::abs(ovl) <= kOverlapFloor)
    throw DegenerateEstimatorError("weak value undefined: <psi_f|psi_i> vanishes");
  return inner(psi_f, a.apply(psi_i)) / ovl;
}

Complex modular_value(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f) {
  if (!is_hermitian(a)) throw std::invalid_argument("modular value requires a Hermitian observable");
  const Complex ovl = inner(psi_f, psi_i);
  if (std::abs(ovl) <= kOverlapFloor)
    throw DegenerateEstimatorError("modular value undefined: <psi_f|psi_i> vanishes");
  const Operator u = herm_func(a, [xi](double lambda) {
    return Complex{std::cos(xi * lambda), -std::sin(xi * lambda)};
  });
  return inner(psi_f, u.apply(psi_i)) / ovl;
}

Operator kirkwood_dirac(const Operator& rho_in, const Operator& basis_a,
                        const Operator& basis_b) {
  if (rho_in.dim() != basis_a.dim() || rho_in.dim() != basis_b.dim())
    throw std::invalid_argument("kirkwood_dirac dimension mismatch");
  if (!is_hermitian(rho_in) || !is_psd(rho_in) ||
      std::abs(rho_in.trace().real() - 1.0) > 1e-9)
    throw PhysicalityError("rho_in is not a density operator");
  if (!is_unitary(basis_a) || !is_unitary(basis_b))
    throw PhysicalityError("kirkwood_dirac bases must be unitary");

  const std::size_t d = rho_in.dim();
  Operator grid(d);
  for (std::size_t ia = 0; ia < d; ++ia) {
    const Ket a = basis_a.column(ia);
    for (std::size_t ib = 0; ib < d; ++ib) {
      const Ket bk = basis_b.column(ib);
      grid.at(ia, ib) = inner(bk, a) * inner(a, rho_in.apply(bk));
    }
  }
  return grid;
}

}  // namespace wvsim
