#include "wvsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wvsim/errors.hpp"

namespace wvsim {

namespace {

constexpr double kDegenerateFloor = 1e-12;

double clampp(double p) { return (p < 0.0 && p > -1e-12) ? 0.0 : p; }

// Distributions for a probe prepared in |0> that ends in the unnormalized
// state z0|0> + z1|1> conditioned on post-selection (conventional method).
// Only the X and Y settings are part of the protocol.
OutcomeDistribution probe_pair_distribution_half(Complex z0, Complex z1) {
  OutcomeDistribution dist;
  {
    SettingDist& x = dist.emplace(Setting::X);
    const double pp = clampp(0.5 * std::norm(z0 + z1));
    const double pm = clampp(0.5 * std::norm(z0 - z1));
    x.outcomes = {{"+", pp}, {"-", pm}, {"discard", clampp(1.0 - pp - pm)}};
  }
  {
    SettingDist& y = dist.emplace(Setting::Y);
    const Complex i{0.0, 1.0};
    const double pp = clampp(0.5 * std::norm(z0 - i * z1));
    const double pm = clampp(0.5 * std::norm(z0 + i * z1));
    y.outcomes = {{"+i", pp}, {"-i", pm}, {"discard", clampp(1.0 - pp - pm)}};
  }
  return dist;
}

Complex ratio_inversion(const OutcomeDistribution& f, double denom_scale, const char* what) {
  // (dPx + i dPy) / (denom_scale * P(0)); shared by the modified, Pauli and
  // modular inversions.
  const double p0 = f.prob(Setting::Z, "0");
  if (p0 <= kDegenerateFloor)
    throw DegenerateEstimatorError(std::string(what) + ": P(0) vanishes");
  return extract_complex(f) / (denom_scale * p0);
}

struct EigenCluster {
  double value;
  std::vector<std::size_t> members;
};

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& values) {
  std::vector<EigenCluster> clusters;
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * scale;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!clusters.empty() && std::abs(values[j] - clusters.back().value) <= tol) {
      clusters.back().members.push_back(j);
    } else {
      clusters.push_back({values[j], {j}});
    }
  }
  return clusters;
}

ProtocolRun framework_run(ControlledTransform ct, const Ket& psi_i, const Ket& psi_f,
                          double denom_scale, Complex exact_target, const char* what) {
  const Boundary boundary = Boundary::pure(psi_i, psi_f);
  ProtocolRun run;
  run.exact = joint_probabilities(ct, boundary);
  run.required = {Setting::X, Setting::Y, Setting::Z};
  run.invert = [denom_scale, what = std::string(what)](const OutcomeDistribution& f) {
    return ratio_inversion(f, denom_scale, what.c_str());
  };
  run.exact_target = exact_target;
  const SettingDist& x = run.exact.at(Setting::X);
  run.success_probability = x.prob("+") + x.prob("-");
  return run;
}

}  // namespace

Operator pauli(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return pauli_x();
    case PauliAxis::Y: return pauli_y();
    case PauliAxis::Z: return pauli_z();
  }
  throw std::invalid_argument("unknown Pauli axis");
}

std::string protocol_name(const ProtocolVariant& v) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConventionalWeak>) return "conventional_weak";
        else if constexpr (std::is_same_v<T, ModifiedWeak>) return "modified_weak";
        else if constexpr (std::is_same_v<T, StrongProjector>) return "strong_projector";
        else if constexpr (std::is_same_v<T, StrongPauli>) {
          switch (p.axis) {
            case PauliAxis::X: return "strong_pauli_x";
            case PauliAxis::Y: return "strong_pauli_y";
            case PauliAxis::Z: return "strong_pauli_z";
          }
          return "strong_pauli";
        } else if constexpr (std::is_same_v<T, ModularValue>) return "modular_value";
        else return "expanded_hilbert";
      },
      v);
}

std::optional<double> protocol_xi(const ProtocolVariant& v) {
  if (const auto* c = std::get_if<ConventionalWeak>(&v)) return c->xi;
  if (const auto* m = std::get_if<ModifiedWeak>(&v)) return m->xi;
  if (const auto* m = std::get_if<ModularValue>(&v)) return m->xi;
  return std::nullopt;
}

ProtocolVariant with_xi(const ProtocolVariant& v, double xi) {
  if (std::holds_alternative<ConventionalWeak>(v)) return ConventionalWeak{xi};
  if (std::holds_alternative<ModifiedWeak>(v)) return ModifiedWeak{xi};
  if (std::holds_alternative<ModularValue>(v)) return ModularValue{xi};
  throw std::invalid_argument("protocol has no coupling to sweep");
}

ProtocolRun make_run(const ProtocolSpec& spec) {
  const Ket psi_i = spec.psi_i.normalized();
  const Ket psi_f = spec.psi_f.normalized();
  const std::size_t d = psi_i.dim();
  if (psi_f.dim() != d) throw std::invalid_argument("psi_i/psi_f dimension mismatch");

  if (const auto* conv = std::get_if<ConventionalWeak>(&spec.variant)) {
    const double xi = conv->xi;
    if (xi <= 0.0) throw PhysicalityError("conventional weak coupling must be positive");
    if (!is_hermitian(spec.observable))
      throw std::invalid_argument("observable must be Hermitian");
    // Branch rotation per eigenspace: the probe ends in
    // cos(xi A)|psi>(x)|0> + sin(xi A)|psi>(x)|1>.
    const Operator cosa =
        herm_func(spec.observable, [xi](double a) { return Complex{std::cos(xi * a), 0.0}; });
    const Operator sina =
        herm_func(spec.observable, [xi](double a) { return Complex{std::sin(xi * a), 0.0}; });
    const Complex z0 = inner(psi_f, cosa.apply(psi_i));
    const Complex z1 = inner(psi_f, sina.apply(psi_i));

    ProtocolRun run;
    run.exact = probe_pair_distribution_half(z0, z1);
    run.required = {Setting::X, Setting::Y};
    run.invert = [xi](const OutcomeDistribution& f) {
      const SettingDist& x = f.at(Setting::X);
      const double post = x.prob("+") + x.prob("-");
      if (post <= kDegenerateFloor)
        throw DegenerateEstimatorError("conventional weak: post-selection success vanishes");
      const Complex c = extract_complex(f);
      return c / (2.0 * xi * post);
    };
    run.exact_target = weak_value(spec.observable, psi_i, psi_f);
    run.success_probability = std::norm(z0) + std::norm(z1);
    return run;
  }

  if (const auto* mod = std::get_if<ModifiedWeak>(&spec.variant)) {
    const double xi = mod->xi;
    if (xi <= 0.0) throw PhysicalityError("modified weak coupling must be positive");
    if (!is_hermitian(spec.observable))
      throw std::invalid_argument("observable must be Hermitian");
    const double a_max = spectral_norm(spec.observable);
    if (xi * a_max > 1.0 + 1e-9)
      throw PhysicalityError("xi * a_max exceeds 1: xi A is not realizable");
    return framework_run(ControlledTransform(Operator::identity(d), xi * spec.observable),
                         psi_i, psi_f, 2.0 * xi, weak_value(spec.observable, psi_i, psi_f),
                         "modified weak");
  }

  if (std::get_if<StrongProjector>(&spec.variant)) {
    if (!is_projector(spec.observable))
      throw PhysicalityError("strong projector protocol requires a projector observable");
    const Operator& pi = spec.observable;
    ProtocolRun run = framework_run(
        ControlledTransform(Operator::identity(d) - pi, pi), psi_i, psi_f, 1.0,
        weak_value(pi, psi_i, psi_f), "strong projector");
    // C = z0* z1 with z0 = <f|(1-P)|i>, z1 = <f|P|i>. Invert through the
    // better-conditioned branch probability: r = C/(2 P(0)) = z1/z0 gives
    // w = r/(1+r); the P(1) route gives w = 1/(1 + C*/(2 P(1))).
    run.invert = [](const OutcomeDistribution& f) {
      const Complex c = extract_complex(f);
      const double p0 = f.prob(Setting::Z, "0");
      const double p1 = f.prob(Setting::Z, "1");
      if (p0 <= kDegenerateFloor && p1 <= kDegenerateFloor)
        throw DegenerateEstimatorError("strong projector: both branch probabilities vanish");
      if (p0 >= p1) {
        const Complex r = c / (2.0 * p0);
        if (std::abs(Complex{1.0, 0.0} + r) <= kDegenerateFloor)
          throw DegenerateEstimatorError("strong projector: post-selection overlap vanishes");
        return r / (Complex{1.0, 0.0} + r);
      }
      const Complex r = std::conj(c) / (2.0 * p1);
      if (std::abs(Complex{1.0, 0.0} + r) <= kDegenerateFloor)
        throw DegenerateEstimatorError("strong projector: post-selection overlap vanishes");
      return Complex{1.0, 0.0} / (Complex{1.0, 0.0} + r);
    };
    return run;
  }

  if (const auto* sp = std::get_if<StrongPauli>(&spec.variant)) {
    if (d != 2) throw std::invalid_argument("strong Pauli protocol requires a qubit system");
    const Operator sigma = pauli(sp->axis);
    return framework_run(ControlledTransform(Operator::identity(2), sigma), psi_i, psi_f, 2.0,
                         weak_value(sigma, psi_i, psi_f), "strong pauli");
  }

  if (const auto* mv = std::get_if<ModularValue>(&spec.variant)) {
    if (!is_hermitian(spec.observable))
      throw std::invalid_argument("observable must be Hermitian");
    const double xi = mv->xi;
    const Operator u = herm_func(spec.observable, [xi](double a) {
      return Complex{std::cos(xi * a), -std::sin(xi * a)};
    });
    return framework_run(ControlledTransform(Operator::identity(d), u), psi_i, psi_f, 2.0,
                         modular_value(spec.observable, xi, psi_i, psi_f), "modular value");
  }

  // ExpandedHilbert: no controlled transformation; the system is resolved in
  // the observable eigenbasis jointly with the probe X/Y readout.
  if (!is_hermitian(spec.observable)) throw std::invalid_argument("observable must be Hermitian");
  const EigenSystem es = herm_eig(spec.observable);
  const std::size_t n = es.values.size();

  ProtocolRun run;
  run.required = {Setting::X, Setting::Y};
  SettingDist& x = run.exact.emplace(Setting::X);
  SettingDist& y = run.exact.emplace(Setting::Y);
  for (std::size_t j = 0; j < n; ++j) {
    const Ket v = es.vectors.column(j);
    const Complex fj = inner(v, psi_f);
    const Complex ij = inner(v, psi_i);
    const Complex iu{0.0, 1.0};
    const std::string tag = std::to_string(j);
    x.outcomes.emplace_back(tag + ":+", clampp(0.25 * std::norm(fj + ij)));
    x.outcomes.emplace_back(tag + ":-", clampp(0.25 * std::norm(fj - ij)));
    y.outcomes.emplace_back(tag + ":+i", clampp(0.25 * std::norm(fj - iu * ij)));
    y.outcomes.emplace_back(tag + ":-i", clampp(0.25 * std::norm(fj + iu * ij)));
  }

  const std::vector<EigenCluster> clusters = cluster_eigenvalues(es.values);
  run.invert = [clusters, n](const OutcomeDistribution& f) {
    const SettingDist& fx = f.at(Setting::X);
    const SettingDist& fy = f.at(Setting::Y);
    std::vector<Complex> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string tag = std::to_string(j);
      c[j] = Complex{fx.prob(tag + ":+") - fx.prob(tag + ":-"),
                     fy.prob(tag + ":+i") - fy.prob(tag + ":-i")};
    }
    Complex num{0.0, 0.0}, den{0.0, 0.0};
    for (const EigenCluster& cl : clusters) {
      Complex sum{0.0, 0.0};
      for (std::size_t j : cl.members) sum += c[j];
      num += cl.value * sum;
      den += sum;
    }
    if (std::abs(den) <= kDegenerateFloor)
      throw DegenerateEstimatorError("expanded Hilbert: summed C_j vanishes (zero overlap)");
    return num / den;
  };
  run.exact_target = weak_value(spec.observable, psi_i, psi_f);
  run.success_probability = 1.0;
  return run;
}

EstimateReport run_exact(const ProtocolSpec& spec) {
  const ProtocolRun run = make_run(spec);
  EstimateReport report;
  report.estimate = run.invert(run.exact);
  report.exact_target = run.exact_target;
  report.bias = report.estimate - run.exact_target;
  report.success_probability = run.success_probability;
  return report;
}

EstimateReport conventional_weak(const Operator& a, double xi, const Ket& psi_i,
                                 const Ket& psi_f) {
  return run_exact({ConventionalWeak{xi}, a, psi_i, psi_f});
}

EstimateReport modified_weak(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f) {
  return run_exact({ModifiedWeak{xi}, a, psi_i, psi_f});
}

EstimateReport strong_projector(const Operator& pi, const Ket& psi_i, const Ket& psi_f) {
  return run_exact({StrongProjector{}, pi, psi_i, psi_f});
}

EstimateReport strong_pauli(PauliAxis axis, const Ket& psi_i, const Ket& psi_f) {
  return run_exact({StrongPauli{axis}, pauli(axis), psi_i, psi_f});
}

EstimateReport modular_protocol(const Operator& a, double xi, const Ket& psi_i,
                                const Ket& psi_f) {
  return run_exact({ModularValue{xi}, a, psi_i, psi_f});
}

EstimateReport expanded_hilbert(const Operator& a, const Ket& psi_i, const Ket& psi_f) {
  return run_exact({ExpandedHilbert{}, a, psi_i, psi_f});
}

Complex kd_protocol(const Operator& rho_in, const Ket& ket_a, const Ket& ket_b) {
  if (!is_hermitian(rho_in) || !is_psd(rho_in) ||
      std::abs(rho_in.trace().real() - 1.0) > 1e-9)
    throw PhysicalityError("rho_in is not a density operator");
  const Ket a = ket_a.normalized();
  const Ket b = ket_b.normalized();
  const ControlledTransform ct(Operator::identity(rho_in.dim()), outer(a, a));
  const Boundary boundary(rho_in, outer(b, b));
  OutcomeDistribution dist = joint_probabilities(ct, boundary, Setting::X);
  dist.merge(joint_probabilities(ct, boundary, Setting::Y));
  return extract_complex(dist);
}

ProtocolSpec anomalous_benchmark(ProtocolVariant v) {
  const double theta = std::numbers::pi / 3.0;
  const Ket psi_i{Complex{std::cos(theta), 0.0}, Complex{std::sin(theta), 0.0}};
  const Ket psi_f{Complex{std::cos(theta), 0.0}, Complex{-std::sin(theta), 0.0}};
  return ProtocolSpec{std::move(v), pauli_z(), psi_i, psi_f};
}

}  // namespace wvsim
