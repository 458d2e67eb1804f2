#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wvsim/linalg.hpp"

namespace wvsim {

Ket ket0();
Ket ket1();
Ket ket_plus();
Ket ket_minus();
Ket ket_plus_i();
Ket ket_minus_i();

/// Probe readout basis. X resolves {|+>, |->}, Y resolves {|+i>, |-i>},
/// Z resolves {|0>, |1>}.
enum class Setting { X = 0, Y = 1, Z = 2 };

constexpr std::array<Setting, 3> kAllSettings{Setting::X, Setting::Y, Setting::Z};
const char* setting_name(Setting s);

/// The pair (T0, T1) defining T = T0 (x) |0><0| + T1 (x) |1><1|.
/// Both branches must be contractions (largest singular value <= 1).
struct ControlledTransform {
  Operator t0;
  Operator t1;

  ControlledTransform(Operator t0_in, Operator t1_in);
};

/// Pre-selection density operator and post-selection effect.
struct Boundary {
  Operator initial;       // Hermitian, PSD, trace 1
  Operator final_effect;  // Hermitian, PSD, spectral norm <= 1

  Boundary(Operator initial_in, Operator final_effect_in);
  static Boundary pure(const Ket& psi_i, const Ket& psi_f);
};

/// Probability table for one probe-basis setting. Outcomes keep a fixed
/// order; "discard" aggregates transformation and post-selection failure.
struct SettingDist {
  std::vector<std::pair<std::string, double>> outcomes;

  double prob(const std::string& label) const;
  double sum() const;
};

struct OutcomeDistribution {
  std::array<std::optional<SettingDist>, 3> by_setting;

  const SettingDist& at(Setting s) const;
  SettingDist& emplace(Setting s);
  bool has(Setting s) const;
  double prob(Setting s, const std::string& label) const;
  void merge(const OutcomeDistribution& other);
};

/// Joint probabilities of (transformation succeeds, post-selection succeeds,
/// probe outcome) for one setting, probe prepared in |+>.
OutcomeDistribution joint_probabilities(const ControlledTransform& ct, const Boundary& b,
                                        Setting s);

/// All three settings at once.
OutcomeDistribution joint_probabilities(const ControlledTransform& ct, const Boundary& b);

/// P(+) - P(-) + i [P(+i) - P(-i)]; requires X and Y settings populated.
/// Equals tr(rho_i T0^dag F T1) when the distribution came from
/// joint_probabilities.
Complex extract_complex(const OutcomeDistribution& dist);

/// <psi_f|A|psi_i> / <psi_f|psi_i>. Throws DegenerateEstimatorError when the
/// overlap magnitude is below 1e-12.
Complex weak_value(const Operator& a, const Ket& psi_i, const Ket& psi_f);

/// <psi_f|exp(-i xi A)|psi_i> / <psi_f|psi_i> for Hermitian A.
Complex modular_value(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f);

/// Kirkwood-Dirac quasiprobability grid rho(a, b) = <b|a><a|rho_in|b>.
/// basis_a and basis_b are unitaries whose columns are the basis kets;
/// entry (a, b) sits at row a, column b.
Operator kirkwood_dirac(const Operator& rho_in, const Operator& basis_a, const Operator& basis_b);

}  // namespace wvsim
