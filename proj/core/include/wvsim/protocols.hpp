#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wvsim/framework.hpp"
#include "wvsim/linalg.hpp"

namespace wvsim {

enum class PauliAxis { X, Y, Z };
Operator pauli(PauliAxis axis);

// Protocol variants. Couplings live in the variant; the observable and the
// boundary live in ProtocolSpec.
struct ConventionalWeak { double xi; };   // joint unitary exp(-i xi A (x) sigma_y), probe |0>
struct ModifiedWeak { double xi; };       // {T0, T1} = {1, xi A}
struct StrongProjector {};                // {T0, T1} = {1 - P, P}, P a projector
struct StrongPauli { PauliAxis axis; };   // {T0, T1} = {1, sigma_i}
struct ModularValue { double xi; };       // {T0, T1} = {1, exp(-i xi A)}
struct ExpandedHilbert {};                // joint state (|psi_f>|0> + |psi_i>|1>)/sqrt(2)

using ProtocolVariant = std::variant<ConventionalWeak, ModifiedWeak, StrongProjector,
                                     StrongPauli, ModularValue, ExpandedHilbert>;

struct ProtocolSpec {
  ProtocolVariant variant;
  Operator observable;  // ignored by StrongPauli (the axis picks it)
  Ket psi_i;
  Ket psi_f;
};

std::string protocol_name(const ProtocolVariant& v);
std::optional<double> protocol_xi(const ProtocolVariant& v);
ProtocolVariant with_xi(const ProtocolVariant& v, double xi);

struct EstimateReport {
  Complex estimate{0.0, 0.0};
  Complex exact_target{0.0, 0.0};
  std::optional<Complex> bias;      // exact-probability runs only
  std::optional<double> std_error;  // shot runs
  double success_probability = 0.0;
  std::array<std::optional<std::uint64_t>, 3> shots_used;  // per setting X/Y/Z
};

/// Exact description of one protocol run: the outcome distributions it
/// needs, the inversion from measured frequencies back to the protocol's
/// complex estimate, and the analytically known target.
struct ProtocolRun {
  OutcomeDistribution exact;
  std::vector<Setting> required;
  std::function<Complex(const OutcomeDistribution&)> invert;
  Complex exact_target{0.0, 0.0};
  double success_probability = 0.0;
};

ProtocolRun make_run(const ProtocolSpec& spec);

/// Exact-probability evaluation of a protocol (estimate, bias, success).
EstimateReport run_exact(const ProtocolSpec& spec);

EstimateReport conventional_weak(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f);
EstimateReport modified_weak(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f);
EstimateReport strong_projector(const Operator& pi, const Ket& psi_i, const Ket& psi_f);
EstimateReport strong_pauli(PauliAxis axis, const Ket& psi_i, const Ket& psi_f);
EstimateReport modular_protocol(const Operator& a, double xi, const Ket& psi_i, const Ket& psi_f);
EstimateReport expanded_hilbert(const Operator& a, const Ket& psi_i, const Ket& psi_f);

/// Kirkwood-Dirac entry via the framework: {T0, T1} = {1, |a><a|}, boundary
/// (rho_in, |b><b|). Returns <b|a><a|rho_in|b>.
Complex kd_protocol(const Operator& rho_in, const Ket& ket_a, const Ket& ket_b);

/// The repo-wide anomalous benchmark: A = sigma_z,
/// psi_i = cos(pi/3)|0> + sin(pi/3)|1>, psi_f = cos(pi/3)|0> - sin(pi/3)|1>,
/// true weak value -2.
ProtocolSpec anomalous_benchmark(ProtocolVariant v);

}  // namespace wvsim
