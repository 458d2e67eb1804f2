#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wvsim/diagram.hpp"
#include "wvsim/errors.hpp"

using namespace wvsim;

namespace {

Diagram canonical(const Ket& psi_i, const Ket& psi_f, const Operator& t1) {
  return Diagram({outer(psi_i, psi_i), Operator::identity(psi_i.dim()),
                  outer(psi_f, psi_f), t1});
}

Diagram random_diagram(std::size_t d, std::mt19937_64& rng) {
  return Diagram({oracle::random_matrix(d, rng), oracle::random_matrix(d, rng),
                  oracle::random_matrix(d, rng), oracle::random_matrix(d, rng)});
}

Diagram random_psd_diagram(std::size_t d, std::mt19937_64& rng) {
  auto psd = [&]() {
    const Operator g = oracle::random_matrix(d, rng);
    return Complex{1.0 / d, 0.0} * (g * dagger(g));
  };
  return Diagram({psd(), psd(), psd(), psd()});
}

}  // namespace

TEST_CASE("evaluate: canonical loop reproduces the framework value") {
  const Diagram d = canonical(ket_plus(), ket0(), pauli_z());
  CHECK(std::abs(evaluate(d) - Complex{0.5, 0.0}) < 1e-12);
}

TEST_CASE("evaluate: all-identity loop gives the dimension") {
  for (std::size_t dim : {2, 3, 5}) {
    const Diagram d({Operator::identity(dim), Operator::identity(dim),
                     Operator::identity(dim), Operator::identity(dim)});
    CHECK(std::abs(evaluate(d) - Complex{static_cast<double>(dim), 0.0}) < 1e-12);
  }
}

TEST_CASE("evaluate: state overlap loop") {
  std::mt19937_64 rng(8);
  const Operator ri = oracle::random_density(3, rng);
  const Operator rf = oracle::random_density(3, rng);
  const Diagram d({ri, Operator::identity(3), rf, Operator::identity(3)});
  CHECK(std::abs(evaluate(d) - (ri * rf).trace()) < 1e-12);
}

TEST_CASE("rotate: identity shifts and cyclic invariance") {
  std::mt19937_64 rng(12);
  const Diagram d = random_diagram(3, rng);

  const Diagram r0 = rotate(d, 0);
  const Diagram r4 = rotate(d, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK((r0.nodes[i] - d.nodes[i]).frobenius_norm() == doctest::Approx(0.0));
    CHECK((r4.nodes[i] - d.nodes[i]).frobenius_norm() == doctest::Approx(0.0));
  }

  const Complex v = evaluate(d);
  for (int k : {1, 2, 3, -1, -2, 7}) CHECK(std::abs(evaluate(rotate(d, k)) - v) < 1e-12);
}

TEST_CASE("rotate: slot convention moves node i to slot i + k") {
  std::mt19937_64 rng(13);
  const Diagram d = random_diagram(2, rng);
  const Diagram r = rotate(d, 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK((r.nodes[(i + 1) % 4] - d.nodes[i]).frobenius_norm() == doctest::Approx(0.0));
}

TEST_CASE("cyclic invariance over many random loops") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 2 + trial % 7;
    const Diagram d = random_diagram(dim, rng);
    const Complex v = evaluate(d);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(evaluate(rotate(d, k)) - v) < 1e-12);
  }
}

TEST_CASE("spectral_split: Pauli node") {
  const Diagram d = canonical(ket_plus(), ket0(), pauli_z());
  const auto terms = spectral_split(d, 3);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].weight == doctest::Approx(1.0));
  CHECK(terms[1].weight == doctest::Approx(-1.0));
  CHECK((terms[0].child.nodes[3] - outer(ket0(), ket0())).frobenius_norm() < 1e-12);
  CHECK((terms[1].child.nodes[3] - outer(ket1(), ket1())).frobenius_norm() < 1e-12);
}

TEST_CASE("spectral_split: projector spectrum is ones and zeros") {
  std::mt19937_64 rng(15);
  const Ket v = oracle::random_ket(3, rng);
  const Diagram d({Operator::identity(3), Operator::identity(3), Operator::identity(3),
                   outer(v, v)});
  const auto terms = spectral_split(d, 3);
  REQUIRE(terms.size() == 3);
  CHECK(terms[0].weight == doctest::Approx(1.0));
  CHECK(terms[1].weight == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(terms[2].weight == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectral_split recombines exactly") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t dim = 2 + trial % 4;
    Diagram d = random_diagram(dim, rng);
    d.nodes[3] = oracle::random_hermitian(dim, rng);
    const auto terms = spectral_split(d, 3);
    Complex sum{0.0, 0.0};
    for (const auto& t : terms) sum += t.weight * evaluate(t.child);
    CHECK(std::abs(sum - evaluate(d)) < 1e-10);
  }
}

TEST_CASE("spectral_split: weighted children reproduce the weak-value loop") {
  // Both sides of the decomposition identity computed separately for a
  // random qutrit pair.
  std::mt19937_64 rng(17);
  const Ket psi_i = oracle::random_ket(3, rng);
  const Ket psi_f = oracle::random_ket(3, rng);
  const Operator a = oracle::random_hermitian(3, rng);
  const Diagram d = canonical(psi_i, psi_f, a);

  Complex lhs{0.0, 0.0};
  for (const auto& t : spectral_split(d, 3)) lhs += t.weight * evaluate(t.child);
  const Complex rhs = inner(psi_i, psi_f) * inner(psi_f, a.apply(psi_i));
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("spectral_split recombination is gauge invariant under degeneracy") {
  std::mt19937_64 rng(18);
  const Operator u = oracle::random_unitary(3, rng);
  Operator diag(3);
  diag.at(0, 0) = 2.0;
  diag.at(1, 1) = 2.0;  // degenerate pair
  diag.at(2, 2) = -1.0;
  const Operator a = u * diag * dagger(u);
  Diagram d = random_diagram(3, rng);
  d.nodes[1] = a;
  Complex sum{0.0, 0.0};
  for (const auto& t : spectral_split(d, 1)) sum += t.weight * evaluate(t.child);
  CHECK(std::abs(sum - evaluate(d)) < 1e-10);
}

TEST_CASE("spectral_split rejects non-Hermitian nodes") {
  std::mt19937_64 rng(19);
  const Diagram d = random_diagram(3, rng);
  CHECK_THROWS_AS(spectral_split(d, 0), std::invalid_argument);
}

TEST_CASE("compile: canonical loop is already normalized") {
  const double xi = 0.7;
  const Diagram d = canonical(ket_plus(), ket0(), xi * pauli_z());
  const FrameworkInstance inst = compile(d);
  CHECK((inst.ct.t0 - Operator::identity(2)).frobenius_norm() < 1e-12);
  CHECK((inst.ct.t1 - xi * pauli_z()).frobenius_norm() < 1e-12);
  CHECK(std::abs(inst.scale - Complex{1.0, 0.0}) < 1e-12);

  const Complex measured =
      extract_complex(joint_probabilities(inst.ct, inst.boundary));
  CHECK(std::abs(inst.scale * measured - evaluate(d)) < 1e-10);
}

TEST_CASE("compile: rotated eigenprojector loop reproduces the split value") {
  // The POVM-element form: state slot |psi_i><psi_i|, effect slot the
  // eigenprojector, identity on the lower arc.
  std::mt19937_64 rng(20);
  const Ket psi_i = oracle::random_ket(2, rng);
  const Ket psi_f = oracle::random_ket(2, rng);
  const Ket aj = oracle::random_ket(2, rng);
  const Diagram povm_form({outer(psi_i, psi_i), outer(psi_f, psi_f), outer(aj, aj),
                           Operator::identity(2)});

  const Complex expected = inner(psi_i, psi_f) * inner(psi_f, aj) * inner(aj, psi_i);
  CHECK(std::abs(evaluate(povm_form) - expected) < 1e-12);

  const FrameworkInstance inst = compile(povm_form);
  const Complex measured = extract_complex(joint_probabilities(inst.ct, inst.boundary));
  CHECK(std::abs(inst.scale * measured - expected) < 1e-10);

  // The prepared-state form: state slot the eigenprojector.
  const Diagram state_form({outer(aj, aj), outer(psi_i, psi_i), outer(psi_f, psi_f),
                            Operator::identity(2)});
  CHECK(std::abs(evaluate(state_form) - expected) < 1e-12);
  const FrameworkInstance inst2 = compile(state_form);
  const Complex measured2 = extract_complex(joint_probabilities(inst2.ct, inst2.boundary));
  CHECK(std::abs(inst2.scale * measured2 - expected) < 1e-10);
}

TEST_CASE("compile: non-PSD slots are rejected with the slot named") {
  const Diagram bad_state({pauli_z(), Operator::identity(2), outer(ket0(), ket0()),
                           Operator::identity(2)});
  CHECK_THROWS_WITH_AS(compile(bad_state),
                       "diagram not compilable: state slot (node 0) is not PSD",
                       PhysicalityError);

  const Diagram bad_effect({outer(ket0(), ket0()), Operator::identity(2), pauli_z(),
                            Operator::identity(2)});
  CHECK_THROWS_WITH_AS(compile(bad_effect),
                       "diagram not compilable: effect slot (node 2) is not PSD",
                       PhysicalityError);
}

TEST_CASE("compilation soundness: every compilable rotation measures the trace") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const Diagram d = random_psd_diagram(dim, rng);
    const Complex v = evaluate(d);
    for (int k = 0; k < 4; ++k) {
      const Diagram r = rotate(d, k);
      const FrameworkInstance inst = compile(r);
      const Complex measured =
          extract_complex(joint_probabilities(inst.ct, inst.boundary));
      CHECK(std::abs(inst.scale * measured - v) < 1e-10);
    }
  }
}

TEST_CASE("compile: scale tracks every repair divisor") {
  std::mt19937_64 rng(22);
  Diagram d = random_psd_diagram(3, rng);
  d.nodes[2] = 5.0 * d.nodes[2];  // push the effect slot out of range
  d.nodes[1] = 7.0 * d.nodes[1];
  d.scale = Complex{0.4, -0.3};
  const FrameworkInstance inst = compile(d);
  CHECK(spectral_norm(inst.boundary.final_effect) <= 1.0 + 1e-9);
  CHECK(spectral_norm(inst.ct.t0) <= 1.0 + 1e-9);
  const Complex measured = extract_complex(joint_probabilities(inst.ct, inst.boundary));
  CHECK(std::abs(inst.scale * measured - evaluate(d)) < 1e-10);
}

TEST_CASE("diagram JSON round-trip") {
  std::mt19937_64 rng(23);
  Diagram d = random_diagram(3, rng);
  d.scale = Complex{1.25, -0.5};
  const std::string text = serialize_diagram(d);
  const Diagram back = parse_diagram(text);
  REQUIRE(back.nodes[0].dim() == 3);
  for (std::size_t i = 0; i < 4; ++i) {
    const double rel = (back.nodes[i] - d.nodes[i]).frobenius_norm() /
                       std::max(1.0, d.nodes[i].frobenius_norm());
    CHECK(rel < 1e-15);
  }
  CHECK(std::abs(evaluate(back) - evaluate(d)) < 1e-12);
}

TEST_CASE("diagram JSON rejects malformed input") {
  CHECK_THROWS(parse_diagram("{\"nodes\": []}"));
  CHECK_THROWS(parse_diagram("not json"));
  CHECK_THROWS(parse_diagram("{\"nodes\": [[[0,0],[0,0],[0,0]],[],[],[]]}"));
}
