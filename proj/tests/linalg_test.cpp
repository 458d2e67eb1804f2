#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wvsim/framework.hpp"
#include "wvsim/linalg.hpp"

using namespace wvsim;

namespace {

double op_dist(const Operator& a, const Operator& b) { return (a - b).frobenius_norm(); }

double ket_dist(const Ket& a, const Ket& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("tensor: identity and basis bookkeeping") {
  CHECK(op_dist(tensor(Operator::identity(2), Operator::identity(2)), Operator::identity(4)) ==
        doctest::Approx(0.0));

  const Ket t = tensor(Ket::basis(2, 0), Ket::basis(2, 1));
  CHECK(ket_dist(t, Ket::basis(4, 1)) == doctest::Approx(0.0));
}

TEST_CASE("tensor: sigma_z (x) sigma_x against explicit 4x4 action") {
  const Operator m = tensor(pauli_z(), pauli_x());
  // Oracle: multiply out the 4x4 matrix entry by entry.
  Operator expected(4);
  const Operator a = pauli_z(), b = pauli_x();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          expected.at(i * 2 + k, j * 2 + l) = a.at(i, j) * b.at(k, l);
  CHECK(op_dist(m, expected) < 1e-15);

  const Ket out = m.apply(tensor(Ket::basis(2, 0), Ket::basis(2, 0)));
  CHECK(ket_dist(out, tensor(Ket::basis(2, 0), Ket::basis(2, 1))) < 1e-15);
}

TEST_CASE("tensor is associative under the flattening convention") {
  std::mt19937_64 rng(11);
  const Operator a = oracle::random_matrix(2, rng);
  const Operator b = oracle::random_matrix(3, rng);
  const Operator c = oracle::random_matrix(2, rng);
  CHECK(op_dist(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) == doctest::Approx(0.0));
}

TEST_CASE("dagger") {
  CHECK(op_dist(dagger(pauli_y()), pauli_y()) < 1e-15);

  std::mt19937_64 rng(7);
  const Operator m = oracle::random_matrix(3, rng);
  CHECK(op_dist(dagger(dagger(m)), m) == doctest::Approx(0.0));

  CHECK(op_dist(dagger(outer(Ket::basis(2, 0), Ket::basis(2, 1))),
                outer(Ket::basis(2, 1), Ket::basis(2, 0))) == doctest::Approx(0.0));
}

TEST_CASE("herm_eig: diagonal input") {
  const EigenSystem es = herm_eig(pauli_z());
  REQUIRE(es.values.size() == 2);
  CHECK(es.values[0] == doctest::Approx(1.0));
  CHECK(es.values[1] == doctest::Approx(-1.0));
  CHECK(std::abs(inner(es.vectors.column(0), Ket::basis(2, 0))) == doctest::Approx(1.0));
  CHECK(std::abs(inner(es.vectors.column(1), Ket::basis(2, 1))) == doctest::Approx(1.0));
}

TEST_CASE("herm_eig: identity spectrum") {
  const EigenSystem es = herm_eig(Operator::identity(5));
  for (double v : es.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("herm_eig: reconstruction and orthonormality on random Hermitian input") {
  std::mt19937_64 rng(42);
  for (std::size_t dim : {2, 3, 4, 8, 16}) {
    const Operator m = oracle::random_hermitian(dim, rng);
    const EigenSystem es = herm_eig(m);

    Operator recon(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const Ket v = es.vectors.column(j);
      recon = recon + Complex{es.values[j], 0.0} * outer(v, v);
    }
    CHECK(op_dist(recon, m) < 1e-10);
    CHECK(op_dist(dagger(es.vectors) * es.vectors, Operator::identity(dim)) < 1e-10);
    for (std::size_t j = 1; j < dim; ++j) CHECK(es.values[j - 1] >= es.values[j]);
  }
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  CHECK_THROWS_AS(herm_eig(Operator{{0.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("herm_func: quarter-turn exponential of sigma_z") {
  const double half_pi = std::numbers::pi / 2.0;
  const Operator u = herm_func(pauli_z(), [half_pi](double a) {
    return Complex{std::cos(half_pi * a), -std::sin(half_pi * a)};
  });
  CHECK(op_dist(u, Operator{{Complex{0.0, -1.0}, 0.0}, {0.0, Complex{0.0, 1.0}}}) < 1e-12);
}

TEST_CASE("herm_func: identity function returns the input") {
  std::mt19937_64 rng(3);
  const Operator m = oracle::random_hermitian(4, rng);
  CHECK(op_dist(herm_func(m, [](double a) { return Complex{a, 0.0}; }), m) < 1e-10);
}

TEST_CASE("herm_func: projector exponential against a truncated power series") {
  std::mt19937_64 rng(5);
  const Ket v = oracle::random_ket(3, rng);
  const Operator pi = outer(v, v);
  const double xi = 0.8;
  const Operator via_eig =
      herm_func(pi, [xi](double a) { return Complex{std::cos(xi * a), -std::sin(xi * a)}; });

  Operator series = Operator::identity(3);
  Operator term = Operator::identity(3);
  const Complex micro_xi{0.0, -xi};
  for (int k = 1; k <= 40; ++k) {
    term = Complex{1.0 / k, 0.0} * micro_xi * (term * pi);
    series = series + term;
  }
  CHECK(op_dist(via_eig, series) < 1e-10);

  // Same closed form the spec-level identity uses: 1 + (e^{-i xi} - 1) Pi.
  const Operator closed =
      Operator::identity(3) + (std::exp(Complex{0.0, -xi}) - Complex{1.0, 0.0}) * pi;
  CHECK(op_dist(via_eig, closed) < 1e-10);
}

TEST_CASE("herm_func: commuting exponentials compose additively") {
  std::mt19937_64 rng(9);
  const Operator a = oracle::random_hermitian(4, rng);
  auto expo = [&](double s) {
    return herm_func(a, [s](double l) { return Complex{std::cos(s * l), -std::sin(s * l)}; });
  };
  CHECK(op_dist(expo(0.3) * expo(0.5), expo(0.8)) < 1e-10);
}

TEST_CASE("dft_matrix: small cases, unitarity, double application") {
  const Operator f1 = dft_matrix(1);
  CHECK(std::abs(f1.at(0, 0) - Complex{1.0, 0.0}) < 1e-15);

  const double r = 1.0 / std::sqrt(2.0);
  CHECK(op_dist(dft_matrix(2), Operator{{r, r}, {r, -r}}) < 1e-14);

  const Operator f = dft_matrix(64);
  CHECK(op_dist(dagger(f) * f, Operator::identity(64)) < 1e-12);

  // F^2 maps |x> to |(-x) mod n>.
  const Operator f8 = dft_matrix(8);
  const Operator ff = f8 * f8;
  for (std::size_t x = 0; x < 8; ++x) {
    const Ket out = ff.apply(Ket::basis(8, x));
    const std::size_t expect = (8 - x) % 8;
    CHECK(std::abs(out[expect]) == doctest::Approx(1.0));
  }

  // Row p = 0 is the uniform superposition.
  for (std::size_t x = 0; x < 8; ++x)
    CHECK(std::abs(f8.at(0, x) - Complex{1.0 / std::sqrt(8.0), 0.0}) < 1e-14);
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(pauli_x()) == doctest::Approx(1.0));
  CHECK(spectral_norm(0.3 * Operator::identity(3)) == doctest::Approx(0.3));

  // Construction oracle: U diag(s) V^dag has norm max(s).
  std::mt19937_64 rng(21);
  const Operator u = oracle::random_unitary(4, rng);
  const Operator v = oracle::random_unitary(4, rng);
  Operator s(4);
  const double svals[4] = {0.9, 0.5, 0.2, 0.05};
  for (int i = 0; i < 4; ++i) s.at(i, i) = svals[i];
  CHECK(spectral_norm(u * s * dagger(v)) == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("operator predicates") {
  CHECK(is_hermitian(pauli_y()));
  CHECK(!is_hermitian(Operator{{0.0, 1.0}, {0.0, 0.0}}));
  CHECK(is_unitary(pauli_x()));
  CHECK(is_projector(outer(ket_plus(), ket_plus())));
  CHECK(!is_projector(0.5 * Operator::identity(2)));
  CHECK(is_psd(outer(ket_plus(), ket_plus())));
  CHECK(!is_psd(pauli_z()));
  CHECK(is_contraction(pauli_x()));
  CHECK(!is_contraction(2.0 * Operator::identity(2)));
}

TEST_CASE("ket basics") {
  CHECK(ket_plus().is_normalized());
  CHECK_THROWS_AS(Ket(std::vector<Complex>{}).normalized(), std::invalid_argument);
  const Complex ip = inner(ket_plus(), Ket::basis(2, 0));
  CHECK(std::abs(ip - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-14);
}
