#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace wvsim {

using Complex = std::complex<double>;

/// Column vector over a finite-dimensional Hilbert space.
class Ket {
 public:
  explicit Ket(std::size_t dim) : amps_(dim, Complex{0.0, 0.0}) {}
  Ket(std::initializer_list<Complex> amps) : amps_(amps) {}
  explicit Ket(std::vector<Complex> amps) : amps_(std::move(amps)) {}

  static Ket basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amps_.size(); }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  const std::vector<Complex>& amps() const { return amps_; }

  double norm() const;
  Ket normalized() const;
  bool is_normalized(double tol = 1e-10) const;
  bool is_finite() const;

 private:
  std::vector<Complex> amps_;
};

Ket operator*(Complex c, const Ket& k);
Ket operator+(const Ket& a, const Ket& b);
Ket operator-(const Ket& a, const Ket& b);

/// <bra|ket>; conjugates the left argument.
Complex inner(const Ket& bra, const Ket& ket);

/// Dense square complex matrix, row-major.
class Operator {
 public:
  explicit Operator(std::size_t dim) : dim_(dim), entries_(dim * dim, Complex{0.0, 0.0}) {}
  Operator(std::size_t dim, std::vector<Complex> entries);
  Operator(std::initializer_list<std::initializer_list<Complex>> rows);

  static Operator identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Complex& at(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
  const std::vector<Complex>& entries() const { return entries_; }

  Ket apply(const Ket& k) const;
  Ket column(std::size_t c) const;
  Complex trace() const;
  double frobenius_norm() const;
  bool is_finite() const;

 private:
  std::size_t dim_;
  std::vector<Complex> entries_;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex c, const Operator& m);
Operator operator*(double c, const Operator& m);

/// |a><b|
Operator outer(const Ket& a, const Ket& b);

/// Conjugate transpose.
Operator dagger(const Operator& m);

/// Kronecker product; the left factor's index varies slower.
Operator tensor(const Operator& a, const Operator& b);
Ket tensor(const Ket& a, const Ket& b);

bool is_hermitian(const Operator& m, double tol = 1e-10);
bool is_unitary(const Operator& m, double tol = 1e-10);
bool is_projector(const Operator& m, double tol = 1e-10);
bool is_psd(const Operator& m, double tol = 1e-9);
bool is_contraction(const Operator& m, double tol = 1e-9);

struct EigenSystem {
  std::vector<double> values;  // descending
  Operator vectors;            // unitary; column j pairs with values[j]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Throws std::invalid_argument for non-Hermitian input.
EigenSystem herm_eig(const Operator& m);

/// V f(diag) V^dag for Hermitian m.
Operator herm_func(const Operator& m, const std::function<Complex(double)>& f);

/// Unitary DFT matrix: entry (p, x) = exp(-2 pi i p x / n) / sqrt(n).
/// Row p = 0 is the uniform superposition.
Operator dft_matrix(std::size_t n);

/// Largest singular value.
double spectral_norm(const Operator& m);

Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

}  // namespace wvsim
