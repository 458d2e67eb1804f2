#include "wvsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace wvsim {

namespace {

double abs2(Complex c) { return c.real() * c.real() + c.imag() * c.imag(); }

}  // namespace

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  Ket k(dim);
  k[index] = 1.0;
  return k;
}

double Ket::norm() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += abs2(a);
  return std::sqrt(s);
}

Ket Ket::normalized() const {
  double n = norm();
  if (n < 1e-300) throw std::invalid_argument("cannot normalize zero vector");
  Ket out = *this;
  for (Complex& a : out.amps_) a /= n;
  return out;
}

bool Ket::is_normalized(double tol) const { return std::abs(norm() * norm() - 1.0) < tol; }

bool Ket::is_finite() const {
  for (const Complex& a : amps_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

Ket operator*(Complex c, const Ket& k) {
  Ket out = k;
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] *= c;
  return out;
}

Ket operator+(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("ket dimension mismatch");
  Ket out = a;
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] += b[i];
  return out;
}

Ket operator-(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("ket dimension mismatch");
  Ket out = a;
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] -= b[i];
  return out;
}

Complex inner(const Ket& bra, const Ket& ket) {
  if (bra.dim() != ket.dim()) throw std::invalid_argument("ket dimension mismatch");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < bra.dim(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

Operator::Operator(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) throw std::invalid_argument("entry count != dim^2");
}

Operator::Operator(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()), entries_() {
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw std::invalid_argument("operator rows must be square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

Operator Operator::identity(std::size_t dim) {
  Operator m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Ket Operator::apply(const Ket& k) const {
  if (k.dim() != dim_) throw std::invalid_argument("operator/ket dimension mismatch");
  Ket out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    Complex s{0.0, 0.0};
    const Complex* row = entries_.data() + r * dim_;
    for (std::size_t c = 0; c < dim_; ++c) s += row[c] * k[c];
    out[r] = s;
  }
  return out;
}

Ket Operator::column(std::size_t c) const {
  Ket out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) out[r] = at(r, c);
  return out;
}

Complex Operator::trace() const {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < dim_; ++i) s += at(i, i);
  return s;
}

double Operator::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& e : entries_) s += abs2(e);
  return std::sqrt(s);
}

bool Operator::is_finite() const {
  for (const Complex& e : entries_)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

Operator operator+(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
  Operator out = a;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out.at(r, c) += b.at(r, c);
  return out;
}

Operator operator-(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
  Operator out = a;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out.at(r, c) -= b.at(r, c);
  return out;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
  const std::size_t n = a.dim();
  Operator out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex arc = a.at(r, k);
      if (arc == Complex{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < n; ++c) out.at(r, c) += arc * b.at(k, c);
    }
  }
  return out;
}

Operator operator*(Complex c, const Operator& m) {
  Operator out = m;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t cc = 0; cc < m.dim(); ++cc) out.at(r, cc) *= c;
  return out;
}

Operator operator*(double c, const Operator& m) { return Complex{c, 0.0} * m; }

Operator outer(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("ket dimension mismatch");
  Operator out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out.at(r, c) = a[r] * std::conj(b[c]);
  return out;
}

Operator dagger(const Operator& m) {
  Operator out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out.at(r, c) = std::conj(m.at(c, r));
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  const std::size_t da = a.dim(), db = b.dim();
  Operator out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const Complex aij = a.at(i, j);
      if (aij == Complex{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l)
          out.at(i * db + k, j * db + l) = aij * b.at(k, l);
    }
  return out;
}

Ket tensor(const Ket& a, const Ket& b) {
  Ket out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < b.dim(); ++k) out[i * b.dim() + k] = a[i] * b[k];
  return out;
}

bool is_hermitian(const Operator& m, double tol) {
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = r; c < m.dim(); ++c)
      if (std::abs(m.at(r, c) - std::conj(m.at(c, r))) > tol) return false;
  return true;
}

bool is_unitary(const Operator& m, double tol) {
  return (dagger(m) * m - Operator::identity(m.dim())).frobenius_norm() < tol;
}

bool is_projector(const Operator& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  return (m * m - m).frobenius_norm() < tol;
}

bool is_psd(const Operator& m, double tol) {
  if (!is_hermitian(m, std::max(tol, 1e-10))) return false;
  EigenSystem es = herm_eig(m);
  return es.values.back() > -tol;
}

bool is_contraction(const Operator& m, double tol) { return spectral_norm(m) <= 1.0 + tol; }

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for complex Hermitian matrices.
//
// Each rotation diagonalizes the 2x2 Hermitian block [[a, b], [conj(b), d]]
// via the unitary with columns u1 = (b, w)/n, u2 = (-w, conj(b))/n, where
// w = lambda - a and lambda is the eigenvalue branch closer to a (keeps the
// rotation angle <= pi/4). Sweeps repeat until the off-diagonal Frobenius
// norm falls below the convergence target.
// ---------------------------------------------------------------------------

namespace {

double offdiag_norm(const Operator& m) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      if (r != c) s += abs2(m.at(r, c));
  return std::sqrt(s);
}

}  // namespace

EigenSystem herm_eig(const Operator& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("herm_eig requires a Hermitian matrix");
  const std::size_t n = m.dim();

  Operator a = m;
  // Symmetrize exactly so rotations preserve Hermiticity bit-for-bit.
  for (std::size_t r = 0; r < n; ++r) {
    a.at(r, r) = Complex{a.at(r, r).real(), 0.0};
    for (std::size_t c = r + 1; c < n; ++c) {
      Complex avg = 0.5 * (a.at(r, c) + std::conj(a.at(c, r)));
      a.at(r, c) = avg;
      a.at(c, r) = std::conj(avg);
    }
  }
  Operator v = Operator::identity(n);

  const double target = 1e-14 * std::max(1.0, a.frobenius_norm());
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps && offdiag_norm(a) > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a.at(p, q);
        if (std::sqrt(abs2(b)) <= target / (n * n)) continue;

        const double ap = a.at(p, p).real();
        const double dq = a.at(q, q).real();
        const double delta = 0.5 * (dq - ap);
        const double root = std::sqrt(delta * delta + abs2(b));
        // Small-magnitude root of w^2 - 2 delta w - |b|^2 = 0 (w = lambda - ap),
        // via the root product to avoid cancellation when |b| << |delta|.
        const double big = (delta >= 0.0) ? delta + root : delta - root;
        const double w = -abs2(b) / big;
        const double nn = std::sqrt(abs2(b) + w * w);
        if (nn < 1e-300) continue;
        // Jacobi unitary restricted to (p, q):  J = [[b/nn, -w/nn], [w/nn, conj(b)/nn]]
        const Complex jpp = b / nn;
        const double jqp = w / nn;
        const double jpq = -w / nn;
        const Complex jqq = std::conj(b) / nn;

        // A <- J^dag A J : update columns then rows.
        for (std::size_t r = 0; r < n; ++r) {
          const Complex arp = a.at(r, p), arq = a.at(r, q);
          a.at(r, p) = arp * jpp + arq * jqp;
          a.at(r, q) = arp * jpq + arq * jqq;
        }
        for (std::size_t c = 0; c < n; ++c) {
          const Complex apc = a.at(p, c), aqc = a.at(q, c);
          a.at(p, c) = std::conj(jpp) * apc + jqp * aqc;
          a.at(q, c) = jpq * apc + std::conj(jqq) * aqc;
        }
        a.at(p, q) = Complex{0.0, 0.0};
        a.at(q, p) = Complex{0.0, 0.0};
        a.at(p, p) = Complex{a.at(p, p).real(), 0.0};
        a.at(q, q) = Complex{a.at(q, q).real(), 0.0};

        // V <- V J
        for (std::size_t r = 0; r < n; ++r) {
          const Complex vrp = v.at(r, p), vrq = v.at(r, q);
          v.at(r, p) = vrp * jpp + vrq * jqp;
          v.at(r, q) = vrp * jpq + vrq * jqq;
        }
      }
    }
  }
  if (offdiag_norm(a) > 1e-10 * std::max(1.0, a.frobenius_norm()))
    throw std::runtime_error("jacobi eigensolver failed to converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a.at(i, i).real() > a.at(j, j).real(); });

  EigenSystem es{std::vector<double>(n), Operator(n)};
  for (std::size_t j = 0; j < n; ++j) {
    es.values[j] = a.at(order[j], order[j]).real();
    for (std::size_t r = 0; r < n; ++r) es.vectors.at(r, j) = v.at(r, order[j]);
  }
  return es;
}

Operator herm_func(const Operator& m, const std::function<Complex(double)>& f) {
  EigenSystem es = herm_eig(m);
  const std::size_t n = m.dim();
  Operator out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex fj = f(es.values[j]);
    if (fj == Complex{0.0, 0.0}) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = es.vectors.at(r, j) * fj;
      for (std::size_t c = 0; c < n; ++c) out.at(r, c) += vr * std::conj(es.vectors.at(c, j));
    }
  }
  return out;
}

Operator dft_matrix(std::size_t n) {
  if (n == 0) throw std::invalid_argument("dft_matrix requires n >= 1");
  Operator f(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t x = 0; x < n; ++x) {
      // Reduce p*x mod n before the trig call to keep the phase argument small.
      const std::size_t px = (p * x) % n;
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(px) / static_cast<double>(n);
      f.at(p, x) = scale * Complex{std::cos(phase), std::sin(phase)};
    }
  return f;
}

double spectral_norm(const Operator& m) {
  EigenSystem es = herm_eig(dagger(m) * m);
  return std::sqrt(std::max(0.0, es.values.front()));
}

Operator pauli_x() { return Operator{{0.0, 1.0}, {1.0, 0.0}}; }
Operator pauli_y() { return Operator{{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}}; }
Operator pauli_z() { return Operator{{1.0, 0.0}, {0.0, -1.0}}; }

}  // namespace wvsim
