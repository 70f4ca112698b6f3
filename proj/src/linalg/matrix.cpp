#include "selmerlab/linalg/matrix.hpp"

#include <sstream>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

RingMatrix::RingMatrix(RingTag ring, std::size_t rows, std::size_t cols)
    : ring_(ring), entries_(rows, cols, mpz_class(0)) {}

RingMatrix RingMatrix::from_rows(RingTag ring,
                                 std::initializer_list<std::initializer_list<long>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  RingMatrix out(ring, r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionMismatch("ragged matrix literal");
    std::size_t j = 0;
    for (long v : row) out.set(i, j++, mpz_class(v));
    ++i;
  }
  return out;
}

RingMatrix RingMatrix::from_dense(RingTag ring, Dense<mpz_class> entries) {
  RingMatrix out;
  out.ring_ = ring;
  out.entries_ = std::move(entries);
  if (ring.is_modular()) {
    for (auto& x : out.entries_.data()) out.reduce(x);
  }
  return out;
}

RingMatrix RingMatrix::identity(RingTag ring, std::size_t n) {
  RingMatrix out(ring, n, n);
  for (std::size_t i = 0; i < n; ++i) out.set(i, i, 1);
  return out;
}

RingMatrix RingMatrix::diagonal(RingTag ring, const std::vector<mpz_class>& diag) {
  RingMatrix out(ring, diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out.set(i, i, diag[i]);
  return out;
}

void RingMatrix::reduce(mpz_class& x) const {
  if (!ring_.is_modular()) return;
  const mpz_class m = ring_.modulus();
  mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
}

void RingMatrix::set(std::size_t i, std::size_t j, const mpz_class& value) {
  mpz_class v = value;
  reduce(v);
  entries_(i, j) = std::move(v);
}

RingMatrix RingMatrix::transpose() const {
  RingMatrix out(ring_, cols(), rows());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) out.entries_(j, i) = entries_(i, j);
  return out;
}

RingMatrix RingMatrix::reinterpret(RingTag ring) const {
  return from_dense(ring, entries_);
}

bool RingMatrix::is_alternating() const {
  if (rows() != cols()) return false;
  const mpz_class m = ring_.modulus();
  for (std::size_t i = 0; i < rows(); ++i) {
    if (entries_(i, i) != 0) return false;
    for (std::size_t j = i + 1; j < cols(); ++j) {
      mpz_class s = entries_(i, j) + entries_(j, i);
      if (ring_.is_modular()) mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
      if (s != 0) return false;
    }
  }
  return true;
}

bool RingMatrix::is_zero() const {
  for (const auto& x : entries_.data())
    if (x != 0) return false;
  return true;
}

std::string RingMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows(); ++i) {
    if (i) os << ", ";
    os << '[';
    for (std::size_t j = 0; j < cols(); ++j) {
      if (j) os << ", ";
      os << entries_(i, j).get_str();
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

RingMatrix operator*(const RingMatrix& a, const RingMatrix& b) {
  if (!(a.ring_ == b.ring_)) throw DimensionMismatch("matrix product over different rings");
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  Dense<mpz_class> out(a.rows(), b.cols(), mpz_class(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const mpz_class& aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b.at(k, j);
    }
  }
  return RingMatrix::from_dense(a.ring_, std::move(out));
}

mpz_class determinant(const RingMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Dense<mpz_class> a = m.entries();
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      a.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class t = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace selmerlab
