#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "selmerlab/linalg/dense.hpp"
#include "selmerlab/linalg/ring.hpp"

namespace selmerlab {

/// Exact matrix over Z, Z/p^e or F_p.
///
/// Entries are GMP integers. Over a modular ring they are always kept in the
/// canonical range [0, p^e); every mutating entry point reduces.
class RingMatrix {
 public:
  RingMatrix() : ring_(RingTag::integers()) {}
  RingMatrix(RingTag ring, std::size_t rows, std::size_t cols);

  static RingMatrix from_rows(RingTag ring, std::initializer_list<std::initializer_list<long>> rows);
  static RingMatrix from_dense(RingTag ring, Dense<mpz_class> entries);
  static RingMatrix identity(RingTag ring, std::size_t n);
  static RingMatrix diagonal(RingTag ring, const std::vector<mpz_class>& diag);

  const RingTag& ring() const { return ring_; }
  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }

  const mpz_class& at(std::size_t i, std::size_t j) const { return entries_(i, j); }
  void set(std::size_t i, std::size_t j, const mpz_class& value);

  const Dense<mpz_class>& entries() const { return entries_; }

  RingMatrix transpose() const;
  /// Same entries viewed over another ring (reduced if modular).
  RingMatrix reinterpret(RingTag ring) const;

  /// A^T = -A with zero diagonal.
  bool is_alternating() const;
  bool is_zero() const;

  std::string to_string() const;

  friend RingMatrix operator*(const RingMatrix& a, const RingMatrix& b);
  friend bool operator==(const RingMatrix&, const RingMatrix&) = default;

 private:
  void reduce(mpz_class& x) const;

  RingTag ring_;
  Dense<mpz_class> entries_;
};

/// Determinant over Z by fraction-free (Bareiss) elimination.
mpz_class determinant(const RingMatrix& m);

}  // namespace selmerlab
