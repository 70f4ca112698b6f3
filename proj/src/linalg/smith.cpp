#include "selmerlab/linalg/smith.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

AbelianInvariants::AbelianInvariants(std::vector<mpz_class> factors) : factors_(std::move(factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i] <= 1) throw Error("invariant factors must exceed 1");
    if (i > 0 && !mpz_divisible_p(factors_[i].get_mpz_t(), factors_[i - 1].get_mpz_t())) {
      throw Error("invariant factors must form a divisibility chain");
    }
  }
}

AbelianInvariants AbelianInvariants::from_p_valuations(std::uint64_t p,
                                                       const std::vector<unsigned>& valuations) {
  std::vector<unsigned> v;
  for (unsigned x : valuations)
    if (x > 0) v.push_back(x);
  std::sort(v.begin(), v.end());
  std::vector<mpz_class> factors;
  factors.reserve(v.size());
  for (unsigned x : v) {
    mpz_class f;
    mpz_ui_pow_ui(f.get_mpz_t(), p, x);
    factors.push_back(std::move(f));
  }
  return AbelianInvariants(std::move(factors));
}

mpz_class AbelianInvariants::order() const {
  mpz_class acc = 1;
  for (const auto& f : factors_) acc *= f;
  return acc;
}

bool AbelianInvariants::has_square_order() const { return is_perfect_square(order()); }

bool AbelianInvariants::factors_paired() const {
  if (factors_.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < factors_.size(); i += 2)
    if (factors_[i] != factors_[i + 1]) return false;
  return true;
}

std::string AbelianInvariants::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << ',';
    os << factors_[i].get_str();
  }
  os << ']';
  return os.str();
}

bool operator<(const AbelianInvariants& a, const AbelianInvariants& b) {
  const mpz_class oa = a.order(), ob = b.order();
  if (oa != ob) return oa < ob;
  return std::lexicographical_compare(a.factors_.begin(), a.factors_.end(), b.factors_.begin(),
                                      b.factors_.end());
}

bool is_perfect_square(const mpz_class& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

namespace {

// Row/column operations are mirrored into U and V when they are tracked.
class SmithReducer {
 public:
  SmithReducer(const RingMatrix& m, bool track)
      : a_(m.entries()), track_(track), rows_(m.rows()), cols_(m.cols()) {
    if (track_) {
      u_ = Dense<mpz_class>(rows_, rows_, mpz_class(0));
      v_ = Dense<mpz_class>(cols_, cols_, mpz_class(0));
      for (std::size_t i = 0; i < rows_; ++i) u_(i, i) = 1;
      for (std::size_t j = 0; j < cols_; ++j) v_(j, j) = 1;
    }
  }

  void run() {
    const std::size_t k = std::min(rows_, cols_);
    for (std::size_t t = 0; t < k; ++t) {
      if (!reduce_block(t)) break;
      if (a_(t, t) < 0) negate_row(t);
    }
  }

  std::vector<mpz_class> divisors() const {
    const std::size_t k = std::min(rows_, cols_);
    std::vector<mpz_class> d(k);
    for (std::size_t t = 0; t < k; ++t) d[t] = a_(t, t);
    return d;
  }

  Dense<mpz_class>& u() { return u_; }
  Dense<mpz_class>& v() { return v_; }

 private:
  std::optional<std::pair<std::size_t, std::size_t>> min_entry(std::size_t t) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = t; i < rows_; ++i) {
      for (std::size_t j = t; j < cols_; ++j) {
        if (a_(i, j) == 0) continue;
        if (!best || mpz_cmpabs(a_(i, j).get_mpz_t(), a_(best->first, best->second).get_mpz_t()) < 0) best = {i, j};
      }
    }
    return best;
  }

  // Brings the block starting at (t, t) to the form diag(d) + block with d
  // dividing every remaining entry. Returns false if the block is zero.
  bool reduce_block(std::size_t t) {
    mpz_class q;
    for (;;) {
      const auto pivot = min_entry(t);
      if (!pivot) return false;
      swap_rows(t, pivot->first);
      swap_cols(t, pivot->second);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows_; ++i) {
        if (a_(i, t) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a_(i, t).get_mpz_t(), a_(t, t).get_mpz_t());
        add_row_multiple(i, t, -q);
        if (a_(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols_; ++j) {
        if (a_(t, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a_(t, j).get_mpz_t(), a_(t, t).get_mpz_t());
        add_col_multiple(j, t, -q);
        if (a_(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      bool divides_all = true;
      for (std::size_t i = t + 1; i < rows_ && divides_all; ++i) {
        for (std::size_t j = t + 1; j < cols_; ++j) {
          if (!mpz_divisible_p(a_(i, j).get_mpz_t(), a_(t, t).get_mpz_t())) {
            add_row_multiple(t, i, 1);
            divides_all = false;
            break;
          }
        }
      }
      if (divides_all) return true;
    }
  }

  void swap_rows(std::size_t x, std::size_t y) {
    a_.swap_rows(x, y);
    if (track_) u_.swap_rows(x, y);
  }
  void swap_cols(std::size_t x, std::size_t y) {
    a_.swap_cols(x, y);
    if (track_) v_.swap_cols(x, y);
  }
  // row_dst += c * row_src
  void add_row_multiple(std::size_t dst, std::size_t src, const mpz_class& c) {
    for (std::size_t j = 0; j < cols_; ++j) a_(dst, j) += c * a_(src, j);
    if (track_)
      for (std::size_t j = 0; j < rows_; ++j) u_(dst, j) += c * u_(src, j);
  }
  // col_dst += c * col_src
  void add_col_multiple(std::size_t dst, std::size_t src, const mpz_class& c) {
    for (std::size_t i = 0; i < rows_; ++i) a_(i, dst) += c * a_(i, src);
    if (track_)
      for (std::size_t i = 0; i < cols_; ++i) v_(i, dst) += c * v_(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) a_(r, j) = -a_(r, j);
    if (track_)
      for (std::size_t j = 0; j < rows_; ++j) u_(r, j) = -u_(r, j);
  }

  Dense<mpz_class> a_;
  Dense<mpz_class> u_;
  Dense<mpz_class> v_;
  bool track_;
  std::size_t rows_;
  std::size_t cols_;
};

void require_integers(const RingMatrix& m, const char* what) {
  if (!m.ring().is_integers()) throw Error(std::string(what) + " requires a matrix over Z");
}

// Bareiss elimination on machine words; nullopt on overflow.
std::optional<std::size_t> word_rank(const RingMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::int64_t> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const mpz_class& x = m.at(i, j);
      if (!x.fits_slong_p()) return std::nullopt;
      a[i * cols + j] = x.get_si();
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> std::int64_t& { return a[i * cols + j]; };
  std::int64_t prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && at(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        std::int64_t x, y, diff;
        if (__builtin_mul_overflow(at(rank, col), at(i, j), &x)) return std::nullopt;
        if (__builtin_mul_overflow(at(i, col), at(rank, j), &y)) return std::nullopt;
        if (__builtin_sub_overflow(x, y, &diff)) return std::nullopt;
        at(i, j) = diff / prev;
      }
      at(i, col) = 0;
    }
    prev = at(rank, col);
    ++rank;
  }
  return rank;
}

std::size_t big_rank(const RingMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Dense<mpz_class> a = m.entries();
  mpz_class prev = 1, t;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    a.swap_rows(pivot, rank);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        t = a(rank, col) * a(i, j) - a(i, col) * a(rank, j);
        mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a(i, col) = 0;
    }
    prev = a(rank, col);
    ++rank;
  }
  return rank;
}

}  // namespace

SmithDecomposition smith_normal_form(const RingMatrix& m) {
  require_integers(m, "smith_normal_form");
  SmithReducer reducer(m, true);
  reducer.run();
  const RingTag z = RingTag::integers();
  return SmithDecomposition{RingMatrix::from_dense(z, std::move(reducer.u())),
                            RingMatrix::from_dense(z, std::move(reducer.v())),
                            reducer.divisors()};
}

std::vector<mpz_class> smith_divisors(const RingMatrix& m) {
  require_integers(m, "smith_divisors");
  SmithReducer reducer(m, false);
  reducer.run();
  return reducer.divisors();
}

CokernelInfo coker_torsion(const RingMatrix& m) {
  const auto divisors = smith_divisors(m);
  std::size_t rank = 0;
  std::vector<mpz_class> torsion;
  for (const auto& d : divisors) {
    if (d == 0) continue;
    ++rank;
    if (d > 1) torsion.push_back(d);
  }
  return CokernelInfo{m.rows() - rank, AbelianInvariants(std::move(torsion))};
}

std::size_t rational_rank(const RingMatrix& m) {
  require_integers(m, "rational_rank");
  if (auto r = word_rank(m)) return *r;
  return big_rank(m);
}

std::size_t rational_kernel_rank(const RingMatrix& m) { return m.cols() - rational_rank(m); }

}  // namespace selmerlab
