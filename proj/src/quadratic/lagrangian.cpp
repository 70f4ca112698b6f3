#include "selmerlab/quadratic/lagrangian.hpp"

#include <algorithm>
#include <set>

#include "selmerlab/core/error.hpp"
#include "selmerlab/linalg/smith.hpp"

namespace selmerlab {

namespace {

using WordBasis = Lagrangian::WordBasis;
using BigBasis = Lagrangian::BigBasis;

std::uint64_t small_value(std::uint64_t x) { return x; }
std::uint64_t small_value(const mpz_class& x) { return x.get_ui(); }

BigBasis to_big(const WordBasis& b) {
  BigBasis out(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.data().size(); ++i)
    out.data()[i] = mpz_class(static_cast<unsigned long>(b.data()[i]));
  return out;
}

template <class T>
Dense<std::uint64_t> reduce_mod_p(const Dense<T>& b, std::uint64_t p) {
  Dense<std::uint64_t> out(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.data().size(); ++i) {
    if constexpr (std::is_same_v<T, mpz_class>) {
      out.data()[i] = mpz_fdiv_ui(b.data()[i].get_mpz_t(), p);
    } else {
      out.data()[i] = b.data()[i] % p;
    }
  }
  return out;
}

// Right inverse of (B^T J) over F_p: D with <b_i, d_j> = delta_ij. B must
// have rank n mod p.
Dense<std::uint64_t> dual_basis(const Dense<std::uint64_t>& bbar, std::uint64_t p) {
  const WordModRing f(p, 1);
  const std::size_t dim = bbar.rows(), n = bbar.cols(), half = dim / 2;
  // Augmented [B^T J | I]; row i of B^T J is b_i with x and y halves swapped.
  Dense<std::uint64_t> aug(n, dim + n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < half; ++l) {
      aug(i, l) = bbar(half + l, i);
      aug(i, half + l) = bbar(l, i);
    }
    aug(i, dim + i) = 1;
  }
  std::vector<std::size_t> pivot_col(n);
  std::size_t row = 0;
  for (std::size_t c = 0; c < dim && row < n; ++c) {
    std::size_t r = row;
    while (r < n && aug(r, c) == 0) ++r;
    if (r == n) continue;
    aug.swap_rows(r, row);
    const auto inv = f.inverse_unit(aug(row, c));
    for (std::size_t j = 0; j < aug.cols(); ++j) aug(row, j) = f.mul(aug(row, j), inv);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || aug(i, c) == 0) continue;
      const auto factor = aug(i, c);
      for (std::size_t j = 0; j < aug.cols(); ++j) aug(i, j) = f.sub(aug(i, j), f.mul(factor, aug(row, j)));
    }
    pivot_col[row++] = c;
  }
  if (row != n) throw Error("basis is not a direct summand mod p");
  Dense<std::uint64_t> dual(dim, n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dual(pivot_col[i], j) = aug(i, dim + j);
  return dual;
}

// Uniform Lagrangian over F_p. Keeps a hyperbolic frame (e'_i, f'_i) of the
// part of V orthogonal to everything chosen so far. In frame coordinates
// Q(sum a_i e'_i + b_i f'_i) = a . b, so a uniform nonzero isotropic vector
// h of the frame is drawn by rejection on (a, b). A partner h' with
// <h, h'> = 1 is read off the frame and the remaining frame vectors are
// projected away from h and h'. Adding elements of the span already chosen
// would not change the final subgroup, so h itself is the next basis vector.
void sample_over_fp(std::uint64_t p, std::size_t n, Rng& rng, WordBasis& basis,
                    Dense<std::uint64_t>& dual) {
  const WordModRing f(p, 1);
  const std::size_t dim = 2 * n;
  std::vector<std::vector<std::uint64_t>> ev(n, std::vector<std::uint64_t>(dim, 0));
  std::vector<std::vector<std::uint64_t>> fv(n, std::vector<std::uint64_t>(dim, 0));
  for (std::size_t i = 0; i < n; ++i) {
    ev[i][i] = 1;
    fv[i][n + i] = 1;
  }
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  basis = WordBasis(dim, n, 0);
  dual = Dense<std::uint64_t>(dim, n, 0);
  std::vector<std::uint64_t> a(n), b(n), h(dim), hp(dim);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = active.size();
    for (;;) {
      bool nonzero = false;
      std::uint64_t q = 0;
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = rng.below(p);
        b[i] = rng.below(p);
        nonzero = nonzero || a[i] != 0 || b[i] != 0;
        q = f.add(q, f.mul(a[i], b[i]));
      }
      if (nonzero && q == 0) break;
    }
    std::fill(h.begin(), h.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& e_vec = ev[active[i]];
      const auto& f_vec = fv[active[i]];
      for (std::size_t l = 0; l < dim; ++l) {
        if (a[i]) h[l] = f.add(h[l], f.mul(a[i], e_vec[l]));
        if (b[i]) h[l] = f.add(h[l], f.mul(b[i], f_vec[l]));
      }
    }
    std::size_t pivot = 0;
    while (a[pivot] == 0 && b[pivot] == 0) ++pivot;
    // Prefer a_i != 0 anywhere; <h, f'_i> = a_i and <h, e'_i> = b_i.
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] != 0) {
        pivot = i;
        break;
      }
    }
    if (a[pivot] != 0) {
      const auto inv = f.inverse_unit(a[pivot]);
      for (std::size_t l = 0; l < dim; ++l) hp[l] = f.mul(fv[active[pivot]][l], inv);
    } else {
      const auto inv = f.inverse_unit(b[pivot]);
      for (std::size_t l = 0; l < dim; ++l) hp[l] = f.mul(ev[active[pivot]][l], inv);
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pivot) continue;
      auto& e_vec = ev[active[i]];
      auto& f_vec = fv[active[i]];
      if (b[i])
        for (std::size_t l = 0; l < dim; ++l) e_vec[l] = f.sub(e_vec[l], f.mul(b[i], hp[l]));
      if (a[i])
        for (std::size_t l = 0; l < dim; ++l) f_vec[l] = f.sub(f_vec[l], f.mul(a[i], hp[l]));
    }
    for (std::size_t l = 0; l < dim; ++l) {
      basis(l, k) = h[l];
      dual(l, k) = hp[l];
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(pivot));
  }
}

// One uniform p-adic digit: basis entries are residues mod p^k and become
// residues mod p^(k+1). Writing the new basis as B + p^k C, the isotropy
// conditions mod p^(k+1) are linear in C mod p:
//   <b_j, c_j> = -Q(B_j)/p^k,   <b_i, c_j> + <c_i, b_j> = -<b_i, b_j>/p^k.
// With N = B^T J C these fix the diagonal of N and N + N^T; the strictly
// upper triangle is free. Taking C = D N picks one representative of each
// lifted subgroup, so a uniform upper triangle gives a uniform lift.
template <class Ring>
void lift_digit(const Ring& next, Dense<typename Ring::value_type>& b, const Dense<std::uint64_t>& dual,
                unsigned k, Rng& rng) {
  using T = typename Ring::value_type;
  const std::uint64_t p = next.p();
  const WordModRing f(p, 1);
  const std::size_t n = b.cols();
  Dense<std::uint64_t> big_n(n, n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    T s = next.zero();
    for (std::size_t l = 0; l < n; ++l) s = next.add(s, next.mul(b(l, j), b(n + l, j)));
    big_n(j, j) = f.neg(small_value(next.div_p_power(s, k)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      T g = next.zero();
      for (std::size_t l = 0; l < n; ++l) {
        g = next.add(g, next.mul(b(l, i), b(n + l, j)));
        g = next.add(g, next.mul(b(n + l, i), b(l, j)));
      }
      const std::uint64_t free_digit = rng.below(p);
      big_n(i, j) = free_digit;
      big_n(j, i) = f.sub(f.neg(small_value(next.div_p_power(g, k))), free_digit);
    }
  }
  const T pk = next.p_power(k);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t c = 0;
      for (std::size_t l = 0; l < n; ++l)
        if (dual(r, l)) c = f.add(c, f.mul(dual(r, l), big_n(l, j)));
      if (c) b(r, j) = next.add(b(r, j), next.mul(pk, next.from_int(static_cast<std::int64_t>(c))));
    }
  }
}

// Inverse of a square matrix invertible over Z/p^e.
template <class Ring>
Dense<typename Ring::value_type> invert_local(const Ring& ring, Dense<typename Ring::value_type> a) {
  using T = typename Ring::value_type;
  const std::size_t n = a.rows();
  Dense<T> inv(n, n, ring.zero());
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = ring.one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t r = c;
    while (r < n && ring.valuation(a(r, c)) != 0) ++r;
    if (r == n) throw Error("matrix is not invertible over Z/p^e");
    a.swap_rows(r, c);
    inv.swap_rows(r, c);
    const T u = ring.inverse_unit(a(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) = ring.mul(a(c, j), u);
      inv(c, j) = ring.mul(inv(c, j), u);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || ring.is_zero(a(i, c))) continue;
      const T factor = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = ring.sub(a(i, j), ring.mul(factor, a(c, j)));
        inv(i, j) = ring.sub(inv(i, j), ring.mul(factor, inv(c, j)));
      }
    }
  }
  return inv;
}

// First n rows (top to bottom) that are independent mod p.
std::vector<std::size_t> pivot_rows_mod_p(const Dense<std::uint64_t>& bbar, std::uint64_t p) {
  const WordModRing f(p, 1);
  const std::size_t n = bbar.cols();
  std::vector<std::vector<std::uint64_t>> echelon;
  std::vector<std::size_t> lead;
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < bbar.rows() && chosen.size() < n; ++r) {
    std::vector<std::uint64_t> v(bbar.row(r).begin(), bbar.row(r).end());
    for (std::size_t k = 0; k < echelon.size(); ++k) {
      if (v[lead[k]] == 0) continue;
      const auto factor = v[lead[k]];
      for (std::size_t j = 0; j < n; ++j) v[j] = f.sub(v[j], f.mul(factor, echelon[k][j]));
    }
    std::size_t l = 0;
    while (l < n && v[l] == 0) ++l;
    if (l == n) continue;
    const auto inv = f.inverse_unit(v[l]);
    for (auto& x : v) x = f.mul(x, inv);
    echelon.push_back(std::move(v));
    lead.push_back(l);
    chosen.push_back(r);
  }
  if (chosen.size() != n) throw Error("basis is not a direct summand mod p");
  return chosen;
}

template <class Ring>
Dense<typename Ring::value_type> canonicalize(const Ring& ring, const Dense<typename Ring::value_type>& b) {
  using T = typename Ring::value_type;
  const std::size_t n = b.cols();
  const auto rows = pivot_rows_mod_p(reduce_mod_p(b, ring.p()), ring.p());
  Dense<T> square(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) square(i, j) = b(rows[i], j);
  const Dense<T> inv = invert_local(ring, std::move(square));
  Dense<T> out(b.rows(), n, ring.zero());
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t l = 0; l < n; ++l) {
      if (ring.is_zero(b(r, l))) continue;
      for (std::size_t j = 0; j < n; ++j) out(r, j) = ring.add(out(r, j), ring.mul(b(r, l), inv(l, j)));
    }
  return out;
}

// phi_ij = <w_i, z_j>
template <class Ring>
Dense<typename Ring::value_type> pairing_matrix(const Ring& ring, const Dense<typename Ring::value_type>& w,
                                                const Dense<typename Ring::value_type>& z) {
  using T = typename Ring::value_type;
  const std::size_t n = z.cols();
  Dense<T> phi(n, n, ring.zero());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = ring.zero();
      for (std::size_t l = 0; l < n; ++l) {
        acc = ring.add(acc, ring.mul(w(l, i), z(n + l, j)));
        acc = ring.add(acc, ring.mul(w(n + l, i), z(l, j)));
      }
      phi(i, j) = std::move(acc);
    }
  }
  return phi;
}

template <class T>
RingMatrix to_ring_matrix(const RingTag& tag, const Dense<T>& d) {
  Dense<mpz_class> out(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.data().size(); ++i) {
    if constexpr (std::is_same_v<T, mpz_class>) {
      out.data()[i] = d.data()[i];
    } else {
      out.data()[i] = mpz_class(static_cast<unsigned long>(d.data()[i]));
    }
  }
  return RingMatrix::from_dense(tag, std::move(out));
}

void require_modular(const QuadSpace& space, const char* what) {
  if (!space.ring().is_modular()) throw Error(std::string(what) + " needs a space over F_p or Z/p^e");
}

}  // namespace

bool is_lagrangian(const QuadSpace& space, const RingMatrix& basis) {
  const std::size_t n = space.half_dim();
  if (basis.rows() != 2 * n || basis.cols() != n) {
    throw DimensionMismatch("a Lagrangian basis of V_n must be 2n x n");
  }
  if (!(basis.ring() == space.ring())) throw DimensionMismatch("basis and space use different rings");
  std::vector<std::vector<mpz_class>> cols(n, std::vector<mpz_class>(2 * n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < 2 * n; ++i) cols[j][i] = basis.at(i, j);
  for (std::size_t j = 0; j < n; ++j) {
    if (eval_form(space, cols[j]) != 0) return false;
    for (std::size_t k = j + 1; k < n; ++k)
      if (pairing(space, cols[j], cols[k]) != 0) return false;
  }
  if (space.ring().is_integers()) {
    for (const auto& d : smith_divisors(basis))
      if (d != 1) return false;
    return true;
  }
  for (unsigned v : snf_mod(basis))
    if (v != 0) return false;
  return true;
}

Lagrangian::Lagrangian(QuadSpace space, const RingMatrix& basis) : space_(std::move(space)) {
  require_modular(space_, "Lagrangian");
  if (!is_lagrangian(space_, basis)) throw Error("columns do not span a Lagrangian direct summand");
  const RingTag& tag = space_.ring();
  if (tag.fits_word()) {
    WordBasis b(basis.rows(), basis.cols());
    for (std::size_t i = 0; i < basis.rows(); ++i)
      for (std::size_t j = 0; j < basis.cols(); ++j) b(i, j) = basis.at(i, j).get_ui();
    basis_ = std::move(b);
  } else {
    basis_ = basis.entries();
  }
  dual_ = std::visit([&](const auto& b) { return dual_basis(reduce_mod_p(b, tag.prime()), tag.prime()); },
                     basis_);
}

RingMatrix Lagrangian::basis() const {
  return std::visit([&](const auto& b) { return to_ring_matrix(space_.ring(), b); }, basis_);
}

RingMatrix Lagrangian::canonical_basis() const {
  const RingTag& tag = space_.ring();
  if (const auto* w = std::get_if<WordBasis>(&basis_)) {
    return to_ring_matrix(tag, canonicalize(WordModRing(tag.prime(), tag.exponent()), *w));
  }
  return to_ring_matrix(tag, canonicalize(BigModRing(tag.prime(), tag.exponent()), std::get<BigBasis>(basis_)));
}

void Lagrangian::extend(unsigned new_e, Rng& rng) {
  const unsigned e = precision();
  if (new_e < e) throw Error("extend cannot lower the precision");
  const std::uint64_t p = prime();
  for (unsigned k = e; k < new_e; ++k) {
    if (power_fits_word(p, k + 1)) {
      lift_digit(WordModRing(p, k + 1), std::get<WordBasis>(basis_), dual_, k, rng);
    } else {
      if (auto* w = std::get_if<WordBasis>(&basis_)) basis_ = to_big(*w);
      lift_digit(BigModRing(p, k + 1), std::get<BigBasis>(basis_), dual_, k, rng);
    }
  }
  if (new_e != e) space_ = space_.with_exponent(new_e);
}

bool operator==(const Lagrangian& a, const Lagrangian& b) {
  return a.space_ == b.space_ && a.canonical_basis() == b.canonical_basis();
}

Lagrangian sample_lagrangian(const QuadSpace& space, Rng& rng) {
  require_modular(space, "sample_lagrangian");
  const std::uint64_t p = space.ring().prime();
  Lagrangian out;
  out.space_ = QuadSpace(RingTag::prime_field(p), space.half_dim());
  WordBasis basis;
  sample_over_fp(p, space.half_dim(), rng, basis, out.dual_);
  out.basis_ = std::move(basis);
  if (space.ring().exponent() > 1) out.extend(space.ring().exponent(), rng);
  out.space_ = space;
  return out;
}

std::vector<Lagrangian> enumerate_lagrangians(const QuadSpace& space, std::uint64_t budget) {
  require_modular(space, "enumerate_lagrangians");
  const std::uint64_t p = space.ring().prime();
  const unsigned e = space.ring().exponent();
  const std::size_t n = space.half_dim(), dim = 2 * n;

  mpz_class total;
  mpz_ui_pow_ui(total.get_mpz_t(), p, static_cast<unsigned long>(e * dim));
  if (total > mpz_class(static_cast<unsigned long>(budget))) {
    throw BudgetExceeded("enumeration of " + total.get_str() + " vectors exceeds the budget of " +
                         std::to_string(budget));
  }
  const WordModRing ring(p, e);
  const std::uint64_t m = ring.modulus();
  const std::uint64_t count = total.get_ui();

  auto decode = [&](std::uint64_t index) {
    std::vector<std::uint64_t> v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = index % m;
      index /= m;
    }
    return v;
  };
  auto pair = [&](const std::vector<std::uint64_t>& u, const std::vector<std::uint64_t>& v) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc = ring.add(acc, ring.mul(u[i], v[n + i]));
      acc = ring.add(acc, ring.mul(u[n + i], v[i]));
    }
    return acc;
  };

  // Isotropic vectors that are nonzero mod p.
  std::vector<std::vector<std::uint64_t>> iso;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    auto v = decode(idx);
    std::uint64_t q = 0;
    bool primitive = false;
    for (std::size_t i = 0; i < n; ++i) q = ring.add(q, ring.mul(v[i], v[n + i]));
    for (auto x : v) primitive = primitive || x % p != 0;
    if (q == 0 && primitive) iso.push_back(std::move(v));
  }

  std::set<std::vector<std::uint64_t>> seen;
  std::vector<std::size_t> chosen;
  const WordModRing f(p, 1);

  // Rank mod p of the chosen columns, used to keep them independent.
  auto independent = [&](const std::vector<std::size_t>& cols) {
    Dense<std::uint64_t> mat(dim, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < dim; ++i) mat(i, j) = iso[cols[j]][i] % p;
    return local_smith_valuations(f, mat).back() == 0;
  };

  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (chosen.size() == n) {
      Dense<std::uint64_t> b(dim, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < dim; ++i) b(i, j) = iso[chosen[j]][i];
      seen.insert(canonicalize(ring, b).data());
      return;
    }
    for (std::size_t c = start; c < iso.size(); ++c) {
      bool orthogonal = true;
      for (std::size_t k : chosen) {
        if (pair(iso[k], iso[c]) != 0) {
          orthogonal = false;
          break;
        }
      }
      if (!orthogonal) continue;
      chosen.push_back(c);
      if (independent(chosen)) self(self, c + 1);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0);

  std::vector<Lagrangian> out;
  out.reserve(seen.size());
  for (const auto& data : seen) {
    Dense<std::uint64_t> b(dim, n);
    b.data() = data;
    out.emplace_back(space, to_ring_matrix(space.ring(), b));
  }
  return out;
}

namespace {

template <class Ring>
std::vector<unsigned> valuations_with(const Ring& ring, const Dense<typename Ring::value_type>& z,
                                      const Dense<typename Ring::value_type>& w,
                                      Dense<typename Ring::value_type>* phi_out) {
  auto phi = pairing_matrix(ring, w, z);
  if (phi_out) *phi_out = phi;
  return local_smith_valuations(ring, std::move(phi));
}

void require_same_space(const Lagrangian& z, const Lagrangian& w) {
  if (!(z.space() == w.space())) throw DimensionMismatch("Lagrangians live in different spaces");
}

}  // namespace

std::vector<unsigned> intersection_valuations(const Lagrangian& z, const Lagrangian& w) {
  require_same_space(z, w);
  const RingTag& tag = z.space().ring();
  const auto* zw = std::get_if<WordBasis>(&z.raw_basis());
  const auto* ww = std::get_if<WordBasis>(&w.raw_basis());
  if (zw && ww) {
    return valuations_with(WordModRing(tag.prime(), tag.exponent()), *zw, *ww, nullptr);
  }
  const BigBasis zb = zw ? to_big(*zw) : std::get<BigBasis>(z.raw_basis());
  const BigBasis wb = ww ? to_big(*ww) : std::get<BigBasis>(w.raw_basis());
  return valuations_with(BigModRing(tag.prime(), tag.exponent()), zb, wb, nullptr);
}

IntersectionProfile intersection_profile(const Lagrangian& z, const Lagrangian& w, unsigned margin) {
  require_same_space(z, w);
  const RingTag& tag = z.space().ring();
  IntersectionProfile out;
  const BigBasis zb = std::visit(
      [](const auto& b) -> BigBasis {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, BigBasis>) {
          return b;
        } else {
          return to_big(b);
        }
      },
      z.raw_basis());
  const BigBasis wb = std::visit(
      [](const auto& b) -> BigBasis {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, BigBasis>) {
          return b;
        } else {
          return to_big(b);
        }
      },
      w.raw_basis());
  BigBasis phi;
  out.valuations = valuations_with(BigModRing(tag.prime(), tag.exponent()), zb, wb, &phi);
  out.phi = RingMatrix::from_dense(tag, std::move(phi));
  out.corank = padic_report(out.valuations, z.space().half_dim(), tag.exponent(), margin);
  return out;
}

}  // namespace selmerlab
