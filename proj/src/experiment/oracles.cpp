#include "oracles.hpp"

#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <set>
#include <vector>

#include "selmerlab/core/parallel.hpp"
#include "selmerlab/core/rng.hpp"
#include "selmerlab/linalg/smith.hpp"
#include "selmerlab/quadratic/lagrangian.hpp"

namespace selmerlab::detail {
namespace {

const RingTag kZ = RingTag::integers();

RingMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, long bound) {
  RingMatrix m(kZ, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, rng.between(-bound, bound));
  return m;
}

bool snf_ok(const RingMatrix& m) {
  const auto snf = smith_normal_form(m);
  RingMatrix d(kZ, m.rows(), m.cols());
  for (std::size_t i = 0; i < snf.divisors.size(); ++i) d.set(i, i, snf.divisors[i]);
  if (!(snf.U * m * snf.V == d)) return false;
  if (abs(determinant(snf.U)) != 1 || abs(determinant(snf.V)) != 1) return false;
  for (std::size_t i = 0; i < snf.divisors.size(); ++i) {
    if (snf.divisors[i] < 0) return false;
    if (i + 1 < snf.divisors.size() && snf.divisors[i + 1] != 0 &&
        (snf.divisors[i] == 0 || snf.divisors[i + 1] % snf.divisors[i] != 0))
      return false;
  }
  return true;
}

mpz_class minor3(const RingMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  RingMatrix sub(kZ, rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub.set(i, j, m.at(rows[i], cols[j]));
  return determinant(sub);
}

// Invariant factors d_k = D_k / D_(k-1), D_k the gcd of all k x k minors.
std::vector<mpz_class> determinantal_factors(const RingMatrix& m, std::size_t& rank) {
  const std::vector<std::vector<std::size_t>> subsets[4] = {
      {{}}, {{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}};
  std::vector<mpz_class> big_d{1};
  for (std::size_t k = 1; k <= 3; ++k) {
    mpz_class g = 0;
    for (const auto& r : subsets[k])
      for (const auto& c : subsets[k]) {
        const mpz_class d = minor3(m, r, c);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    big_d.push_back(g);
  }
  rank = big_d.size() - 1;
  std::vector<mpz_class> out;
  for (std::size_t k = 1; k <= rank; ++k)
    if (big_d[k] / big_d[k - 1] > 1) out.push_back(big_d[k] / big_d[k - 1]);
  return out;
}

unsigned vp(mpz_class x, std::uint64_t p) {
  unsigned v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// log_p |coker(M) / p^j| from the image of every input vector mod p^j.
unsigned coset_exponent(const RingMatrix& m, std::uint64_t q, std::uint64_t p, unsigned j) {
  std::set<std::array<std::uint64_t, 3>> image;
  const auto s = static_cast<std::int64_t>(q);
  for (std::uint64_t idx = 0; idx < q * q * q; ++idx) {
    const std::int64_t x[3] = {static_cast<std::int64_t>(idx % q), static_cast<std::int64_t>(idx / q % q),
                               static_cast<std::int64_t>(idx / q / q)};
    std::array<std::uint64_t, 3> y{};
    for (std::size_t r = 0; r < 3; ++r) {
      std::int64_t acc = 0;
      for (std::size_t c = 0; c < 3; ++c) acc += m.at(r, c).get_si() * x[c];
      y[r] = static_cast<std::uint64_t>(((acc % s) + s) % s);
    }
    image.insert(y);
  }
  unsigned log_image = 0;
  for (std::size_t size = image.size(); size > 1; size /= p) ++log_image;
  return 3 * j - log_image;
}

bool coker_ok(const RingMatrix& m) {
  const auto info = coker_torsion(m);
  std::size_t rank = 0;
  const auto expected = determinantal_factors(m, rank);
  if (info.free_rank != 3 - rank || !(info.torsion == AbelianInvariants(expected))) return false;
  const mpz_class order = info.torsion.order();
  for (std::uint64_t p : {2, 3, 5, 7}) {
    if (order % p != 0 && p > 3) continue;
    const unsigned j = vp(order, p) + 1;
    std::uint64_t q = 1;
    for (unsigned i = 0; i < j; ++i) q *= p;
    if (q * q * q > 200000) continue;
    unsigned want = j * static_cast<unsigned>(info.free_rank);
    for (const auto& d : info.torsion.factors()) want += std::min(vp(d, p), j);
    if (coset_exponent(m, q, p, j) != want) return false;
  }
  return true;
}

}  // namespace

std::uint64_t snf_failures(std::uint64_t samples, std::uint64_t seed, unsigned jobs) {
  std::atomic<std::uint64_t> failures{0};
  parallel_for(samples, jobs, [&](std::uint64_t i) {
    Rng rng = Rng::substream(seed, i);
    const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
    if (!snf_ok(random_matrix(rng, r, c, i % 2 ? 9 : 2))) ++failures;
  });
  return failures.load();
}

std::uint64_t coker_failures(std::uint64_t samples, std::uint64_t seed, unsigned jobs) {
  std::atomic<std::uint64_t> failures{0};
  parallel_for(samples, jobs, [&](std::uint64_t i) {
    Rng rng = Rng::substream(seed, i);
    if (!coker_ok(random_matrix(rng, 3, 3, 3))) ++failures;
  });
  return failures.load();
}

ChiSquare lagrangian_chi_square(std::uint64_t p, std::size_t n, unsigned e, std::uint64_t draws, double alpha,
                                std::uint64_t seed, unsigned jobs) {
  const QuadSpace space(e == 1 ? RingTag::prime_field(p) : RingTag::mod_prime_power(p, e), n);
  const auto all = enumerate_lagrangians(space);
  std::map<std::vector<mpz_class>, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) index[all[i].canonical_basis().entries().data()] = i;
  std::vector<std::size_t> hit(draws);
  parallel_for(draws, jobs, [&](std::uint64_t i) {
    Rng rng = Rng::substream(seed, i);
    const auto it = index.find(sample_lagrangian(space, rng).canonical_basis().entries().data());
    hit[i] = it == index.end() ? all.size() : it->second;
  });
  std::vector<double> counts(all.size() + 1, 0);
  for (auto h : hit) counts[h] += 1;
  ChiSquare out;
  out.bins = all.size();
  const double expected = static_cast<double>(draws) / static_cast<double>(all.size());
  for (std::size_t b = 0; b < all.size(); ++b) out.statistic += (counts[b] - expected) * (counts[b] - expected) / expected;
  // A draw outside the enumeration is an outright failure.
  if (counts[all.size()] > 0) out.statistic = std::numeric_limits<double>::infinity();
  if (all.size() < 2) {
    out.critical = 0;
    if (counts[all.size()] == 0) out.statistic = 0;
    return out;
  }
  boost::math::chi_squared dist(static_cast<double>(all.size() - 1));
  out.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  return out;
}

}  // namespace selmerlab::detail
