#include "selmerlab/census/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

namespace {

std::uint64_t cube(std::uint64_t a) { return a * a * a; }

// Primes p with p^6 <= limit.
std::vector<std::int64_t> small_primes(std::int64_t limit) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p * p * p * p * p <= limit; ++p) {
    bool prime = true;
    for (std::int64_t d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
    if (prime) out.push_back(p);
  }
  return out;
}

// p^6 for primes p with p^4 | A (A != 0), or for all p with p^6 <= b_max
// when A = 0.
std::vector<std::int64_t> sixth_powers_to_test(std::int64_t A, std::int64_t b_max) {
  std::vector<std::int64_t> out;
  if (A == 0) {
    for (std::int64_t p : small_primes(b_max)) out.push_back(p * p * p * p * p * p);
    return out;
  }
  std::int64_t a = std::llabs(A);
  for (std::int64_t p = 2; p * p * p * p <= a; ++p) {
    if (a % p) continue;
    int v = 0;
    while (a % p == 0) {
      a /= p;
      ++v;
    }
    if (v >= 4) out.push_back(p * p * p * p * p * p);
  }
  return out;
}

template <class Visit>
void scan_range(std::int64_t a_lo, std::int64_t a_hi, std::int64_t b_max, Visit&& visit) {
  for (std::int64_t A = a_lo; A <= a_hi; ++A) {
    const auto sixth = sixth_powers_to_test(A, b_max);
    const std::int64_t four_a3 = 4 * A * A * A;
    for (std::int64_t B = -b_max; B <= b_max; ++B) {
      if (four_a3 + 27 * B * B == 0) continue;
      bool minimal = true;
      for (std::int64_t q : sixth) {
        if (B % q == 0) {
          minimal = false;
          break;
        }
      }
      if (minimal) visit(A, B);
    }
  }
}

}  // namespace

std::uint64_t height(std::int64_t A, std::int64_t B) {
  const auto a = static_cast<std::uint64_t>(std::llabs(A));
  const auto b = static_cast<std::uint64_t>(std::llabs(B));
  return std::max(4 * cube(a), 27 * b * b);
}

bool is_minimal_curve(std::int64_t A, std::int64_t B) {
  const __int128 disc = 4 * static_cast<__int128>(A) * A * A + 27 * static_cast<__int128>(B) * B;
  if (disc == 0) return false;
  const std::int64_t a = std::llabs(A), b = std::llabs(B);
  const std::int64_t limit = a == 0 ? b : a;
  for (std::int64_t p = 2; p <= limit; ++p) {
    bool prime = true;
    for (std::int64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
    if (!prime) continue;
    const __int128 p4 = static_cast<__int128>(p) * p * p * p;
    const __int128 p6 = p4 * p * p;
    if (p4 > a && a != 0) break;
    if (p6 > b && b != 0) break;
    if (a % p4 == 0 && b % p6 == 0) return false;
  }
  return true;
}

std::int64_t max_abs_A(std::uint64_t H) {
  std::uint64_t a = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(H) / 4));
  while (a > 0 && 4 * cube(a) > H) --a;
  while (4 * cube(a + 1) <= H) ++a;
  return static_cast<std::int64_t>(a);
}

std::int64_t max_abs_B(std::uint64_t H) {
  std::uint64_t b = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(H) / 27));
  while (b > 0 && 27 * b * b > H) --b;
  while (27 * (b + 1) * (b + 1) <= H) ++b;
  return static_cast<std::int64_t>(b);
}

CensusRecord count_curves(std::uint64_t H, unsigned jobs) {
  if (H < 1) throw Error("count_curves needs H >= 1");
  if (H > 4'000'000'000'000'000'000ULL) throw Error("H is too large for 64-bit heights");
  const std::int64_t a_max = max_abs_A(H), b_max = max_abs_B(H);
  jobs = std::max(1u, jobs);
  const std::int64_t width = 2 * a_max + 1;
  std::vector<std::uint64_t> partial(jobs, 0);
  auto work = [&](unsigned shard) {
    const std::int64_t lo = -a_max + width * shard / jobs;
    const std::int64_t hi = -a_max + width * (shard + 1) / jobs - 1;
    std::uint64_t count = 0;
    scan_range(lo, hi, b_max, [&](std::int64_t, std::int64_t) { ++count; });
    partial[shard] = count;
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned s = 0; s < jobs; ++s) threads.emplace_back(work, s);
    for (auto& t : threads) t.join();
  }
  CensusRecord rec;
  rec.H = H;
  for (auto c : partial) rec.count += c;
  rec.normalized = static_cast<double>(rec.count) / std::pow(static_cast<double>(H), 5.0 / 6.0);
  return rec;
}

void for_each_curve(std::uint64_t H, const std::function<void(const CurveKey&)>& visit) {
  const std::int64_t a_max = max_abs_A(H), b_max = max_abs_B(H);
  scan_range(-a_max, a_max, b_max, [&](std::int64_t A, std::int64_t B) { visit(CurveKey{A, B}); });
}

std::vector<DensityRow> density_of(const std::function<bool(const CurveKey&)>& pred,
                                   const std::vector<std::uint64_t>& grid) {
  std::vector<DensityRow> rows;
  if (grid.empty()) return rows;
  std::vector<std::uint64_t> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  for (auto h : sorted) rows.push_back(DensityRow{h, 0, 0, 0});
  for_each_curve(sorted.back(), [&](const CurveKey& c) {
    const std::uint64_t h = height(c.A, c.B);
    const bool match = pred(c);
    auto it = std::lower_bound(sorted.begin(), sorted.end(), h);
    for (auto k = static_cast<std::size_t>(it - sorted.begin()); k < rows.size(); ++k) {
      ++rows[k].total;
      rows[k].matching += match;
    }
  });
  for (auto& r : rows) r.density = r.total ? static_cast<double>(r.matching) / static_cast<double>(r.total) : 0;
  return rows;
}

void write_census_csv(std::ostream& out, const std::vector<CensusRecord>& rows, double constant_ref) {
  out << "H,count,normalized,constant_ref\n";
  out.precision(10);
  for (const auto& r : rows) out << r.H << ',' << r.count << ',' << r.normalized << ',' << constant_ref << '\n';
}

}  // namespace selmerlab
