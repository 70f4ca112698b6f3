#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace selmerlab {

/// y^2 = x^3 + A x + B.
struct CurveKey {
  std::int64_t A = 0;
  std::int64_t B = 0;
};

/// max(|4A^3|, |27B^2|). Exact for |A| <= 10^6, |B| <= 10^9.
std::uint64_t height(std::int64_t A, std::int64_t B);

/// 4A^3 + 27B^2 != 0 and no prime p has p^4 | A and p^6 | B (0 is
/// divisible by every p^k). Checked by trial division.
bool is_minimal_curve(std::int64_t A, std::int64_t B);

struct CensusRecord {
  std::uint64_t H = 0;
  std::uint64_t count = 0;
  /// count / H^(5/6)
  double normalized = 0;
};

/// Largest a >= 0 with 4a^3 <= H, and largest b >= 0 with 27b^2 <= H.
std::int64_t max_abs_A(std::uint64_t H);
std::int64_t max_abs_B(std::uint64_t H);

/// Number of curves of height <= H, streamed over A then B with the range
/// of A split across `jobs` threads.
CensusRecord count_curves(std::uint64_t H, unsigned jobs = 1);

/// Calls `visit` on every curve of height <= H in order of A then B.
void for_each_curve(std::uint64_t H, const std::function<void(const CurveKey&)>& visit);

struct DensityRow {
  std::uint64_t H = 0;
  std::uint64_t matching = 0;
  std::uint64_t total = 0;
  double density = 0;
};

/// #{E of height <= H satisfying pred} / #{E of height <= H} for each H in
/// the grid, from one pass at the largest H.
std::vector<DensityRow> density_of(const std::function<bool(const CurveKey&)>& pred,
                                   const std::vector<std::uint64_t>& grid);

/// Columns H, count, normalized, constant_ref.
void write_census_csv(std::ostream& out, const std::vector<CensusRecord>& rows, double constant_ref);

}  // namespace selmerlab
