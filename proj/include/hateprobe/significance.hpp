#pragma once

#include <cstddef>
#include <span>

namespace hateprobe {

enum class MannWhitneyMethod { kAuto, kExact, kNormal };

struct MannWhitneyResult {
  double u = 0.0;  // statistic for xs
  double p = 1.0;  // two-sided, in (0, 1]
  MannWhitneyMethod method = MannWhitneyMethod::kAuto;
};

// kAuto uses the exact permutation distribution up to this combined size.
inline constexpr std::size_t kExactMaxTotal = 50;

// Two-sided Mann-Whitney U with midranks for ties.
//  - kExact: permutation distribution of the rank sum (ties included).
//  - kNormal: normal approximation, tie-corrected variance, continuity
//    correction.
// Throws std::invalid_argument when either sample is empty.
MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys,
                                 MannWhitneyMethod method = MannWhitneyMethod::kAuto);

}  // namespace hateprobe
