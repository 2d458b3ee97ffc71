#include "hateprobe/significance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hateprobe {

namespace {

struct Ranked {
  std::vector<std::int64_t> doubled_ranks;  // 2 * midrank, always integral
  double tie_term = 0.0;                    // sum over tie groups of t^3 - t
};

Ranked rank_pooled(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size() + ys.size();
  std::vector<double> pooled(xs.begin(), xs.end());
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

  Ranked r;
  r.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1..j+1 share the midrank (i+j+2)/2
    auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
    auto t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double exact_p(const Ranked& r, std::size_t nx, std::int64_t observed_sum2) {
  const std::size_t n = r.doubled_ranks.size();
  std::int64_t max_sum = 0;
  for (auto v : r.doubled_ranks) max_sum += v;
  // ways[k][s]: number of k-subsets with doubled rank sum s
  std::vector<std::vector<double>> ways(nx + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    auto v = static_cast<std::size_t>(r.doubled_ranks[item]);
    for (std::size_t k = std::min(nx, item + 1); k >= 1; --k) {
      auto& dst = ways[k];
      const auto& src = ways[k - 1];
      for (std::size_t s = dst.size(); s-- > v;) dst[s] += src[s - v];
    }
  }
  // E[2 * rank sum] = nx * (n + 1)
  const auto center = static_cast<std::int64_t>(nx * (n + 1));
  const auto observed_dev = std::llabs(observed_sum2 - center);
  double total = 0.0, extreme = 0.0;
  for (std::size_t s = 0; s < ways[nx].size(); ++s) {
    double w = ways[nx][s];
    if (w == 0.0) continue;
    total += w;
    if (std::llabs(static_cast<std::int64_t>(s) - center) >= observed_dev) extreme += w;
  }
  return extreme / total;
}

double normal_p(double u, double nx, double ny, double tie_term) {
  const double n = nx + ny;
  const double mu = nx * ny / 2.0;
  const double var = nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys, MannWhitneyMethod method) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
  const auto nx = xs.size();
  const auto ny = ys.size();
  auto ranked = rank_pooled(xs, ys);
  std::int64_t sum2 = 0;
  for (std::size_t i = 0; i < nx; ++i) sum2 += ranked.doubled_ranks[i];

  MannWhitneyResult result;
  result.u = static_cast<double>(sum2) / 2.0 - static_cast<double>(nx * (nx + 1)) / 2.0;
  if (method == MannWhitneyMethod::kAuto) {
    method = nx + ny <= kExactMaxTotal ? MannWhitneyMethod::kExact : MannWhitneyMethod::kNormal;
  }
  result.method = method;
  double p = method == MannWhitneyMethod::kExact
                 ? exact_p(ranked, nx, sum2)
                 : normal_p(result.u, static_cast<double>(nx), static_cast<double>(ny), ranked.tie_term);
  result.p = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
  return result;
}

}  // namespace hateprobe
