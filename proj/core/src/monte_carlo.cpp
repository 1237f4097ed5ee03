#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mata/errors.hpp"
#include "mata/parallel.hpp"
#include "mata/performance.hpp"

namespace mata {
namespace {

constexpr std::int64_t kBlockSize = 1 << 14;
constexpr std::int64_t kMinSamples = 10000;

struct BlockSums {
  std::int64_t hits = 0;
  double length = 0.0;
  double length_sq = 0.0;
};

std::seed_seq block_seed(std::uint64_t seed, std::uint64_t block) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
}

}  // namespace

McEstimate mc_oracle(double gamma, const ProblemConfig& cfg, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < kMinSamples) throw InputError("mc_oracle needs at least 10000 samples");
  if (!std::isfinite(gamma)) throw InputError("gamma must be finite");
  const TailModel model(cfg);
  const double rho = cfg.rho;
  const double srho = std::sqrt(1.0 - rho * rho);
  const double md = cfg.m.value();
  const double limit_half = model.standard_quantile();

  const std::int64_t blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> sums(static_cast<std::size_t>(blocks));
  parallel_for(sums.size(), [&](std::size_t b) {
    auto seq = block_seed(seed, b);
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi_sq(md);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlockSize;
    const std::int64_t count = std::min(kBlockSize, n_samples - begin);
    BlockSums acc;
    for (std::int64_t i = 0; i < count; ++i) {
      const double z1 = normal(engine);
      const double z2 = normal(engine);
      const double w = std::sqrt(chi_sq(engine) / md);
      const double x = gamma + z1;
      const double z = rho * z1 + srho * z2;
      const double g = x / w;
      double a_lower = limit_half, a_upper = -limit_half, s = limit_half;
      if (std::fabs(g) <= kGammaLimit) {
        const TailSolution sol = model.solve(g);
        a_lower = sol.a_lower;
        a_upper = sol.a_upper;
        s = sol.s;
      }
      if (w * a_upper <= z && z <= w * a_lower) ++acc.hits;
      const double len = w * s;
      acc.length += len;
      acc.length_sq += len * len;
    }
    sums[b] = acc;
  });

  BlockSums total;
  for (const auto& s : sums) {
    total.hits += s.hits;
    total.length += s.length;
    total.length_sq += s.length_sq;
  }
  const double n = static_cast<double>(n_samples);
  McEstimate out;
  out.samples = n_samples;
  out.coverage = static_cast<double>(total.hits) / n;
  out.se_coverage = std::sqrt(out.coverage * (1.0 - out.coverage) / n);
  out.length_numerator = total.length / n;
  const double var = std::fmax(0.0, (total.length_sq - n * out.length_numerator * out.length_numerator) / (n - 1.0));
  out.se_length = std::sqrt(var / n);
  return out;
}

}  // namespace mata
