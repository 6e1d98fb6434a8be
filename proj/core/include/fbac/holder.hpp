#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "fbac/linalg.hpp"

namespace fbac {

struct HolderSample {
  Vec x;
  double t = 0.0;
  Vec value;
};

enum class HolderMetric { Spatial, Parabolic };

struct HolderOptions {
  // Full enumeration when the pair count is at most this; otherwise a
  // stratified random subset of `sampled_pairs` pairs.
  std::size_t max_exact_pairs = 100'000;
  std::size_t sampled_pairs = 100'000;
  std::uint64_t seed = 0x5EED;
};

/// sup over pairs of |f(p) - f(q)| / dist(p, q)^alpha, with dist = |x - y|
/// (spatial) or max(|x - y|, |t - s|^(1/2)) (parabolic). Pairs at zero
/// distance are skipped.
///
/// Large sample sets are handled by stratifying pairs on the dyadic scale of
/// their index offset |i - j| (the samples are expected in spatial order), so
/// short-range pairs, which dominate the seminorm for alpha < 1, are never
/// crowded out. Pairs joining the extreme-valued samples to every sample
/// are always included.
double holder_seminorm(std::span<const HolderSample> samples, double alpha,
                       HolderMetric metric = HolderMetric::Spatial,
                       const HolderOptions& opts = {});

/// Scalar values at 1D positions.
double holder_seminorm_1d(std::span<const double> x,
                          std::span<const double> f, double alpha,
                          const HolderOptions& opts = {});

}  // namespace fbac
