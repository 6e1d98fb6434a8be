#include "fbac/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fbac/errors.hpp"

namespace fbac {

namespace {

template <class DistFn, class DiffFn>
double seminorm_impl(std::size_t n, double alpha, const DistFn& dist,
                     const DiffFn& diff, std::span<const double> norms,
                     const HolderOptions& opts) {
  if (n < 2) throw DomainError("holder_seminorm needs at least 2 samples");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("holder exponent must lie in (0, 1]");
  double best = 0.0;
  auto pair = [&](std::size_t i, std::size_t j) {
    const double d = dist(i, j);
    if (!(d > 0.0)) return;
    const double q = diff(i, j) / std::pow(d, alpha);
    if (std::isfinite(q)) best = std::max(best, q);
  };

  const std::size_t total = n * (n - 1) / 2;
  if (total <= opts.max_exact_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pair(i, j);
    return best;
  }

  // Anchors: first, last, smallest- and largest-norm samples against all.
  const auto [mn, mx] = std::minmax_element(norms.begin(), norms.end());
  const std::size_t anchors[] = {0, n - 1,
                                 static_cast<std::size_t>(mn - norms.begin()),
                                 static_cast<std::size_t>(mx - norms.begin())};
  for (std::size_t a : anchors)
    for (std::size_t j = 0; j < n; ++j)
      if (j != a) pair(a, j);

  // Dyadic offset bins [2^b, 2^(b+1)), equal share of the pair budget each.
  std::vector<std::size_t> lo_off;
  for (std::size_t off = 1; off < n; off *= 2) lo_off.push_back(off);
  const std::size_t per_bin =
      std::max<std::size_t>(1, opts.sampled_pairs / lo_off.size());
  std::mt19937_64 rng(opts.seed);
  for (std::size_t b = 0; b < lo_off.size(); ++b) {
    const std::size_t o_lo = lo_off[b];
    const std::size_t o_hi = std::min(2 * o_lo, n);  // exclusive
    // Pairs in this bin: sum over off of (n - off).
    std::size_t bin_pairs = 0;
    for (std::size_t off = o_lo; off < o_hi; ++off) bin_pairs += n - off;
    if (bin_pairs <= per_bin) {
      for (std::size_t off = o_lo; off < o_hi; ++off)
        for (std::size_t i = 0; i + off < n; ++i) pair(i, i + off);
      continue;
    }
    std::uniform_int_distribution<std::size_t> off_dist(o_lo, o_hi - 1);
    for (std::size_t k = 0; k < per_bin; ++k) {
      const std::size_t off = off_dist(rng);
      std::uniform_int_distribution<std::size_t> i_dist(0, n - off - 1);
      const std::size_t i = i_dist(rng);
      pair(i, i + off);
    }
  }
  return best;
}

}  // namespace

double holder_seminorm(std::span<const HolderSample> s, double alpha,
                       HolderMetric metric, const HolderOptions& opts) {
  std::vector<double> norms(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) norms[i] = s[i].value.norm();
  auto dist = [&](std::size_t i, std::size_t j) {
    const double dx = (s[i].x - s[j].x).norm();
    if (metric == HolderMetric::Spatial) return dx;
    return std::max(dx, std::sqrt(std::abs(s[i].t - s[j].t)));
  };
  auto diff = [&](std::size_t i, std::size_t j) {
    return (s[i].value - s[j].value).norm();
  };
  return seminorm_impl(s.size(), alpha, dist, diff, norms, opts);
}

double holder_seminorm_1d(std::span<const double> x, std::span<const double> f,
                          double alpha, const HolderOptions& opts) {
  if (x.size() != f.size()) throw DomainError("holder: size mismatch");
  auto dist = [&](std::size_t i, std::size_t j) { return std::abs(x[i] - x[j]); };
  auto diff = [&](std::size_t i, std::size_t j) { return std::abs(f[i] - f[j]); };
  return seminorm_impl(x.size(), alpha, dist, diff, f, opts);
}

}  // namespace fbac
