#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"

namespace mmpkit {

/// Deterministic synthetic MMP surface used by the generator below.
///
/// With u_c the input rescaled to [0,1] over the reference databank range,
///   s = 0.04*exp(-1.8*u1) + 0.22*(1-u2)^2 + 0.20*(1-u3)^3
///     + 0.05*0.5*(1+cos(pi*u4)) + 0.26*u5^2 + 0.23*u5*(1-u3)
///   mmp = mmp_min + (mmp_max - mmp_min) * s.
/// The weights sum to 1 and every term lies in [0,1], so the value always
/// falls inside the reference MMP range. The surface decreases in the first
/// four inputs (weakly in mwc7plus) and increases in temperature.
inline double latent_mmp(const FeatureVector& f) {
  const auto x = f.to_vector();
  double u[kFeatureCount];
  for (int c = 0; c < kFeatureCount; ++c) {
    u[c] = (x[c] - ReferenceStats::kMin[c]) /
           (ReferenceStats::kMax[c] - ReferenceStats::kMin[c]);
  }
  const double s = 0.04 * std::exp(-1.8 * u[0]) +
                   0.22 * (1.0 - u[1]) * (1.0 - u[1]) +
                   0.20 * std::pow(1.0 - u[2], 3) +
                   0.05 * 0.5 * (1.0 + std::cos(std::numbers::pi * u[3])) +
                   0.26 * u[4] * u[4] +
                   0.23 * u[4] * (1.0 - u[2]);
  const int m = kFeatureCount;  // target column
  return ReferenceStats::kMin[m] +
         (ReferenceStats::kMax[m] - ReferenceStats::kMin[m]) * s;
}

/// Generates a synthetic databank whose marginals stay inside the reference
/// ranges and whose column means match the reference means in expectation.
///
/// Each input is drawn from a two-piece uniform mixture on
/// [min, mean] u [mean, max] with piece probabilities chosen so the mixture
/// mean equals the reference mean. The target is latent_mmp(x) plus Gaussian
/// noise of standard deviation `noise_sd`, clamped to the reference MMP
/// range. Fully deterministic for a given seed.
inline Dataset synthesize(Eigen::Index n, std::uint64_t seed,
                          double noise_sd = 0.8) {
  if (n < 1) throw ArgumentError("synthesize requires n >= 1");
  if (noise_sd < 0.0 || !std::isfinite(noise_sd)) {
    throw ArgumentError("noise_sd must be finite and non-negative");
  }
  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double raw[kFeatureCount];
    for (int c = 0; c < kFeatureCount; ++c) {
      const double lo = ReferenceStats::kMin[c];
      const double hi = ReferenceStats::kMax[c];
      const double mid = ReferenceStats::kMean[c];
      const double mean_frac = (mid - lo) / (hi - lo);
      // two-piece mixture; P(low piece) = 1 - mean_frac gives mean == mid
      const bool low = rng.uniform() < 1.0 - mean_frac;
      raw[c] = low ? rng.uniform(lo, mid) : rng.uniform(mid, hi);
    }
    Sample s;
    s.features = FeatureVector{raw[0], raw[1], raw[2], raw[3], raw[4]};
    const double z = rng.normal();  // drawn even at noise_sd == 0 so that the
                                    // input stream is noise-level invariant
    const int m = kFeatureCount;
    s.mmp = std::clamp(latent_mmp(s.features) + noise_sd * z,
                       ReferenceStats::kMin[m], ReferenceStats::kMax[m]);
    samples.push_back(s);
  }
  return Dataset::from_samples(samples);
}

}  // namespace mmpkit
