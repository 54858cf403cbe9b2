#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavecast/filter_bank.hpp"

namespace wavecast {

/// Threshold bookkeeping for one detail band.
struct BandThreshold {
  std::size_t level = 1;      // 1-based decomposition level
  std::size_t band = 1;       // 1..3 (d1, d2, d3)
  double sigma = 0.0;         // noise scale estimate
  double lambda = 0.0;        // universal threshold
  std::size_t band_size = 0;  // N, elements in the band
  std::size_t zeroed = 0;     // coefficients set to zero
};

struct ThresholdPlan {
  std::vector<BandThreshold> bands;
};

/// Noise scale of a detail band: median(|d|) / 0.6745. The median of an
/// even count is the mean of the two middle order statistics.
double estimate_sigma(std::span<const double> band);

/// lambda = sigma * sqrt(2 ln N), natural logarithm.
double universal_threshold(double sigma, std::size_t n_elems);

/// Keeps coefficients with |d| >= lambda, zeroes the rest.
std::vector<double> hard_threshold(std::span<const double> band, double lambda);

struct DenoiseResult {
  std::vector<double> signal;
  ThresholdPlan plan;
};

/// Full pipeline: multilevel transform, per-band sigma and lambda, hard
/// thresholding of every detail band (the approximation band passes
/// through untouched), reconstruction.
DenoiseResult denoise_signal(const FilterBank& fb, std::span<const double> signal,
                             std::size_t levels = 1);

}  // namespace wavecast
