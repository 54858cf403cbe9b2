#include "wavecast/denoise.hpp"

#include <algorithm>
#include <cmath>

#include "wavecast/errors.hpp"
#include "wavecast/transform.hpp"

namespace wavecast {

double estimate_sigma(std::span<const double> band) {
  if (band.empty()) throw DataError("estimate_sigma: empty band");
  std::vector<double> mags(band.size());
  for (std::size_t i = 0; i < band.size(); ++i) mags[i] = std::abs(band[i]);
  std::sort(mags.begin(), mags.end());
  const std::size_t n = mags.size();
  const double median = (n % 2 == 1)
                            ? mags[n / 2]
                            : 0.5 * (mags[n / 2 - 1] + mags[n / 2]);
  return median / 0.6745;
}

double universal_threshold(double sigma, std::size_t n_elems) {
  if (n_elems == 0) throw DataError("universal_threshold: band count is zero");
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n_elems)));
}

std::vector<double> hard_threshold(std::span<const double> band, double lambda) {
  std::vector<double> out(band.size());
  for (std::size_t i = 0; i < band.size(); ++i)
    out[i] = std::abs(band[i]) >= lambda ? band[i] : 0.0;
  return out;
}

DenoiseResult denoise_signal(const FilterBank& fb, std::span<const double> signal,
                             std::size_t levels) {
  MultilevelCoefficients coeffs = multilevel_transform(fb, signal, levels);

  DenoiseResult result;
  for (std::size_t l = 0; l < coeffs.details.size(); ++l) {
    std::vector<double>* bands[3] = {&coeffs.details[l].d1, &coeffs.details[l].d2,
                                     &coeffs.details[l].d3};
    for (std::size_t b = 0; b < 3; ++b) {
      std::vector<double>& band = *bands[b];
      BandThreshold entry;
      entry.level = l + 1;
      entry.band = b + 1;
      entry.band_size = band.size();
      entry.sigma = estimate_sigma(band);
      entry.lambda = universal_threshold(entry.sigma, band.size());
      std::vector<double> kept = hard_threshold(band, entry.lambda);
      for (std::size_t i = 0; i < band.size(); ++i)
        if (band[i] != kept[i]) ++entry.zeroed;
      band = std::move(kept);
      result.plan.bands.push_back(entry);
    }
  }

  result.signal = inverse_multilevel(fb, coeffs);
  return result;
}

}  // namespace wavecast
