#include "wavecast/transform.hpp"

#include <string>

#include "wavecast/errors.hpp"

namespace wavecast {
namespace {

void require_bank_shape(const FilterBank& fb) {
  for (std::size_t i = 0; i < 4; ++i)
    if (fb.band(i).size() != kFilterLength)
      throw ShapeError("filter bank: all filters must have length 8");
}

}  // namespace

bool is_valid_signal_length(std::size_t n) {
  if (n < 16) return false;
  while (n % 4 == 0) n /= 4;
  return n == 1;
}

void require_valid_signal_length(std::size_t n) {
  if (!is_valid_signal_length(n))
    throw ShapeError("signal length " + std::to_string(n) +
                     " is not a power of 4 >= 16");
}

std::vector<double>& WaveletCoefficients::detail(std::size_t i) {
  switch (i) {
    case 0: return d1;
    case 1: return d2;
    default: return d3;
  }
}

const std::vector<double>& WaveletCoefficients::detail(std::size_t i) const {
  switch (i) {
    case 0: return d1;
    case 1: return d2;
    default: return d3;
  }
}

std::size_t max_levels(std::size_t n) {
  require_valid_signal_length(n);
  std::size_t levels = 0;
  while (n % 4 == 0 && n / 4 >= 4) {
    n /= 4;
    ++levels;
  }
  return levels;
}

Matrix build_transform_matrix(const FilterBank& fb, std::size_t n) {
  require_bank_shape(fb);
  require_valid_signal_length(n);
  const std::size_t band = n / 4;
  Matrix t(n, n, 0.0);
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& filter = fb.band(b);
    for (std::size_t j = 0; j < band; ++j) {
      const std::size_t row = b * band + j;
      for (std::size_t i = 0; i < kFilterLength; ++i)
        t(row, (4 * j + i) % n) = filter[i];
    }
  }
  return t;
}

WaveletCoefficients forward_transform(const FilterBank& fb,
                                      std::span<const double> signal) {
  require_bank_shape(fb);
  const std::size_t n = signal.size();
  require_valid_signal_length(n);
  const std::size_t band = n / 4;

  WaveletCoefficients out;
  out.approx.resize(band);
  out.d1.resize(band);
  out.d2.resize(band);
  out.d3.resize(band);
  std::vector<double>* bands[4] = {&out.approx, &out.d1, &out.d2, &out.d3};

  // Stride-4 circular correlation; identical to multiplying by the rows of
  // build_transform_matrix.
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& filter = fb.band(b);
    auto& dst = *bands[b];
    for (std::size_t j = 0; j < band; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < kFilterLength; ++i)
        acc += filter[i] * signal[(4 * j + i) % n];
      dst[j] = acc;
    }
  }
  return out;
}

std::vector<double> inverse_transform(const FilterBank& fb,
                                      const WaveletCoefficients& coeffs) {
  require_bank_shape(fb);
  const std::size_t band = coeffs.approx.size();
  if (band == 0 || coeffs.d1.size() != band || coeffs.d2.size() != band ||
      coeffs.d3.size() != band)
    throw ShapeError("wavelet coefficients: bands must share one length");
  const std::size_t n = band * 4;
  require_valid_signal_length(n);

  const std::vector<double>* bands[4] = {&coeffs.approx, &coeffs.d1,
                                         &coeffs.d2, &coeffs.d3};
  std::vector<double> signal(n, 0.0);
  // Adjoint of the forward correlation: scatter each coefficient through
  // its filter placement. T is orthonormal so the adjoint is the inverse.
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& filter = fb.band(b);
    const auto& src = *bands[b];
    for (std::size_t j = 0; j < band; ++j) {
      const double c = src[j];
      for (std::size_t i = 0; i < kFilterLength; ++i)
        signal[(4 * j + i) % n] += c * filter[i];
    }
  }
  return signal;
}

std::vector<double> MultilevelCoefficients::flatten() const {
  std::vector<double> flat;
  flat.reserve(signal_length);
  flat.insert(flat.end(), approx.begin(), approx.end());
  for (std::size_t l = details.size(); l-- > 0;) {
    flat.insert(flat.end(), details[l].d1.begin(), details[l].d1.end());
    flat.insert(flat.end(), details[l].d2.begin(), details[l].d2.end());
    flat.insert(flat.end(), details[l].d3.begin(), details[l].d3.end());
  }
  return flat;
}

MultilevelCoefficients MultilevelCoefficients::from_flat(
    std::span<const double> flat, std::size_t levels) {
  const std::size_t n = flat.size();
  require_valid_signal_length(n);
  if (levels == 0 || levels > max_levels(n))
    throw ShapeError("invalid decomposition depth " + std::to_string(levels) +
                     " for length " + std::to_string(n));

  MultilevelCoefficients out;
  out.signal_length = n;
  out.details.resize(levels);
  std::size_t deepest = n;
  for (std::size_t l = 0; l < levels; ++l) deepest /= 4;

  std::size_t pos = 0;
  auto take = [&](std::size_t count) {
    std::vector<double> v(flat.begin() + pos, flat.begin() + pos + count);
    pos += count;
    return v;
  };
  out.approx = take(deepest);
  std::size_t band = deepest;
  for (std::size_t l = levels; l-- > 0;) {
    out.details[l].d1 = take(band);
    out.details[l].d2 = take(band);
    out.details[l].d3 = take(band);
    band *= 4;
  }
  return out;
}

MultilevelCoefficients multilevel_transform(const FilterBank& fb,
                                            std::span<const double> signal,
                                            std::size_t levels) {
  const std::size_t n = signal.size();
  require_valid_signal_length(n);
  if (levels == 0)
    throw ShapeError("decomposition depth must be at least 1");
  if (levels > max_levels(n))
    throw ShapeError("depth " + std::to_string(levels) + " too deep for length " +
                     std::to_string(n) + " (deepest band would drop below 4)");

  MultilevelCoefficients out;
  out.signal_length = n;
  out.details.resize(levels);
  std::vector<double> current(signal.begin(), signal.end());
  for (std::size_t l = 0; l < levels; ++l) {
    WaveletCoefficients c = forward_transform(fb, current);
    out.details[l].d1 = std::move(c.d1);
    out.details[l].d2 = std::move(c.d2);
    out.details[l].d3 = std::move(c.d3);
    current = std::move(c.approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> inverse_multilevel(const FilterBank& fb,
                                       const MultilevelCoefficients& coeffs) {
  if (coeffs.details.empty())
    throw ShapeError("multilevel coefficients: no levels");
  std::vector<double> approx = coeffs.approx;
  for (std::size_t l = coeffs.details.size(); l-- > 0;) {
    WaveletCoefficients c;
    c.approx = std::move(approx);
    c.d1 = coeffs.details[l].d1;
    c.d2 = coeffs.details[l].d2;
    c.d3 = coeffs.details[l].d3;
    approx = inverse_transform(fb, c);
  }
  if (approx.size() != coeffs.signal_length)
    throw ShapeError("multilevel coefficients: band lengths inconsistent");
  return approx;
}

SignalComponents project_components(const FilterBank& fb,
                                    std::span<const double> signal) {
  WaveletCoefficients c = forward_transform(fb, signal);
  const std::size_t band = c.approx.size();
  const std::vector<double> zero(band, 0.0);

  auto reconstruct_one = [&](std::size_t keep) {
    WaveletCoefficients only;
    only.approx = keep == 0 ? c.approx : zero;
    only.d1 = keep == 1 ? c.d1 : zero;
    only.d2 = keep == 2 ? c.d2 : zero;
    only.d3 = keep == 3 ? c.d3 : zero;
    return inverse_transform(fb, only);
  };

  SignalComponents out;
  out.approx = reconstruct_one(0);
  out.d1 = reconstruct_one(1);
  out.d2 = reconstruct_one(2);
  out.d3 = reconstruct_one(3);
  return out;
}

}  // namespace wavecast
