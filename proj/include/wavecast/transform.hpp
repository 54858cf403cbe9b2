#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavecast/filter_bank.hpp"
#include "wavecast/linalg.hpp"

namespace wavecast {

/// Valid signal lengths are exact powers of four, at least 16.
bool is_valid_signal_length(std::size_t n);
void require_valid_signal_length(std::size_t n);

/// One decomposition level: approximation band `approx` plus detail bands
/// `d1`, `d2`, `d3`, each of length n/4.
struct WaveletCoefficients {
  std::vector<double> approx;
  std::vector<double> d1;
  std::vector<double> d2;
  std::vector<double> d3;

  std::size_t signal_length() const { return approx.size() * 4; }
  std::vector<double>& detail(std::size_t i);
  const std::vector<double>& detail(std::size_t i) const;
};

/// Multi-level decomposition. Only the deepest approximation is kept;
/// `details[l]` holds the three detail bands of level l+1 (details[0] is
/// the finest level). flatten() emits the canonical serialization order
/// [a^L, d1^L, d2^L, d3^L, ..., d1^1, d2^1, d3^1].
struct MultilevelCoefficients {
  std::size_t signal_length = 0;
  std::vector<double> approx;  // a^L
  struct DetailLevel {
    std::vector<double> d1, d2, d3;
  };
  std::vector<DetailLevel> details;  // index 0 = level 1

  std::size_t levels() const { return details.size(); }
  std::vector<double> flatten() const;
  static MultilevelCoefficients from_flat(std::span<const double> flat,
                                          std::size_t levels);
};

/// Maximum decomposition depth for a signal of length n (deepest band must
/// keep length >= 4 so the wraparound row layout still applies).
std::size_t max_levels(std::size_t n);

/// The n x n orthonormal transform matrix: rows 1..n/4 are circular
/// shift-by-4 placements of alpha, then beta, gamma, delta blocks.
Matrix build_transform_matrix(const FilterBank& fb, std::size_t n);

/// Single-level transform via stride-4 circular correlation; equals the
/// matrix product of build_transform_matrix with the signal.
WaveletCoefficients forward_transform(const FilterBank& fb,
                                      std::span<const double> signal);

std::vector<double> inverse_transform(const FilterBank& fb,
                                      const WaveletCoefficients& coeffs);

MultilevelCoefficients multilevel_transform(const FilterBank& fb,
                                            std::span<const double> signal,
                                            std::size_t levels);

std::vector<double> inverse_multilevel(const FilterBank& fb,
                                       const MultilevelCoefficients& coeffs);

/// Orthogonal projections of the signal onto the approximation and detail
/// subspaces; the four components each have the signal's length, sum to
/// the signal and are mutually orthogonal.
struct SignalComponents {
  std::vector<double> approx;  // A1
  std::vector<double> d1, d2, d3;
};

SignalComponents project_components(const FilterBank& fb,
                                    std::span<const double> signal);

}  // namespace wavecast
