#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wavecast {

inline constexpr std::size_t kFilterLength = 8;

/// The four length-8 filters of the 4-band transform. `alpha` is the low
/// pass filter; `beta`, `gamma`, `delta` are the high pass filters whose
/// circular shift-by-4 placements form the rows of the transform matrix.
struct FilterBank {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> delta;

  const std::vector<double>& band(std::size_t i) const;
};

/// The orthonormal 4-band filter bank used throughout the library. The
/// coefficients are stored to full double precision (they round to the
/// conventional 8-decimal listing) so the transform matrix is orthonormal
/// to machine precision rather than to ~1e-8.
FilterBank default_filter_bank();

/// The 8-decimal coefficient listing verbatim, including the sign defect
/// in gamma's sixth coefficient that breaks the zero-sum and orthogonality
/// conditions. Kept for demonstration; do not transform with it.
FilterBank paper_verbatim_filter_bank();

struct ConditionResult {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;
  double tolerance = 0.0;

  bool all_pass() const;
  double max_residual() const;
  const ConditionResult* find(const std::string& name) const;
};

/// Checks every filter-bank condition: low-pass sum 2, three high-pass
/// sums 0, four unit norms, six pairwise orthogonality dot products and
/// all sixteen shift-by-4 overlap products (these make the wrapped
/// transform matrix orthonormal). Throws ShapeError unless all four
/// filters have length 8.
ValidationReport validate_filter_bank(const FilterBank& fb, double tolerance = 1e-9);

}  // namespace wavecast
