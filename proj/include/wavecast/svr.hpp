#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavecast/linalg.hpp"

namespace wavecast {

enum class KernelKind { kLinear, kPolynomial, kGaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  int degree = 2;      // polynomial only
  double scale = 1.0;  // gaussian only

  static KernelSpec linear() { return {KernelKind::kLinear, 0, 0.0}; }
  static KernelSpec polynomial(int degree) { return {KernelKind::kPolynomial, degree, 0.0}; }
  static KernelSpec gaussian(double scale) { return {KernelKind::kGaussian, 0, scale}; }
};

/// The six preset names: linear, quadratic, cubic, fine-gaussian,
/// medium-gaussian, coarse-gaussian. Gaussian scales depend on the feature
/// count p: sqrt(p)/4, sqrt(p), 4*sqrt(p).
KernelSpec kernel_preset(std::string_view name, std::size_t feature_count);
const std::vector<std::string>& kernel_preset_names();
std::string kernel_name(const KernelSpec& spec);

/// linear: <x,y>; polynomial: (1 + <x,y>)^q; gaussian: exp(-|x-y|^2 / 2s^2).
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

struct SvrHyperParams {
  double c = 1.0;                     // box constraint
  std::optional<double> epsilon{};    // tube half-width; default 0.1*stdev(y)
  double tolerance = 1e-3;            // KKT slack
  std::size_t max_iterations = 100000;
};

/// Per-feature z-scoring statistics captured at training time.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stdev;  // zero-variance features get stdev 1

  std::vector<double> apply(std::span<const double> x) const;
  static FeatureScaler fit(const Matrix& x);
};

struct SvrModel {
  KernelSpec kernel;
  double c = 1.0;
  double epsilon = 0.0;  // resolved value
  FeatureScaler scaler;
  Matrix support_vectors;           // scaled training rows with beta != 0
  std::vector<double> dual_coeffs;  // beta_i = alpha_i - alpha_i*
  std::vector<std::size_t> support_indices;  // original training rows
  double bias = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  double dual_objective = 0.0;  // -1/2 b'Kb - eps*sum|b| + y'b at the solution

  std::string to_json() const;
  static SvrModel from_json(const std::string& text);
};

/// Trains epsilon-SVR by sequential two-multiplier optimization of the
/// dual (maximal-violating-pair selection, lowest index on ties) until the
/// maximum KKT violation drops below `tolerance`. Deterministic.
SvrModel train_svr(const Matrix& x, std::span<const double> y,
                   const KernelSpec& spec, const SvrHyperParams& hyper = {});

double svr_predict(const SvrModel& model, std::span<const double> x);

}  // namespace wavecast
