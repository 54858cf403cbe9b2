#pragma once

// Independent oracles used by the unit and acceptance suites. Nothing here
// shares solver code with the library: the QP solver is projected gradient
// with FISTA momentum, gradients come from central finite differences.

#include <cstddef>
#include <span>
#include <vector>

#include "wavecast/linalg.hpp"
#include "wavecast/lstm.hpp"
#include "wavecast/svr.hpp"

namespace wavecast::testing {

struct DualSolution {
  std::vector<double> beta;  // length n
  double bias = 0.0;
  double objective = 0.0;  // -1/2 b'Kb - eps sum|b| + y'b
  std::size_t iterations = 0;
};

/// Solves the epsilon-SVR dual over the kernel matrix by projected
/// gradient ascent (FISTA momentum, adaptive restart, exact projection
/// onto the box-and-hyperplane feasible set by bisection).
DualSolution solve_svr_dual_pg(const Matrix& kernel, std::span<const double> y,
                               double c, double epsilon,
                               std::size_t max_iterations = 400000,
                               double residual_tol = 1e-12);

/// Max-form dual objective from beta, shared metric for solver comparisons.
double dual_objective(const Matrix& kernel, std::span<const double> y,
                      double epsilon, std::span<const double> beta);

/// Max KKT violation of a trained model over its training set, from the
/// epsilon-tube conditions on residuals and dual coefficients.
double max_kkt_violation(const SvrModel& model, const Matrix& x,
                         std::span<const double> y);

/// Central finite differences (step h) of the squared forecast error with
/// respect to every parameter; layout mirrors LstmGradients.
LstmGradients finite_difference_gradients(const LstmParams& params,
                                          const LstmSequence& seq,
                                          double step = 1e-5);

/// Per-parameter gradient-check error: |a-b| / max(1, |a|, |b|), maximized
/// over every tensor entry.
double max_gradient_error(const LstmGradients& analytic,
                          const LstmGradients& numeric);

// -- synthetic data ---------------------------------------------------------

/// Sequential calendar dates starting at an ISO day.
std::vector<std::string> sequential_dates(const std::string& start, std::size_t n);

/// Noiseless sine wave: sin(2*pi*t / period).
std::vector<double> sine_sequence(std::size_t n, double period);

/// The committed synthetic price series: base + trend*t +
/// amplitude*sin(2*pi*t/period) + N(0, sigma) with the library Rng.
std::vector<double> synthetic_closes(std::size_t n, std::uint64_t seed,
                                     double base = 100.0, double trend = 0.1,
                                     double amplitude = 1.0, double period = 16.0,
                                     double noise_sigma = 0.5);

/// Renders a date,close CSV with %.6f prices.
std::string price_csv_text(const std::vector<std::string>& dates,
                           const std::vector<double>& closes);

/// Supervised windows -> per-sample LSTM sequences without scaling.
std::vector<LstmSequence> windows_to_sequences(const Matrix& features,
                                               std::span<const double> targets,
                                               std::size_t steps);

}  // namespace wavecast::testing
