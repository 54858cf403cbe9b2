#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wavecast/dataset.hpp"
#include "wavecast/lstm.hpp"
#include "wavecast/svr.hpp"

namespace wavecast {

double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
/// R^2 = 1 - SS_res/SS_tot; throws MetricError when the actuals are constant.
double r_squared(std::span<const double> pred, std::span<const double> actual);

/// One-step model over a flattened lag window (day-major, as produced by
/// make_supervised).
using OneStepPredictor = std::function<double(std::span<const double>)>;

/// Feeds each one-step prediction back into the rolling window: the target
/// column takes the predicted value, every other column is frozen at its
/// last observed value. `window` holds the seed rows (lag x tickers).
std::vector<double> recursive_forecast(const OneStepPredictor& predict,
                                       Matrix window, std::size_t target_column,
                                       std::size_t horizon);

/// LSTM packaged for price forecasting: the cell works on z-scored
/// features/targets, the wrapper applies and undoes the scaling.
struct LstmForecaster {
  LstmParams params;
  FeatureScaler feature_scaler;  // over per-step input vectors (ticker columns)
  double target_mean = 0.0;
  double target_stdev = 1.0;
  std::size_t lag = 1;
  std::size_t ticker_count = 1;
  LstmTrainConfig config;
  std::vector<double> loss_history;

  double predict(std::span<const double> features) const;
  std::string to_json() const;
  static LstmForecaster from_json(const std::string& text);
};

LstmForecaster train_lstm_forecaster(const SupervisedSet& train,
                                     const LstmTrainConfig& config);

struct ComparisonConfig {
  std::vector<std::filesystem::path> ticker_files;
  std::string target_ticker;
  std::size_t lag = 10;
  std::vector<std::size_t> horizons = {1, 5, 13, 21};
  std::vector<std::string> modes = {"original", "wavelet"};
  std::string model = "svr";  // "svr" | "lstm"
  std::vector<std::string> kernels;  // empty = all six presets (svr only)
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  std::size_t denoise_levels = 1;
  SvrHyperParams svr;
  LstmTrainConfig lstm;
  bool keep_series = false;  // retain per-cell predicted/actual series

  static ComparisonConfig from_json(const std::string& text);
  void validate() const;
};

struct EvalCell {
  std::string mode;
  std::string model;
  std::string kernel;  // empty for lstm
  std::size_t horizon = 1;
  double rmse = 0.0;
  double mae = 0.0;
  double r_squared = 0.0;
  std::size_t n_test = 0;
  std::string error;  // empty on success
  // populated only when ComparisonConfig::keep_series is set
  std::vector<std::string> dates;
  std::vector<double> predicted;
  std::vector<double> actual;

  bool ok() const { return error.empty(); }
};

struct EvalReport {
  std::vector<EvalCell> cells;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;
  std::size_t lag = 0;
  std::size_t rows = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::string target_ticker;
  std::vector<std::string> tickers;
  std::string data_fingerprint;  // FNV-1a 64 over the aligned window

  std::string to_json() const;  // canonical key order
  std::string to_csv() const;   // one row per grid cell
};

/// Trains and evaluates the full comparison grid: for every mode, model or
/// kernel, and horizon, trains a one-step model on the train split and
/// recursively forecasts each test day from observed data h steps back.
/// Deterministic given config.seed.
EvalReport run_comparison(const ComparisonConfig& config);

/// 64-bit FNV-1a, used for data fingerprints and per-cell seed derivation.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace wavecast
