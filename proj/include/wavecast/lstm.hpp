#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavecast/linalg.hpp"

namespace wavecast {

/// Gate weights of a single LSTM cell plus a linear scalar readout.
/// W_* map the input (h x p), V_* the previous output (h x h).
struct LstmParams {
  std::size_t hidden = 0;
  std::size_t input = 0;
  Matrix w_z, w_i, w_f, w_o;
  Matrix v_z, v_i, v_f, v_o;
  std::vector<double> b_z, b_i, b_f, b_o;
  std::vector<double> readout;  // 1 x h
  double readout_bias = 0.0;

  static LstmParams zeros(std::size_t hidden, std::size_t input);
  /// Uniform +-1/sqrt(p) input weights, +-1/sqrt(h) recurrent weights,
  /// forget bias 1, other biases 0. Deterministic in `seed`.
  static LstmParams init(std::size_t hidden, std::size_t input, std::uint64_t seed);

  std::string to_json() const;
  static LstmParams from_json(const std::string& text);
};

struct LstmState {
  std::vector<double> cell;    // c
  std::vector<double> output;  // y

  static LstmState zeros(std::size_t hidden) {
    return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
  }
};

/// One step of the cell: block input z (tanh), input/forget gates
/// (sigmoid), c = i*z + f*c_prev, output gate, y = o * tanh(c).
LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    const LstmState& state);

/// Left fold of lstm_step from the zero state; returns the output vector
/// of every step.
std::vector<std::vector<double>> lstm_forward(const LstmParams& params,
                                              const Matrix& steps);

/// Scalar forecast: readout applied to the final output.
double lstm_forecast(const LstmParams& params, const Matrix& steps);

struct LstmSequence {
  Matrix steps;  // rows = time steps, cols = input features
  double target = 0.0;
};

/// Gradients of the squared error (forecast - target)^2 for one sequence,
/// by full backpropagation through time. Same field layout as LstmParams.
struct LstmGradients {
  Matrix w_z, w_i, w_f, w_o;
  Matrix v_z, v_i, v_f, v_o;
  std::vector<double> b_z, b_i, b_f, b_o;
  std::vector<double> readout;
  double readout_bias = 0.0;
};

LstmGradients lstm_gradients(const LstmParams& params, const LstmSequence& seq);

struct LstmTrainConfig {
  std::size_t hidden_size = 8;
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  double clip_norm = 1.0;  // global gradient-norm clip; <= 0 disables
  std::uint64_t seed = 42;
};

struct LstmTrainResult {
  LstmParams params;
  std::vector<double> loss_history;  // mean squared error per epoch
};

/// Per-sample adaptive-moment (Adam) SGD over seeded-shuffled epochs.
/// Deterministic given config.seed. Throws DataError on an empty dataset
/// and DivergenceError (reporting the epoch) on a non-finite loss.
LstmTrainResult train_lstm(const std::vector<LstmSequence>& data,
                           const LstmTrainConfig& config);

}  // namespace wavecast
