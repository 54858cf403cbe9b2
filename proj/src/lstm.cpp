#include "wavecast/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "wavecast/errors.hpp"
#include "wavecast/rng.hpp"

namespace wavecast {
namespace {

using ordered_json = nlohmann::ordered_json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// pre-activation for one gate: W x + V y_prev + b
std::vector<double> gate_input(const Matrix& w, const Matrix& v,
                               const std::vector<double>& b,
                               std::span<const double> x,
                               const std::vector<double>& y_prev) {
  std::vector<double> out = w.multiply(x);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < v.cols(); ++c) acc += v(r, c) * y_prev[c];
    out[r] += acc + b[r];
  }
  return out;
}

void require_shapes(const LstmParams& p, std::size_t input_dim) {
  if (p.hidden == 0) throw ShapeError("lstm: hidden size is zero");
  if (input_dim != p.input)
    throw ShapeError("lstm: input dimension mismatch");
  const Matrix* ws[4] = {&p.w_z, &p.w_i, &p.w_f, &p.w_o};
  const Matrix* vs[4] = {&p.v_z, &p.v_i, &p.v_f, &p.v_o};
  const std::vector<double>* bs[4] = {&p.b_z, &p.b_i, &p.b_f, &p.b_o};
  for (int g = 0; g < 4; ++g) {
    if (ws[g]->rows() != p.hidden || ws[g]->cols() != p.input ||
        vs[g]->rows() != p.hidden || vs[g]->cols() != p.hidden ||
        bs[g]->size() != p.hidden)
      throw ShapeError("lstm: inconsistent parameter shapes");
  }
  if (p.readout.size() != p.hidden)
    throw ShapeError("lstm: readout shape mismatch");
}

struct StepCache {
  std::vector<double> z, i, f, o, c, tanh_c, y;
};

StepCache run_step(const LstmParams& p, std::span<const double> x,
                   const std::vector<double>& c_prev,
                   const std::vector<double>& y_prev) {
  StepCache s;
  s.z = gate_input(p.w_z, p.v_z, p.b_z, x, y_prev);
  s.i = gate_input(p.w_i, p.v_i, p.b_i, x, y_prev);
  s.f = gate_input(p.w_f, p.v_f, p.b_f, x, y_prev);
  s.o = gate_input(p.w_o, p.v_o, p.b_o, x, y_prev);
  const std::size_t h = p.hidden;
  s.c.resize(h);
  s.tanh_c.resize(h);
  s.y.resize(h);
  for (std::size_t k = 0; k < h; ++k) {
    s.z[k] = std::tanh(s.z[k]);
    s.i[k] = sigmoid(s.i[k]);
    s.f[k] = sigmoid(s.f[k]);
    s.o[k] = sigmoid(s.o[k]);
    s.c[k] = s.i[k] * s.z[k] + s.f[k] * c_prev[k];
    s.tanh_c[k] = std::tanh(s.c[k]);
    s.y[k] = s.o[k] * s.tanh_c[k];
  }
  return s;
}

// Flat views over every trainable tensor, in a fixed order shared by the
// optimizer and the serializer.
template <typename Params>
std::vector<std::span<double>> tensor_views(Params& p) {
  return {
      std::span<double>(p.w_z.data()), std::span<double>(p.w_i.data()),
      std::span<double>(p.w_f.data()), std::span<double>(p.w_o.data()),
      std::span<double>(p.v_z.data()), std::span<double>(p.v_i.data()),
      std::span<double>(p.v_f.data()), std::span<double>(p.v_o.data()),
      std::span<double>(p.b_z),        std::span<double>(p.b_i),
      std::span<double>(p.b_f),        std::span<double>(p.b_o),
      std::span<double>(p.readout),    std::span<double>(&p.readout_bias, 1)};
}

LstmGradients zero_gradients(std::size_t h, std::size_t p) {
  LstmGradients g;
  g.w_z = g.w_i = g.w_f = g.w_o = Matrix(h, p);
  g.v_z = g.v_i = g.v_f = g.v_o = Matrix(h, h);
  g.b_z.assign(h, 0.0);
  g.b_i.assign(h, 0.0);
  g.b_f.assign(h, 0.0);
  g.b_o.assign(h, 0.0);
  g.readout.assign(h, 0.0);
  g.readout_bias = 0.0;
  return g;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t hidden, std::size_t input) {
  LstmParams p;
  p.hidden = hidden;
  p.input = input;
  p.w_z = p.w_i = p.w_f = p.w_o = Matrix(hidden, input);
  p.v_z = p.v_i = p.v_f = p.v_o = Matrix(hidden, hidden);
  p.b_z.assign(hidden, 0.0);
  p.b_i.assign(hidden, 0.0);
  p.b_f.assign(hidden, 0.0);
  p.b_o.assign(hidden, 0.0);
  p.readout.assign(hidden, 0.0);
  p.readout_bias = 0.0;
  return p;
}

LstmParams LstmParams::init(std::size_t hidden, std::size_t input,
                            std::uint64_t seed) {
  if (hidden == 0 || input == 0)
    throw ShapeError("lstm: hidden and input sizes must be positive");
  LstmParams p = zeros(hidden, input);
  Rng rng(seed);
  const double w_bound = 1.0 / std::sqrt(static_cast<double>(input));
  const double v_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Matrix* m : {&p.w_z, &p.w_i, &p.w_f, &p.w_o})
    for (double& v : m->data()) v = rng.uniform(-w_bound, w_bound);
  for (Matrix* m : {&p.v_z, &p.v_i, &p.v_f, &p.v_o})
    for (double& v : m->data()) v = rng.uniform(-v_bound, v_bound);
  // forget bias 1 so early training does not erase the cell
  std::fill(p.b_f.begin(), p.b_f.end(), 1.0);
  for (double& v : p.readout) v = rng.uniform(-v_bound, v_bound);
  return p;
}

LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    const LstmState& state) {
  require_shapes(params, x.size());
  if (state.cell.size() != params.hidden || state.output.size() != params.hidden)
    throw ShapeError("lstm: state size mismatch");
  StepCache s = run_step(params, x, state.cell, state.output);
  return LstmState{std::move(s.c), std::move(s.y)};
}

std::vector<std::vector<double>> lstm_forward(const LstmParams& params,
                                              const Matrix& steps) {
  if (steps.rows() == 0) throw DataError("lstm_forward: empty sequence");
  require_shapes(params, steps.cols());
  std::vector<std::vector<double>> outputs;
  outputs.reserve(steps.rows());
  LstmState state = LstmState::zeros(params.hidden);
  for (std::size_t t = 0; t < steps.rows(); ++t) {
    state = lstm_step(params, steps.row(t), state);
    outputs.push_back(state.output);
  }
  return outputs;
}

double lstm_forecast(const LstmParams& params, const Matrix& steps) {
  const auto outputs = lstm_forward(params, steps);
  return dot(params.readout, outputs.back()) + params.readout_bias;
}

LstmGradients lstm_gradients(const LstmParams& p, const LstmSequence& seq) {
  const Matrix& steps = seq.steps;
  if (steps.rows() == 0) throw DataError("lstm_gradients: empty sequence");
  require_shapes(p, steps.cols());
  const std::size_t h = p.hidden;
  const std::size_t big_t = steps.rows();

  std::vector<StepCache> cache(big_t);
  std::vector<double> c_prev(h, 0.0), y_prev(h, 0.0);
  for (std::size_t t = 0; t < big_t; ++t) {
    cache[t] = run_step(p, steps.row(t), c_prev, y_prev);
    c_prev = cache[t].c;
    y_prev = cache[t].y;
  }
  const double pred = dot(p.readout, cache[big_t - 1].y) + p.readout_bias;
  const double dpred = 2.0 * (pred - seq.target);

  LstmGradients g = zero_gradients(h, p.input);
  for (std::size_t k = 0; k < h; ++k) g.readout[k] = dpred * cache[big_t - 1].y[k];
  g.readout_bias = dpred;

  std::vector<double> dy(h), dc(h, 0.0);
  for (std::size_t k = 0; k < h; ++k) dy[k] = dpred * p.readout[k];

  std::vector<double> dz(h), di(h), df(h), dout(h);
  for (std::size_t t = big_t; t-- > 0;) {
    const StepCache& s = cache[t];
    const std::vector<double>* cp = t > 0 ? &cache[t - 1].c : nullptr;
    const std::vector<double>* yp = t > 0 ? &cache[t - 1].y : nullptr;
    for (std::size_t k = 0; k < h; ++k) {
      dout[k] = dy[k] * s.tanh_c[k];
      dc[k] += dy[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      di[k] = dc[k] * s.z[k];
      dz[k] = dc[k] * s.i[k];
      df[k] = dc[k] * (cp ? (*cp)[k] : 0.0);
      // pre-activation derivatives
      dz[k] *= 1.0 - s.z[k] * s.z[k];
      di[k] *= s.i[k] * (1.0 - s.i[k]);
      df[k] *= s.f[k] * (1.0 - s.f[k]);
      dout[k] *= s.o[k] * (1.0 - s.o[k]);
    }

    auto accumulate = [&](Matrix& gw, Matrix& gv, std::vector<double>& gb,
                          const std::vector<double>& dgate) {
      auto x = steps.row(t);
      for (std::size_t k = 0; k < h; ++k) {
        const double d = dgate[k];
        gb[k] += d;
        for (std::size_t c = 0; c < p.input; ++c) gw(k, c) += d * x[c];
        if (yp)
          for (std::size_t c = 0; c < h; ++c) gv(k, c) += d * (*yp)[c];
      }
    };
    accumulate(g.w_z, g.v_z, g.b_z, dz);
    accumulate(g.w_i, g.v_i, g.b_i, di);
    accumulate(g.w_f, g.v_f, g.b_f, df);
    accumulate(g.w_o, g.v_o, g.b_o, dout);

    // carry to step t-1
    std::vector<double> dy_prev(h, 0.0);
    const Matrix* vs[4] = {&p.v_z, &p.v_i, &p.v_f, &p.v_o};
    const std::vector<double>* ds[4] = {&dz, &di, &df, &dout};
    for (int gate = 0; gate < 4; ++gate)
      for (std::size_t k = 0; k < h; ++k) {
        const double d = (*ds[gate])[k];
        for (std::size_t c = 0; c < h; ++c) dy_prev[c] += (*vs[gate])(k, c) * d;
      }
    for (std::size_t k = 0; k < h; ++k) dc[k] *= s.f[k];
    dy = std::move(dy_prev);
  }
  return g;
}

LstmTrainResult train_lstm(const std::vector<LstmSequence>& data,
                           const LstmTrainConfig& config) {
  if (data.empty()) throw DataError("train_lstm: empty dataset");
  if (config.hidden_size == 0)
    throw DataError("train_lstm: hidden size must be at least 1");
  const std::size_t input_dim = data[0].steps.cols();
  for (const auto& seq : data) {
    if (seq.steps.rows() == 0 || seq.steps.cols() != input_dim)
      throw DataError("train_lstm: inconsistent sequence shapes");
    for (double v : seq.steps.data())
      if (!std::isfinite(v)) throw DataError("train_lstm: non-finite input");
    if (!std::isfinite(seq.target))
      throw DataError("train_lstm: non-finite target");
  }

  LstmTrainResult result;
  result.params = LstmParams::init(config.hidden_size, input_dim, config.seed);

  LstmGradients adam_m = zero_gradients(config.hidden_size, input_dim);
  LstmGradients adam_v = zero_gradients(config.hidden_size, input_dim);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  std::size_t adam_t = 0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(config.seed ^ (0x9E3779B97F4A7C15ULL + epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_u64() % i]);

    double loss_acc = 0.0;
    for (std::size_t idx : order) {
      const LstmSequence& seq = data[idx];
      const double pred = lstm_forecast(result.params, seq.steps);
      const double err = pred - seq.target;
      loss_acc += err * err;

      LstmGradients grad = lstm_gradients(result.params, seq);
      auto gviews = tensor_views(grad);
      if (config.clip_norm > 0.0) {
        double norm2 = 0.0;
        for (auto view : gviews)
          for (double v : view) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        if (norm > config.clip_norm) {
          const double scale = config.clip_norm / norm;
          for (auto view : gviews)
            for (double& v : view) v *= scale;
        }
      }

      ++adam_t;
      const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
      const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
      auto pviews = tensor_views(result.params);
      auto mviews = tensor_views(adam_m);
      auto vviews = tensor_views(adam_v);
      for (std::size_t ten = 0; ten < pviews.size(); ++ten) {
        auto pv = pviews[ten];
        auto gv = gviews[ten];
        auto mv = mviews[ten];
        auto vv = vviews[ten];
        for (std::size_t k = 0; k < pv.size(); ++k) {
          mv[k] = kBeta1 * mv[k] + (1.0 - kBeta1) * gv[k];
          vv[k] = kBeta2 * vv[k] + (1.0 - kBeta2) * gv[k] * gv[k];
          pv[k] -= config.learning_rate * (mv[k] / corr1) /
                   (std::sqrt(vv[k] / corr2) + kAdamEps);
        }
      }
    }

    const double epoch_loss = loss_acc / static_cast<double>(data.size());
    if (!std::isfinite(epoch_loss))
      throw DivergenceError("train_lstm: non-finite loss at epoch " +
                                std::to_string(epoch),
                            epoch);
    result.loss_history.push_back(epoch_loss);
  }
  return result;
}

std::string LstmParams::to_json() const {
  ordered_json j;
  j["h"] = hidden;
  j["p"] = input;
  auto mat = [](const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
  };
  j["w_z"] = mat(w_z);
  j["w_i"] = mat(w_i);
  j["w_f"] = mat(w_f);
  j["w_o"] = mat(w_o);
  j["v_z"] = mat(v_z);
  j["v_i"] = mat(v_i);
  j["v_f"] = mat(v_f);
  j["v_o"] = mat(v_o);
  j["b_z"] = b_z;
  j["b_i"] = b_i;
  j["b_f"] = b_f;
  j["b_o"] = b_o;
  j["readout"] = readout;
  j["readout_bias"] = readout_bias;
  return j.dump(2);
}

LstmParams LstmParams::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("lstm params: bad JSON: ") + e.what());
  }
  LstmParams p;
  p.hidden = j.at("h").get<std::size_t>();
  p.input = j.at("p").get<std::size_t>();
  auto mat = [&](const char* name, std::size_t rows, std::size_t cols) {
    const auto& rj = j.at(name);
    if (rj.size() != rows)
      throw DataError(std::string("lstm params: bad shape for ") + name);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = rj[r].get<std::vector<double>>();
      if (row.size() != cols)
        throw DataError(std::string("lstm params: bad shape for ") + name);
      std::copy(row.begin(), row.end(), m.row(r).begin());
    }
    return m;
  };
  p.w_z = mat("w_z", p.hidden, p.input);
  p.w_i = mat("w_i", p.hidden, p.input);
  p.w_f = mat("w_f", p.hidden, p.input);
  p.w_o = mat("w_o", p.hidden, p.input);
  p.v_z = mat("v_z", p.hidden, p.hidden);
  p.v_i = mat("v_i", p.hidden, p.hidden);
  p.v_f = mat("v_f", p.hidden, p.hidden);
  p.v_o = mat("v_o", p.hidden, p.hidden);
  p.b_z = j.at("b_z").get<std::vector<double>>();
  p.b_i = j.at("b_i").get<std::vector<double>>();
  p.b_f = j.at("b_f").get<std::vector<double>>();
  p.b_o = j.at("b_o").get<std::vector<double>>();
  p.readout = j.at("readout").get<std::vector<double>>();
  p.readout_bias = j.at("readout_bias").get<double>();
  if (p.b_z.size() != p.hidden || p.b_i.size() != p.hidden ||
      p.b_f.size() != p.hidden || p.b_o.size() != p.hidden ||
      p.readout.size() != p.hidden)
    throw DataError("lstm params: bias/readout shape mismatch");
  return p;
}

}  // namespace wavecast
