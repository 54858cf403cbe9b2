#include "wavecast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>

#include "json.hpp"
#include "wavecast/denoise.hpp"
#include "wavecast/errors.hpp"
#include "wavecast/rng.hpp"

namespace wavecast {
namespace {

using ordered_json = nlohmann::ordered_json;

void require_metric_input(std::span<const double> pred,
                          std::span<const double> actual) {
  if (pred.size() != actual.size())
    throw ShapeError("metrics: prediction/actual length mismatch");
  if (pred.empty()) throw ShapeError("metrics: empty input");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double population_stdev(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
  require_metric_input(pred, actual);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
  require_metric_input(pred, actual);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += std::abs(pred[i] - actual[i]);
  return acc / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> actual) {
  require_metric_input(pred, actual);
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0)
    throw MetricError("r_squared: undefined for constant actuals");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> recursive_forecast(const OneStepPredictor& predict,
                                       Matrix window, std::size_t target_column,
                                       std::size_t horizon) {
  if (window.rows() == 0 || window.cols() == 0)
    throw ShapeError("recursive_forecast: empty seed window");
  if (target_column >= window.cols())
    throw ShapeError("recursive_forecast: target column out of range");

  std::vector<double> predictions;
  predictions.reserve(horizon);
  for (std::size_t step = 0; step < horizon; ++step) {
    const double value = predict(window.data());
    predictions.push_back(value);
    // slide: drop the oldest day, append the new one with every non-target
    // column frozen at its last observed value
    std::vector<double> next_row(window.row(window.rows() - 1).begin(),
                                 window.row(window.rows() - 1).end());
    next_row[target_column] = value;
    for (std::size_t r = 0; r + 1 < window.rows(); ++r) {
      auto src = window.row(r + 1);
      std::copy(src.begin(), src.end(), window.row(r).begin());
    }
    std::copy(next_row.begin(), next_row.end(),
              window.row(window.rows() - 1).begin());
  }
  return predictions;
}

double LstmForecaster::predict(std::span<const double> features) const {
  if (features.size() != lag * ticker_count)
    throw ShapeError("lstm forecaster: feature length mismatch");
  Matrix steps(lag, ticker_count);
  for (std::size_t t = 0; t < lag; ++t) {
    auto scaled = feature_scaler.apply(features.subspan(t * ticker_count, ticker_count));
    std::copy(scaled.begin(), scaled.end(), steps.row(t).begin());
  }
  return lstm_forecast(params, steps) * target_stdev + target_mean;
}

LstmForecaster train_lstm_forecaster(const SupervisedSet& train,
                                     const LstmTrainConfig& config) {
  if (train.size() == 0) throw DataError("train_lstm_forecaster: empty training set");

  LstmForecaster fc;
  fc.lag = train.lag;
  fc.ticker_count = train.ticker_count;
  fc.config = config;

  // per-step scaling statistics pooled over every (sample, day) input row
  Matrix step_rows(train.size() * train.lag, train.ticker_count);
  for (std::size_t s = 0; s < train.size(); ++s)
    for (std::size_t t = 0; t < train.lag; ++t)
      for (std::size_t c = 0; c < train.ticker_count; ++c)
        step_rows(s * train.lag + t, c) = train.features(s, t * train.ticker_count + c);
  fc.feature_scaler = FeatureScaler::fit(step_rows);

  double mean = 0.0;
  for (double y : train.targets) mean += y;
  mean /= static_cast<double>(train.size());
  double sd = population_stdev(train.targets);
  if (sd <= 0.0) sd = 1.0;
  fc.target_mean = mean;
  fc.target_stdev = sd;

  std::vector<LstmSequence> sequences(train.size());
  for (std::size_t s = 0; s < train.size(); ++s) {
    sequences[s].steps = Matrix(train.lag, train.ticker_count);
    for (std::size_t t = 0; t < train.lag; ++t) {
      auto scaled = fc.feature_scaler.apply(
          train.features.row(s).subspan(t * train.ticker_count, train.ticker_count));
      std::copy(scaled.begin(), scaled.end(), sequences[s].steps.row(t).begin());
    }
    sequences[s].target = (train.targets[s] - mean) / sd;
  }

  LstmTrainResult trained = train_lstm(sequences, config);
  fc.params = std::move(trained.params);
  fc.loss_history = std::move(trained.loss_history);
  return fc;
}

std::string LstmForecaster::to_json() const {
  ordered_json j;
  j["model_type"] = "lstm";
  j["h"] = params.hidden;
  j["p"] = params.input;
  j["lag"] = lag;
  j["ticker_count"] = ticker_count;
  j["params"] = ordered_json::parse(params.to_json());
  j["feature_scaler"] = {{"mean", feature_scaler.mean},
                         {"stdev", feature_scaler.stdev}};
  j["target_scaler"] = {{"mean", target_mean}, {"stdev", target_stdev}};
  j["config"] = {{"hidden_size", config.hidden_size},
                 {"learning_rate", config.learning_rate},
                 {"epochs", config.epochs},
                 {"clip_norm", config.clip_norm},
                 {"seed", config.seed}};
  j["loss_history"] = loss_history;
  return j.dump(2);
}

LstmForecaster LstmForecaster::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("lstm model: bad JSON: ") + e.what());
  }
  if (j.value("model_type", "") != "lstm")
    throw DataError("lstm model: model_type is not \"lstm\"");
  LstmForecaster fc;
  fc.lag = j.at("lag").get<std::size_t>();
  fc.ticker_count = j.at("ticker_count").get<std::size_t>();
  fc.params = LstmParams::from_json(j.at("params").dump());
  fc.feature_scaler.mean = j.at("feature_scaler").at("mean").get<std::vector<double>>();
  fc.feature_scaler.stdev = j.at("feature_scaler").at("stdev").get<std::vector<double>>();
  fc.target_mean = j.at("target_scaler").at("mean").get<double>();
  fc.target_stdev = j.at("target_scaler").at("stdev").get<double>();
  const auto& cfg = j.at("config");
  fc.config.hidden_size = cfg.at("hidden_size").get<std::size_t>();
  fc.config.learning_rate = cfg.at("learning_rate").get<double>();
  fc.config.epochs = cfg.at("epochs").get<std::size_t>();
  fc.config.clip_norm = cfg.at("clip_norm").get<double>();
  fc.config.seed = cfg.at("seed").get<std::uint64_t>();
  fc.loss_history = j.value("loss_history", std::vector<double>{});
  if (fc.feature_scaler.mean.size() != fc.ticker_count)
    throw DataError("lstm model: scaler dimension mismatch");
  return fc;
}

ComparisonConfig ComparisonConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("comparison config: bad JSON: ") + e.what());
  }

  ComparisonConfig cfg;
  if (!j.contains("tickers") || !j.at("tickers").is_array())
    throw DataError("comparison config: 'tickers' must be a file list");
  for (const auto& f : j.at("tickers"))
    cfg.ticker_files.emplace_back(f.get<std::string>());
  cfg.target_ticker = j.at("target").get<std::string>();
  cfg.lag = j.value("lag", std::size_t{10});
  if (j.contains("horizons"))
    cfg.horizons = j.at("horizons").get<std::vector<std::size_t>>();
  // "modes": [...] runs a grid; a single "mode" string also works, and
  // "raw" is an alias for "original"
  if (j.contains("modes"))
    cfg.modes = j.at("modes").get<std::vector<std::string>>();
  else if (j.contains("mode"))
    cfg.modes = {j.at("mode").get<std::string>()};
  for (auto& mode : cfg.modes)
    if (mode == "raw") mode = "original";
  cfg.model = j.value("model", std::string("svr"));
  if (j.contains("kernels"))
    cfg.kernels = j.at("kernels").get<std::vector<std::string>>();
  cfg.train_fraction = j.value("train_fraction", 0.8);
  cfg.seed = j.value("seed", std::uint64_t{42});
  cfg.denoise_levels = j.value("levels", std::size_t{1});
  if (j.contains("svr")) {
    const auto& s = j.at("svr");
    cfg.svr.c = s.value("c", 1.0);
    if (s.contains("epsilon") && !s.at("epsilon").is_null())
      cfg.svr.epsilon = s.at("epsilon").get<double>();
    cfg.svr.tolerance = s.value("tolerance", 1e-3);
    cfg.svr.max_iterations = s.value("max_iterations", std::size_t{100000});
  }
  if (j.contains("lstm")) {
    const auto& s = j.at("lstm");
    cfg.lstm.hidden_size = s.value("hidden_size", std::size_t{8});
    cfg.lstm.learning_rate = s.value("learning_rate", 0.01);
    cfg.lstm.epochs = s.value("epochs", std::size_t{100});
    cfg.lstm.clip_norm = s.value("clip_norm", 1.0);
  }
  return cfg;
}

void ComparisonConfig::validate() const {
  if (ticker_files.empty())
    throw DataError("comparison config: no ticker files");
  if (target_ticker.empty())
    throw DataError("comparison config: no target ticker");
  if (lag == 0) throw DataError("comparison config: lag must be at least 1");
  if (horizons.empty())
    throw DataError("comparison config: horizons must be non-empty");
  for (std::size_t h : horizons)
    if (h == 0) throw DataError("comparison config: horizons must be positive");
  if (modes.empty()) throw DataError("comparison config: no modes");
  for (const auto& m : modes)
    if (m != "original" && m != "wavelet")
      throw DataError("comparison config: unknown mode '" + m + "'");
  if (model != "svr" && model != "lstm")
    throw DataError("comparison config: unknown model '" + model + "'");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("comparison config: train_fraction must be in (0, 1)");
  if (denoise_levels == 0)
    throw DataError("comparison config: levels must be at least 1");
  for (const auto& k : kernels) kernel_preset(k, 1);  // name check
}

namespace {

struct GridJob {
  std::string mode;
  std::string kernel;  // empty for lstm
};

}  // namespace

EvalReport run_comparison(const ComparisonConfig& config) {
  config.validate();

  std::vector<PriceSeries> series;
  series.reserve(config.ticker_files.size());
  for (const auto& path : config.ticker_files)
    series.push_back(load_price_csv(path));
  const PriceTable table = select_pow4_window(align_tables(series));
  const std::size_t target_col = table.ticker_index(config.target_ticker);
  const std::size_t m = table.tickers.size();

  std::string canon;
  for (const auto& d : table.dates) canon += d + ";";
  for (double v : table.closes.data()) canon += format_double(v) + ",";
  char fp[24];
  std::snprintf(fp, sizeof(fp), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));

  const SupervisedSet supervised = make_supervised(table, config.lag, 1,
                                                   config.target_ticker);
  auto [train_raw, test_raw] = chrono_split(supervised, config.train_fraction);
  const std::size_t n_train = train_raw.size();
  const std::size_t n_test = test_raw.size();

  for (std::size_t h : config.horizons)
    if (h > n_train)
      throw DataError("comparison: horizon " + std::to_string(h) +
                      " exceeds the train split (" + std::to_string(n_train) +
                      " samples)");

  EvalReport report;
  report.seed = config.seed;
  report.train_fraction = config.train_fraction;
  report.lag = config.lag;
  report.rows = table.rows();
  report.train_samples = n_train;
  report.test_samples = n_test;
  report.target_ticker = config.target_ticker;
  report.tickers = table.tickers;
  report.data_fingerprint = fp;

  // wavelet mode: denoise each column of the aligned window once; the
  // denoised values feed training samples only, every test-side feature
  // and target stays raw
  SupervisedSet train_wavelet;
  const bool wants_wavelet =
      std::find(config.modes.begin(), config.modes.end(), "wavelet") !=
      config.modes.end();
  if (wants_wavelet) {
    PriceTable denoised = table;
    const FilterBank bank = default_filter_bank();
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<double> column(table.rows());
      for (std::size_t r = 0; r < table.rows(); ++r) column[r] = table.closes(r, c);
      DenoiseResult res = denoise_signal(bank, column, config.denoise_levels);
      for (std::size_t r = 0; r < table.rows(); ++r)
        denoised.closes(r, c) = res.signal[r];
    }
    const SupervisedSet sup_den = make_supervised(denoised, config.lag, 1,
                                                  config.target_ticker);
    train_wavelet = chrono_split(sup_den, config.train_fraction).first;
  }

  std::vector<GridJob> jobs;
  for (const auto& mode : config.modes) {
    if (config.model == "svr") {
      const auto& kernels =
          config.kernels.empty() ? kernel_preset_names() : config.kernels;
      for (const auto& k : kernels) jobs.push_back({mode, k});
    } else {
      jobs.push_back({mode, ""});
    }
  }

  for (const auto& job : jobs) {
    const SupervisedSet& train =
        job.mode == "wavelet" ? train_wavelet : train_raw;

    OneStepPredictor predictor;
    std::string train_error;
    SvrModel svr_model;
    LstmForecaster lstm_model;
    try {
      if (config.model == "svr") {
        const KernelSpec spec = kernel_preset(job.kernel, train.features.cols());
        svr_model = train_svr(train.features, train.targets, spec, config.svr);
        predictor = [&svr_model](std::span<const double> f) {
          return svr_predict(svr_model, f);
        };
      } else {
        LstmTrainConfig cfg = config.lstm;
        Rng mix(config.seed ^ fnv1a64(job.mode + "/" + config.model + "/" + job.kernel));
        cfg.seed = mix.next_u64();
        lstm_model = train_lstm_forecaster(train, cfg);
        predictor = [&lstm_model](std::span<const double> f) {
          return lstm_model.predict(f);
        };
      }
    } catch (const Error& e) {
      train_error = e.what();
    }

    for (std::size_t horizon : config.horizons) {
      EvalCell cell;
      cell.mode = job.mode;
      cell.model = config.model;
      cell.kernel = job.kernel;
      cell.horizon = horizon;
      cell.n_test = n_test;
      if (!train_error.empty()) {
        cell.error = train_error;
        report.cells.push_back(std::move(cell));
        continue;
      }
      try {
        std::vector<double> predictions(n_test);
        for (std::size_t k = 0; k < n_test; ++k) {
          // test sample k targets day d; forecast it from the window of
          // observed (raw) data ending h days earlier
          const std::size_t d = n_train + k + config.lag;
          const std::size_t first = d - horizon - config.lag + 1;
          Matrix window(config.lag, m);
          for (std::size_t r = 0; r < config.lag; ++r)
            for (std::size_t c = 0; c < m; ++c)
              window(r, c) = table.closes(first + r, c);
          predictions[k] =
              recursive_forecast(predictor, std::move(window), target_col, horizon)
                  .back();
          if (!std::isfinite(predictions[k]))
            throw DataError("forecast diverged: non-finite prediction for " +
                            test_raw.target_dates[k]);
        }
        cell.rmse = rmse(predictions, test_raw.targets);
        cell.mae = mae(predictions, test_raw.targets);
        cell.r_squared = r_squared(predictions, test_raw.targets);
        if (config.keep_series) {
          cell.dates = test_raw.target_dates;
          cell.predicted = predictions;
          cell.actual = test_raw.targets;
        }
      } catch (const Error& e) {
        cell.error = e.what();
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string EvalReport::to_json() const {
  ordered_json meta;
  meta["seed"] = seed;
  meta["train_fraction"] = train_fraction;
  meta["lag"] = lag;
  meta["rows"] = rows;
  meta["train_samples"] = train_samples;
  meta["test_samples"] = test_samples;
  meta["target_ticker"] = target_ticker;
  meta["tickers"] = tickers;
  meta["data_fingerprint"] = data_fingerprint;

  ordered_json cell_array = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json jc;
    jc["mode"] = c.mode;
    jc["model"] = c.model;
    jc["kernel"] = c.kernel;
    jc["horizon"] = c.horizon;
    if (c.ok()) {
      jc["rmse"] = c.rmse;
      jc["mae"] = c.mae;
      jc["r_squared"] = c.r_squared;
    }
    jc["n_test"] = c.n_test;
    jc["error"] = c.error;
    if (!c.predicted.empty()) {
      jc["dates"] = c.dates;
      jc["predicted"] = c.predicted;
      jc["actual"] = c.actual;
    }
    cell_array.push_back(std::move(jc));
  }

  ordered_json j;
  j["metadata"] = std::move(meta);
  j["cells"] = std::move(cell_array);
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::string out = "mode,model,kernel,horizon,rmse,mae,r_squared,n_test,error\n";
  for (const auto& c : cells) {
    out += c.mode + "," + c.model + "," + c.kernel + "," + std::to_string(c.horizon) + ",";
    if (c.ok())
      out += format_double(c.rmse) + "," + format_double(c.mae) + "," +
             format_double(c.r_squared);
    else
      out += ",,";
    out += "," + std::to_string(c.n_test) + "," + csv_escape(c.error) + "\n";
  }
  return out;
}

}  // namespace wavecast
