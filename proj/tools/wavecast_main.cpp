// wavecast command line: transform, denoise, train, forecast, compare.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavecast/dataset.hpp"
#include "wavecast/denoise.hpp"
#include "wavecast/errors.hpp"
#include "wavecast/evaluate.hpp"
#include "wavecast/filter_bank.hpp"
#include "wavecast/lstm.hpp"
#include "wavecast/svr.hpp"
#include "wavecast/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wavecast;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A signal file is either a date,close table or plain one-value-per-line
// text ('#' lines are comments). Output mirrors the input format.
struct SignalFile {
  std::vector<double> values;
  std::vector<std::string> dates;  // empty for plain files
};

SignalFile read_signal(const fs::path& path) {
  std::ifstream probe(path);
  if (!probe) throw DataError("cannot open " + path.string());
  std::string first;
  do {
    if (!std::getline(probe, first)) throw DataError(path.string() + ": empty file");
  } while (first.empty());
  probe.close();

  SignalFile sig;
  if (first.rfind("date,close", 0) == 0) {
    PriceSeries series = load_price_csv(path);
    sig.values = std::move(series.closes);
    sig.dates = std::move(series.dates);
    return sig;
  }

  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (end == line.c_str() || (*end != '\0' && *end != '\r'))
      throw DataError(path.string() + ": line " + std::to_string(lineno) +
                      ": unparsable value '" + line + "'");
    sig.values.push_back(v);
  }
  if (sig.values.empty()) throw DataError(path.string() + ": no values");
  return sig;
}

std::string render_signal(const SignalFile& shape, const std::vector<double>& values) {
  std::string out;
  if (!shape.dates.empty()) {
    out += "date,close\n";
    for (std::size_t i = 0; i < values.size(); ++i)
      out += shape.dates[i] + "," + format_double(values[i]) + "\n";
  } else {
    for (double v : values) out += format_double(v) + "\n";
  }
  return out;
}

SupervisedSet load_supervised(const std::vector<std::string>& inputs,
                              std::string target, std::size_t lag,
                              bool wavelet_mode, std::size_t levels) {
  std::vector<PriceSeries> series;
  for (const auto& f : inputs) series.push_back(load_price_csv(f));
  PriceTable table = select_pow4_window(align_tables(series));
  if (target.empty()) {
    if (table.tickers.size() != 1)
      throw DataError("multiple tickers given: --target is required");
    target = table.tickers[0];
  }
  if (wavelet_mode) {
    const FilterBank bank = default_filter_bank();
    for (std::size_t c = 0; c < table.tickers.size(); ++c) {
      std::vector<double> column(table.rows());
      for (std::size_t r = 0; r < table.rows(); ++r) column[r] = table.closes(r, c);
      DenoiseResult res = denoise_signal(bank, column, levels);
      for (std::size_t r = 0; r < table.rows(); ++r)
        table.closes(r, c) = res.signal[r];
    }
  }
  return make_supervised(table, lag, 1, target);
}

ordered_json window_metadata(const SupervisedSet& set) {
  return {{"lag", set.lag},
          {"ticker_count", set.ticker_count},
          {"target_ticker", set.target_ticker},
          {"target_column", set.target_column}};
}

int run_validate_bank(bool paper_verbatim, double tolerance) {
  const FilterBank fb =
      paper_verbatim ? paper_verbatim_filter_bank() : default_filter_bank();
  const ValidationReport report = validate_filter_bank(fb, tolerance);
  std::printf("filter bank: %s (tolerance %g)\n",
              paper_verbatim ? "paper-verbatim" : "default", tolerance);
  for (const auto& c : report.conditions)
    std::printf("%-24s residual=%.3e  %s\n", c.name.c_str(), c.residual,
                c.pass ? "PASS" : "FAIL");
  std::printf("max residual: %.3e  ->  %s\n", report.max_residual(),
              report.all_pass() ? "all conditions hold" : "conditions violated");
  return report.all_pass() ? 0 : 1;
}

int run_transform(const std::string& input, const std::string& out,
                  std::size_t levels, bool inverse) {
  const FilterBank bank = default_filter_bank();
  if (!inverse) {
    SignalFile sig = read_signal(input);
    MultilevelCoefficients coeffs = multilevel_transform(bank, sig.values, levels);
    std::string text = "# n=" + std::to_string(coeffs.signal_length) +
                       ", levels=" + std::to_string(coeffs.levels()) + "\n";
    for (double v : coeffs.flatten()) text += format_double(v) + "\n";
    write_text_atomic(out, text);
    return 0;
  }

  std::ifstream in(input);
  if (!in) throw DataError("cannot open " + input);
  std::string header;
  if (!std::getline(in, header)) throw DataError(input + ": empty file");
  std::size_t n = 0, file_levels = 0;
  if (std::sscanf(header.c_str(), "# n=%zu, levels=%zu", &n, &file_levels) != 2)
    throw DataError(input + ": missing '# n=..., levels=...' header");
  std::vector<double> flat;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    flat.push_back(std::strtod(line.c_str(), nullptr));
  }
  if (flat.size() != n)
    throw DataError(input + ": expected " + std::to_string(n) + " values, got " +
                    std::to_string(flat.size()));
  MultilevelCoefficients coeffs = MultilevelCoefficients::from_flat(flat, file_levels);
  std::vector<double> signal = inverse_multilevel(bank, coeffs);
  std::string text;
  for (double v : signal) text += format_double(v) + "\n";
  write_text_atomic(out, text);
  return 0;
}

int run_denoise(const std::string& input, const std::string& out,
                std::size_t levels, std::string plan_path) {
  SignalFile sig = read_signal(input);
  DenoiseResult res = denoise_signal(default_filter_bank(), sig.values, levels);

  ordered_json plan;
  plan["n"] = sig.values.size();
  plan["levels"] = levels;
  auto bands = ordered_json::array();
  for (const auto& b : res.plan.bands)
    bands.push_back({{"level", b.level},
                     {"band", b.band},
                     {"sigma", b.sigma},
                     {"lambda", b.lambda},
                     {"band_size", b.band_size},
                     {"zeroed", b.zeroed}});
  plan["bands"] = std::move(bands);

  if (plan_path.empty()) plan_path = out + ".plan.json";
  write_text_atomic(out, render_signal(sig, res.signal));
  write_text_atomic(plan_path, plan.dump(2) + "\n");
  return 0;
}

int run_train_svr(const std::vector<std::string>& inputs, const std::string& target,
                  std::size_t lag, const std::string& kernel, double c,
                  std::optional<double> epsilon, double tolerance,
                  std::size_t max_iterations, const std::string& mode,
                  std::size_t levels, const std::string& out) {
  SupervisedSet set = load_supervised(inputs, target, lag, mode == "wavelet", levels);
  SvrHyperParams hyper;
  hyper.c = c;
  hyper.epsilon = epsilon;
  hyper.tolerance = tolerance;
  hyper.max_iterations = max_iterations;
  const KernelSpec spec = kernel_preset(kernel, set.features.cols());
  SvrModel model = train_svr(set.features, set.targets, spec, hyper);
  if (!model.converged)
    std::cerr << "warning: solver hit the iteration cap before reaching tolerance\n";

  ordered_json doc = ordered_json::parse(model.to_json());
  doc["window"] = window_metadata(set);
  write_text_atomic(out, doc.dump(2) + "\n");
  return 0;
}

int run_train_lstm(const std::vector<std::string>& inputs, const std::string& target,
                   std::size_t lag, const LstmTrainConfig& config,
                   const std::string& mode, std::size_t levels,
                   const std::string& out, const std::string& loss_out) {
  SupervisedSet set = load_supervised(inputs, target, lag, mode == "wavelet", levels);
  LstmForecaster model = train_lstm_forecaster(set, config);

  ordered_json doc = ordered_json::parse(model.to_json());
  doc["window"] = window_metadata(set);
  write_text_atomic(out, doc.dump(2) + "\n");
  if (!loss_out.empty()) {
    std::string csv = "epoch,mse\n";
    for (std::size_t e = 0; e < model.loss_history.size(); ++e)
      csv += std::to_string(e) + "," + format_double(model.loss_history[e]) + "\n";
    write_text_atomic(loss_out, csv);
  }
  return 0;
}

int run_forecast(const std::string& model_path, const std::vector<std::string>& inputs,
                 std::size_t horizon, const std::string& out) {
  const std::string text = read_text(model_path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(model_path + ": bad JSON: " + std::string(e.what()));
  }
  if (!doc.contains("window"))
    throw DataError(model_path + ": missing window metadata");
  const std::size_t lag = doc["window"].at("lag").get<std::size_t>();
  const std::string target = doc["window"].at("target_ticker").get<std::string>();
  const std::string kind = doc.value("model_type", "");

  std::vector<PriceSeries> series;
  for (const auto& f : inputs) series.push_back(load_price_csv(f));
  PriceTable table = align_tables(series);
  const std::size_t target_col = table.ticker_index(target);
  const std::size_t m = table.tickers.size();
  if (table.rows() < lag)
    throw DataError("forecast: need at least " + std::to_string(lag) + " rows");

  Matrix window(lag, m);
  for (std::size_t r = 0; r < lag; ++r)
    for (std::size_t c = 0; c < m; ++c)
      window(r, c) = table.closes(table.rows() - lag + r, c);

  OneStepPredictor predictor;
  SvrModel svr_model;
  LstmForecaster lstm_model;
  if (kind == "svr") {
    svr_model = SvrModel::from_json(text);
    predictor = [&](std::span<const double> f) { return svr_predict(svr_model, f); };
  } else if (kind == "lstm") {
    lstm_model = LstmForecaster::from_json(text);
    predictor = [&](std::span<const double> f) { return lstm_model.predict(f); };
  } else {
    throw DataError(model_path + ": unknown model_type '" + kind + "'");
  }

  const std::vector<double> preds =
      recursive_forecast(predictor, std::move(window), target_col, horizon);
  std::string csv = "step,prediction\n";
  for (std::size_t i = 0; i < preds.size(); ++i)
    csv += std::to_string(i + 1) + "," + format_double(preds[i]) + "\n";
  if (out.empty())
    std::cout << csv;
  else
    write_text_atomic(out, csv);
  return 0;
}

int run_compare(const std::string& config_path, const std::string& out,
                const std::string& csv_out, const std::string& plot_dir,
                std::optional<std::uint64_t> seed,
                std::optional<std::size_t> levels) {
  ComparisonConfig config = ComparisonConfig::from_json(read_text(config_path));
  // paths in the config are relative to the config file
  const fs::path base = fs::path(config_path).parent_path();
  for (auto& p : config.ticker_files)
    if (p.is_relative()) p = base / p;
  if (seed) config.seed = *seed;
  if (levels) config.denoise_levels = *levels;
  if (!plot_dir.empty()) config.keep_series = true;

  EvalReport report = run_comparison(config);

  if (!plot_dir.empty()) {
    fs::create_directories(plot_dir);
    for (auto& cell : report.cells) {
      if (!cell.ok() || cell.predicted.empty()) continue;
      std::string name = cell.mode + "_" + cell.model;
      if (!cell.kernel.empty()) name += "_" + cell.kernel;
      name += "_h" + std::to_string(cell.horizon) + ".csv";
      std::string csv = "date,actual,predicted\n";
      for (std::size_t i = 0; i < cell.predicted.size(); ++i)
        csv += cell.dates[i] + "," + format_double(cell.actual[i]) + "," +
               format_double(cell.predicted[i]) + "\n";
      write_text_atomic(fs::path(plot_dir) / name, csv);
      // keep the report JSON itself free of bulky series
      cell.dates.clear();
      cell.predicted.clear();
      cell.actual.clear();
    }
  }

  const std::string json_text = report.to_json() + "\n";
  if (out.empty())
    std::cout << json_text;
  else
    write_text_atomic(out, json_text);
  if (!csv_out.empty()) write_text_atomic(csv_out, report.to_csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4-band wavelet denoising and SVR/LSTM price forecasting"};
  app.require_subcommand(1);
  int exit_code = 0;

  // validate-bank
  auto* sc_validate = app.add_subcommand(
      "validate-bank", "Report every filter-bank condition with residuals");
  bool paper_verbatim = false;
  double tolerance = 1e-9;
  sc_validate->add_flag("--paper-verbatim", paper_verbatim,
                        "Use the verbatim printed coefficients (defective gamma)");
  sc_validate->add_option("--tolerance", tolerance, "Residual tolerance")
      ->check(CLI::PositiveNumber);
  sc_validate->callback(
      [&] { exit_code = run_validate_bank(paper_verbatim, tolerance); });

  // transform
  auto* sc_transform =
      app.add_subcommand("transform", "Wavelet-transform a signal (or invert)");
  std::string t_input, t_out;
  std::size_t t_levels = 1;
  bool t_inverse = false;
  sc_transform->add_option("--input", t_input, "Signal or coefficient CSV")->required();
  sc_transform->add_option("--out", t_out, "Output path")->required();
  sc_transform->add_option("--levels", t_levels, "Decomposition depth")
      ->check(CLI::PositiveNumber);
  sc_transform->add_flag("--inverse", t_inverse, "Reconstruct from coefficients");
  sc_transform->callback(
      [&] { exit_code = run_transform(t_input, t_out, t_levels, t_inverse); });

  // denoise
  auto* sc_denoise = app.add_subcommand(
      "denoise", "Universal-threshold denoising of a signal");
  std::string d_input, d_out, d_plan;
  std::size_t d_levels = 1;
  sc_denoise->add_option("--input", d_input, "Signal CSV")->required();
  sc_denoise->add_option("--out", d_out, "Denoised output CSV")->required();
  sc_denoise->add_option("--levels", d_levels, "Decomposition depth")
      ->check(CLI::PositiveNumber);
  sc_denoise->add_option("--plan", d_plan,
                         "Threshold plan JSON path (default <out>.plan.json)");
  sc_denoise->callback(
      [&] { exit_code = run_denoise(d_input, d_out, d_levels, d_plan); });

  // train-svr
  auto* sc_svr = app.add_subcommand("train-svr", "Train an epsilon-SVR model");
  std::vector<std::string> s_inputs;
  std::string s_target, s_kernel = "linear", s_mode = "original", s_out;
  std::size_t s_lag = 10, s_levels = 1, s_max_iter = 100000;
  double s_c = 1.0, s_tol = 1e-3;
  std::optional<double> s_epsilon;
  double s_epsilon_raw = -1.0;
  sc_svr->add_option("--input", s_inputs, "Ticker CSVs (repeatable)")->required();
  sc_svr->add_option("--target", s_target, "Target ticker (default: single input)");
  sc_svr->add_option("--lag", s_lag, "History window, days")->check(CLI::PositiveNumber);
  sc_svr->add_option("--kernel", s_kernel, "Kernel preset")
      ->check(CLI::IsMember(kernel_preset_names()));
  sc_svr->add_option("--c", s_c, "Box constraint C")->check(CLI::PositiveNumber);
  sc_svr->add_option("--epsilon", s_epsilon_raw,
                     "Tube half-width (default 0.1*stdev(y))");
  sc_svr->add_option("--tolerance", s_tol, "KKT tolerance")->check(CLI::PositiveNumber);
  sc_svr->add_option("--max-iterations", s_max_iter, "Pair-update cap")
      ->check(CLI::PositiveNumber);
  sc_svr->add_option("--mode", s_mode, "original | wavelet")
      ->check(CLI::IsMember({"original", "raw", "wavelet"}));
  sc_svr->add_option("--levels", s_levels, "Denoise depth (wavelet mode)")
      ->check(CLI::PositiveNumber);
  sc_svr->add_option("--out", s_out, "Model JSON path")->required();
  sc_svr->callback([&] {
    if (sc_svr->count("--epsilon")) s_epsilon = s_epsilon_raw;
    exit_code = run_train_svr(s_inputs, s_target, s_lag, s_kernel, s_c, s_epsilon,
                              s_tol, s_max_iter, s_mode, s_levels, s_out);
  });

  // train-lstm
  auto* sc_lstm = app.add_subcommand("train-lstm", "Train an LSTM forecaster");
  std::vector<std::string> l_inputs;
  std::string l_target, l_mode = "original", l_out, l_loss;
  std::size_t l_lag = 10, l_levels = 1;
  LstmTrainConfig l_config;
  sc_lstm->add_option("--input", l_inputs, "Ticker CSVs (repeatable)")->required();
  sc_lstm->add_option("--target", l_target, "Target ticker (default: single input)");
  sc_lstm->add_option("--lag", l_lag, "History window, days")->check(CLI::PositiveNumber);
  sc_lstm->add_option("--hidden", l_config.hidden_size, "Hidden size")
      ->check(CLI::PositiveNumber);
  sc_lstm->add_option("--epochs", l_config.epochs, "Training epochs");
  sc_lstm->add_option("--learning-rate", l_config.learning_rate, "Adam step size")
      ->check(CLI::PositiveNumber);
  sc_lstm->add_option("--clip-norm", l_config.clip_norm,
                      "Gradient-norm clip (<= 0 disables)");
  sc_lstm->add_option("--seed", l_config.seed, "Initialization/shuffle seed");
  sc_lstm->add_option("--mode", l_mode, "original | wavelet")
      ->check(CLI::IsMember({"original", "raw", "wavelet"}));
  sc_lstm->add_option("--levels", l_levels, "Denoise depth (wavelet mode)")
      ->check(CLI::PositiveNumber);
  sc_lstm->add_option("--out", l_out, "Model JSON path")->required();
  sc_lstm->add_option("--loss-history", l_loss, "Per-epoch loss CSV path");
  sc_lstm->callback([&] {
    exit_code = run_train_lstm(l_inputs, l_target, l_lag, l_config, l_mode,
                               l_levels, l_out, l_loss);
  });

  // forecast
  auto* sc_forecast =
      app.add_subcommand("forecast", "Recursive multi-step forecast");
  std::string f_model, f_out;
  std::vector<std::string> f_inputs;
  std::size_t f_horizon = 1;
  sc_forecast->add_option("--model", f_model, "Model JSON from train-svr/train-lstm")
      ->required();
  sc_forecast->add_option("--input", f_inputs, "Ticker CSVs (repeatable)")->required();
  sc_forecast->add_option("--horizon", f_horizon, "Steps ahead")
      ->check(CLI::PositiveNumber);
  sc_forecast->add_option("--out", f_out, "Predictions CSV (default stdout)");
  sc_forecast->callback(
      [&] { exit_code = run_forecast(f_model, f_inputs, f_horizon, f_out); });

  // compare
  auto* sc_compare = app.add_subcommand(
      "compare", "Raw-vs-denoised forecast comparison grid");
  std::string c_config, c_out, c_csv, c_plots;
  std::optional<std::uint64_t> c_seed;
  std::optional<std::size_t> c_levels;
  sc_compare->add_option("--config", c_config, "Comparison config JSON")->required();
  sc_compare->add_option("--out", c_out, "Report JSON path (default stdout)");
  sc_compare->add_option("--csv", c_csv, "Report CSV path");
  sc_compare->add_option("--emit-plot-data", c_plots,
                         "Directory for per-cell predicted-vs-actual CSVs");
  sc_compare->add_option("--seed", c_seed, "Override the config seed");
  sc_compare->add_option("--levels", c_levels, "Override the denoise depth")
      ->check(CLI::PositiveNumber);
  sc_compare->callback([&] {
    exit_code = run_compare(c_config, c_out, c_csv, c_plots, c_seed, c_levels);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return exit_code;
}
