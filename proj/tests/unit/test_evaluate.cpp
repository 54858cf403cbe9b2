#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wavecast/errors.hpp"
#include "wavecast/evaluate.hpp"

using namespace wavecast;
namespace t = wavecast::testing;
namespace fs = std::filesystem;

TEST_CASE("metric hand values") {
  const std::vector<double> same{1, 2, 3};
  CHECK(rmse(same, same) == 0.0);
  CHECK(mae(same, same) == 0.0);
  CHECK(r_squared(same, same) == 1.0);

  const std::vector<double> zeros{0, 0}, actual{3, 4};
  CHECK(rmse(zeros, actual) == doctest::Approx(3.53553).epsilon(1e-5));
  CHECK(mae(zeros, actual) == doctest::Approx(3.5));
}

TEST_CASE("metric errors") {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  CHECK_THROWS_AS(rmse(a, b), ShapeError);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), ShapeError);
  CHECK_THROWS_AS(r_squared(a, std::vector<double>{2, 2}), MetricError);
}

TEST_CASE("metrics are invariant under a constant shift of both series") {
  const std::vector<double> pred{1.0, 2.5, 0.5, 4.0};
  const std::vector<double> actual{1.2, 2.0, 1.0, 3.5};
  std::vector<double> pred_c = pred, actual_c = actual;
  for (double& v : pred_c) v += 17.0;
  for (double& v : actual_c) v += 17.0;
  CHECK(rmse(pred_c, actual_c) == doctest::Approx(rmse(pred, actual)).epsilon(1e-12));
  CHECK(mae(pred_c, actual_c) == doctest::Approx(mae(pred, actual)).epsilon(1e-12));
  // R^2 is also shift-invariant: residuals and centered totals are unchanged
  CHECK(r_squared(pred_c, actual_c) ==
        doctest::Approx(r_squared(pred, actual)).epsilon(1e-9));

  // rmse^2 * n = sum of squared residuals
  const double r = rmse(pred, actual);
  double ss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    ss += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  CHECK(r * r * 4.0 == doctest::Approx(ss).epsilon(1e-12));
}

TEST_CASE("r_squared can be negative for bad fits") {
  const std::vector<double> pred{10, -10, 10};
  const std::vector<double> actual{1, 2, 3};
  CHECK(r_squared(pred, actual) < 0.0);
}

TEST_CASE("recursive forecast: horizon zero is empty") {
  Matrix window(2, 1, 1.0);
  const auto preds =
      recursive_forecast([](std::span<const double>) { return 9.9; }, window, 0, 0);
  CHECK(preds.empty());
}

TEST_CASE("recursive forecast: identity predictor repeats the last value") {
  Matrix window(3, 1);
  window(0, 0) = 1.0;
  window(1, 0) = 2.0;
  window(2, 0) = 7.0;
  const auto preds = recursive_forecast(
      [](std::span<const double> f) { return f.back(); }, window, 0, 4);
  CHECK(preds == std::vector<double>{7.0, 7.0, 7.0, 7.0});
}

TEST_CASE("recursive forecast: doubling predictor") {
  Matrix window(1, 1, 1.0);
  const auto preds = recursive_forecast(
      [](std::span<const double> f) { return 2.0 * f.back(); }, window, 0, 3);
  CHECK(preds == std::vector<double>{2.0, 4.0, 8.0});
}

TEST_CASE("recursive forecast freezes non-target columns") {
  Matrix window(2, 3);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      window(r, c) = 10.0 * static_cast<double>(r) + static_cast<double>(c);

  std::vector<std::vector<double>> seen;
  const auto preds = recursive_forecast(
      [&](std::span<const double> f) {
        seen.emplace_back(f.begin(), f.end());
        return 99.0;
      },
      window, 1, 2);
  REQUIRE(seen.size() == 2);
  // second call: rows slid up, new last row = old last row with column 1 predicted
  CHECK(seen[1] == std::vector<double>{10, 11, 12, 10, 99, 12});
  CHECK(preds == std::vector<double>{99.0, 99.0});
}

TEST_CASE("recursive composition: h1+h2 equals a continued run") {
  Matrix window(3, 2);
  {
    double x = 0.3;
    for (double& v : window.data()) v = (x = std::fmod(x * 7.77 + 0.1, 3.0));
  }
  auto predictor = [](std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += 0.3 * v;
    return acc;
  };
  const auto all = recursive_forecast(predictor, window, 0, 7);

  const auto first = recursive_forecast(predictor, window, 0, 3);
  Matrix continued = window;
  for (double p : first) {
    std::vector<double> next(continued.row(2).begin(), continued.row(2).end());
    next[0] = p;
    for (std::size_t r = 0; r + 1 < 3; ++r) {
      auto src = continued.row(r + 1);
      std::copy(src.begin(), src.end(), continued.row(r).begin());
    }
    std::copy(next.begin(), next.end(), continued.row(2).begin());
  }
  const auto rest = recursive_forecast(predictor, continued, 0, 4);

  std::vector<double> joined = first;
  joined.insert(joined.end(), rest.begin(), rest.end());
  REQUIRE(joined.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    CHECK(joined[i] == doctest::Approx(all[i]).epsilon(1e-12));
}

TEST_CASE("recursive forecast shape errors") {
  CHECK_THROWS_AS(
      recursive_forecast([](std::span<const double>) { return 0.0; }, Matrix(), 0, 1),
      ShapeError);
  CHECK_THROWS_AS(recursive_forecast([](std::span<const double>) { return 0.0; },
                                     Matrix(2, 2, 1.0), 5, 1),
                  ShapeError);
}

namespace {

struct FixtureDir {
  fs::path dir;
  fs::path config;

  FixtureDir() {
    dir = fs::temp_directory_path() / "wavecast_eval_test";
    fs::create_directories(dir);
    const auto dates = t::sequential_dates("2020-01-02", 256);
    {
      std::ofstream out(dir / "AAA.csv", std::ios::trunc);
      out << t::price_csv_text(dates, t::synthetic_closes(256, 42));
    }
    {
      std::ofstream out(dir / "BBB.csv", std::ios::trunc);
      out << t::price_csv_text(dates, t::synthetic_closes(256, 43));
    }
    config = dir / "config.json";
    std::ofstream out(config, std::ios::trunc);
    out << R"({
  "tickers": ["AAA.csv", "BBB.csv"],
  "target": "AAA",
  "lag": 5,
  "horizons": [1, 5],
  "modes": ["original", "wavelet"],
  "model": "svr",
  "kernels": ["linear", "medium-gaussian"],
  "train_fraction": 0.8,
  "seed": 42
})";
  }
};

}  // namespace

TEST_CASE("comparison grid: shape, determinism and metadata") {
  const FixtureDir fx;
  ComparisonConfig config;
  config.ticker_files = {fx.dir / "AAA.csv", fx.dir / "BBB.csv"};
  config.target_ticker = "AAA";
  config.lag = 5;
  config.horizons = {1, 5};
  config.kernels = {"linear", "medium-gaussian"};
  config.seed = 42;

  const EvalReport report = run_comparison(config);
  // 2 modes x 2 kernels x 2 horizons
  REQUIRE(report.cells.size() == 8);
  for (const auto& cell : report.cells) {
    CAPTURE(cell.kernel);
    CAPTURE(cell.mode);
    CHECK(cell.ok());
    CHECK(cell.rmse >= 0.0);
    CHECK(cell.mae >= 0.0);
    CHECK(cell.r_squared <= 1.0);
  }
  CHECK(report.rows == 256);
  CHECK(report.train_samples == 200);  // floor(0.8 * 251)
  CHECK(report.test_samples == 51);
  CHECK(report.data_fingerprint.size() == 16);

  const EvalReport again = run_comparison(config);
  CHECK(report.to_json() == again.to_json());
  CHECK(report.to_csv() == again.to_csv());
}

TEST_CASE("comparison config parses from JSON with defaults") {
  const FixtureDir fx;
  ComparisonConfig config = ComparisonConfig::from_json(
      R"({"tickers": ["AAA.csv"], "target": "AAA"})");
  CHECK(config.lag == 10);
  CHECK(config.horizons == std::vector<std::size_t>{1, 5, 13, 21});
  CHECK(config.modes == std::vector<std::string>{"original", "wavelet"});
  CHECK(config.model == "svr");
  CHECK(config.train_fraction == 0.8);
  CHECK(config.seed == 42);

  CHECK_THROWS_AS(ComparisonConfig::from_json("not json"), DataError);
  CHECK_THROWS_AS(ComparisonConfig::from_json(R"({"target": "A"})"), DataError);

  // a single "mode" string works, and "raw" aliases "original"
  const ComparisonConfig raw_mode = ComparisonConfig::from_json(
      R"({"tickers": ["AAA.csv"], "target": "AAA", "mode": "raw"})");
  CHECK(raw_mode.modes == std::vector<std::string>{"original"});
  const ComparisonConfig one_mode = ComparisonConfig::from_json(
      R"({"tickers": ["AAA.csv"], "target": "AAA", "mode": "wavelet"})");
  CHECK(one_mode.modes == std::vector<std::string>{"wavelet"});

  ComparisonConfig bad = config;
  bad.model = "forest";
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = config;
  bad.horizons = {};
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = config;
  bad.train_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("oversized horizons are rejected up front") {
  const FixtureDir fx;
  ComparisonConfig config;
  config.ticker_files = {fx.dir / "AAA.csv"};
  config.target_ticker = "AAA";
  config.lag = 5;
  config.horizons = {500};
  CHECK_THROWS_AS(run_comparison(config), DataError);
}

TEST_CASE("grid completeness: diverged cells stay present with an error record") {
  // cubic-kernel recursion on trending data overflows at long horizons;
  // the cell must remain in the grid with an explicit diagnostic
  const FixtureDir fx;
  ComparisonConfig config;
  config.ticker_files = {fx.dir / "AAA.csv"};
  config.target_ticker = "AAA";
  config.lag = 10;
  config.horizons = {13, 21};
  config.kernels = {"cubic"};
  config.modes = {"wavelet"};

  const EvalReport report = run_comparison(config);
  REQUIRE(report.cells.size() == 2);
  bool saw_divergence = false;
  for (const auto& cell : report.cells) {
    if (!cell.ok()) {
      saw_divergence = true;
      CHECK(cell.error.find("diverged") != std::string::npos);
    }
  }
  CHECK(saw_divergence);

  // error cells appear in both renderings
  const std::string json_text = report.to_json();
  CHECK(json_text.find("diverged") != std::string::npos);
  CHECK(report.to_csv().find("diverged") != std::string::npos);
  CHECK(json_text.find("null") == std::string::npos);  // no silent non-finites
}

TEST_CASE("lstm comparison cells complete") {
  const FixtureDir fx;
  ComparisonConfig config;
  config.ticker_files = {fx.dir / "AAA.csv"};
  config.target_ticker = "AAA";
  config.lag = 4;
  config.horizons = {1};
  config.model = "lstm";
  config.lstm.hidden_size = 4;
  config.lstm.epochs = 5;
  const EvalReport report = run_comparison(config);
  REQUIRE(report.cells.size() == 2);  // 2 modes x 1 horizon
  for (const auto& cell : report.cells) {
    CHECK(cell.ok());
    CHECK(cell.model == "lstm");
    CHECK(cell.rmse > 0.0);
  }
}

TEST_CASE("fnv1a64 fingerprints are stable") {
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
  CHECK(fnv1a64("abc") != fnv1a64("acb"));
}
