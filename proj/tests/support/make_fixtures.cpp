// Writes the committed test fixtures. Run with the target directory as the
// only argument; the fixture-integrity unit test keeps the committed files
// in sync with this generator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"

namespace fs = std::filesystem;
namespace t = wavecast::testing;

namespace {

void write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  std::printf("wrote %s\n", path.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <fixture-dir>\n", argv[0]);
    return 2;
  }
  const fs::path dir = argv[1];

  // the committed synthetic dataset: sine + linear trend + N(0, 0.5), 256
  // samples, seed 42
  const auto dates_256 = t::sequential_dates("2020-01-02", 256);
  write(dir / "AAA.csv",
        t::price_csv_text(dates_256, t::synthetic_closes(256, 42)));

  // a second, longer ticker to exercise alignment and the 4^k window
  const auto dates_300 = t::sequential_dates("2019-11-19", 300);
  write(dir / "BBB.csv",
        t::price_csv_text(dates_300, t::synthetic_closes(300, 43)));

  // plain one-value-per-line signal, 256 rows
  {
    const auto values = t::synthetic_closes(256, 4242, 10.0, 0.0, 3.0, 32.0, 0.4);
    std::string text;
    char buf[32];
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      text += std::string(buf) + "\n";
    }
    write(dir / "signal_256.csv", text);
  }

  write(dir / "compare_small.json", R"({
  "tickers": ["AAA.csv"],
  "target": "AAA",
  "lag": 5,
  "horizons": [1, 2],
  "modes": ["original", "wavelet"],
  "model": "svr",
  "kernels": ["linear"],
  "train_fraction": 0.8,
  "seed": 42
}
)");

  write(dir / "compare_full.json", R"({
  "tickers": ["AAA.csv"],
  "target": "AAA",
  "lag": 10,
  "horizons": [1, 5, 13, 21],
  "modes": ["original", "wavelet"],
  "model": "svr",
  "train_fraction": 0.8,
  "seed": 42
}
)");

  // failure fixtures
  write(dir / "bad" / "bad_header.csv", "close,date\n10,2020-01-01\n");
  write(dir / "bad" / "unsorted.csv",
        "date,close\n2020-01-02,10\n2020-01-01,11\n");
  write(dir / "bad" / "nan_close.csv", "date,close\n2020-01-01,NaN\n");
  write(dir / "bad" / "short_signal.csv", "1\n2\n3\n4\n5\n");
  return 0;
}
