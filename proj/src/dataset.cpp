#include "wavecast/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "wavecast/errors.hpp"

namespace wavecast {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int year = std::stoi(s.substr(0, 4));
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  if (month < 1 || month > 12 || day < 1) return false;
  static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int limit = days[month - 1];
  if (month == 2 && is_leap(year)) limit = 29;
  return day <= limit;
}

double parse_close(const std::string& field, const std::string& where) {
  const std::string t = trim(field);
  if (t.empty()) throw DataError(where + ": empty close value");
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + t.size())
    throw DataError(where + ": unparsable close value '" + t + "'");
  if (!std::isfinite(v)) throw DataError(where + ": non-finite close value");
  if (v <= 0.0) throw DataError(where + ": close value must be positive");
  return v;
}

}  // namespace

std::size_t PriceTable::ticker_index(const std::string& ticker) const {
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (tickers[i] == ticker) return i;
  throw DataError("unknown ticker: " + ticker);
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  PriceSeries series;
  series.ticker = path.stem().string();

  std::string line;
  if (!std::getline(in, line))
    throw DataError(path.string() + ": empty file");
  if (trim(line) != "date,close")
    throw DataError(path.string() + ": header must be 'date,close'");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::string where = path.string() + ": row " + std::to_string(row);
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(where + ": missing close column");
    if (line.find(',', comma + 1) != std::string::npos)
      throw DataError(where + ": extra columns");
    const std::string date = trim(line.substr(0, comma));
    if (!valid_iso_date(date))
      throw DataError(where + ": unparsable date '" + date + "'");
    if (!series.dates.empty()) {
      if (date == series.dates.back())
        throw DataError(where + ": duplicate date " + date);
      if (date < series.dates.back())
        throw DataError(where + ": out-of-order date " + date);
    }
    series.dates.push_back(date);
    series.closes.push_back(parse_close(line.substr(comma + 1), where));
  }
  if (series.dates.empty())
    throw DataError(path.string() + ": no data rows");
  return series;
}

PriceTable align_tables(const std::vector<PriceSeries>& series) {
  if (series.empty()) throw DataError("align_tables: no series");

  std::vector<std::string> common = series[0].dates;
  for (std::size_t s = 1; s < series.size(); ++s) {
    std::vector<std::string> next;
    std::set_intersection(common.begin(), common.end(), series[s].dates.begin(),
                          series[s].dates.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty())
    throw DataError("align_tables: no date present in every series");

  PriceTable table;
  table.dates = common;
  table.closes = Matrix(common.size(), series.size());
  for (std::size_t s = 0; s < series.size(); ++s) {
    table.tickers.push_back(series[s].ticker);
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < common.size(); ++r) {
      while (series[s].dates[cursor] != common[r]) ++cursor;
      table.closes(r, s) = series[s].closes[cursor];
    }
  }
  return table;
}

PriceTable select_pow4_window(const PriceTable& table) {
  const std::size_t rows = table.rows();
  if (rows < 16)
    throw DataError("select_pow4_window: need at least 16 rows, got " +
                    std::to_string(rows));
  std::size_t keep = 16;
  while (keep * 4 <= rows) keep *= 4;

  PriceTable out;
  out.tickers = table.tickers;
  const std::size_t offset = rows - keep;
  out.dates.assign(table.dates.begin() + offset, table.dates.end());
  out.closes = Matrix(keep, table.tickers.size());
  for (std::size_t r = 0; r < keep; ++r)
    for (std::size_t c = 0; c < table.tickers.size(); ++c)
      out.closes(r, c) = table.closes(offset + r, c);
  return out;
}

SupervisedSet make_supervised(const PriceTable& table, std::size_t lag,
                              std::size_t horizon, const std::string& target_ticker) {
  if (lag == 0) throw DataError("make_supervised: lag must be at least 1");
  if (horizon == 0) throw DataError("make_supervised: horizon must be at least 1");
  const std::size_t rows = table.rows();
  if (rows < lag + horizon)
    throw DataError("make_supervised: need at least " +
                    std::to_string(lag + horizon) + " rows, got " +
                    std::to_string(rows));

  SupervisedSet set;
  set.lag = lag;
  set.horizon = horizon;
  set.ticker_count = table.tickers.size();
  set.target_ticker = target_ticker;
  set.target_column = table.ticker_index(target_ticker);

  const std::size_t n = rows - lag - horizon + 1;
  const std::size_t m = table.tickers.size();
  set.features = Matrix(n, lag * m);
  set.targets.resize(n);
  set.target_dates.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t day = 0; day < lag; ++day)
      for (std::size_t c = 0; c < m; ++c)
        set.features(t, day * m + c) = table.closes(t + day, c);
    const std::size_t target_row = t + lag - 1 + horizon;
    set.targets[t] = table.closes(target_row, set.target_column);
    set.target_dates[t] = table.dates[target_row];
  }
  return set;
}

std::pair<SupervisedSet, SupervisedSet> chrono_split(const SupervisedSet& set,
                                                     double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("chrono_split: fraction must be in (0, 1)");
  const std::size_t n = set.size();
  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n)
    throw DataError("chrono_split: a side of the split is empty");

  auto slice = [&](std::size_t begin, std::size_t count) {
    SupervisedSet out;
    out.lag = set.lag;
    out.horizon = set.horizon;
    out.ticker_count = set.ticker_count;
    out.target_column = set.target_column;
    out.target_ticker = set.target_ticker;
    out.features = Matrix(count, set.features.cols());
    out.targets.assign(set.targets.begin() + begin,
                       set.targets.begin() + begin + count);
    out.target_dates.assign(set.target_dates.begin() + begin,
                            set.target_dates.begin() + begin + count);
    for (std::size_t r = 0; r < count; ++r) {
      auto src = set.features.row(begin + r);
      std::copy(src.begin(), src.end(), out.features.row(r).begin());
    }
    return out;
  };
  return {slice(0, n_train), slice(n_train, n - n_train)};
}

}  // namespace wavecast
