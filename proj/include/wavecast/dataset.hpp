#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wavecast/linalg.hpp"

namespace wavecast {

struct PriceSeries {
  std::string ticker;
  std::vector<std::string> dates;  // ISO-8601, strictly increasing
  std::vector<double> closes;
};

/// Date-aligned close prices: rows = dates (ascending), columns = tickers.
struct PriceTable {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Matrix closes;

  std::size_t rows() const { return dates.size(); }
  std::size_t ticker_index(const std::string& ticker) const;  // throws DataError
};

/// Reads a `date,close` CSV; the ticker symbol is the filename stem.
/// Rejects missing/extra columns, unparsable dates or numbers,
/// non-positive or non-finite prices, and duplicate or out-of-order dates
/// (errors name the offending row).
PriceSeries load_price_csv(const std::filesystem::path& path);

/// Inner-join on dates: only dates present in every series survive.
/// Column order = input order. Empty intersection is a DataError.
PriceTable align_tables(const std::vector<PriceSeries>& series);

/// Keeps the most recent 4^k rows for the largest k with 4^k <= rows.
PriceTable select_pow4_window(const PriceTable& table);

/// Supervised lag windows. Row t of `features` is the flattened closes of
/// days t..t+L-1 (day-major, tickers in column order); targets[t] is the
/// target ticker's close at day t+L-1+h.
struct SupervisedSet {
  Matrix features;
  std::vector<double> targets;
  std::vector<std::string> target_dates;
  std::size_t lag = 1;
  std::size_t horizon = 1;
  std::size_t ticker_count = 1;
  std::size_t target_column = 0;
  std::string target_ticker;

  std::size_t size() const { return targets.size(); }
};

SupervisedSet make_supervised(const PriceTable& table, std::size_t lag,
                              std::size_t horizon, const std::string& target_ticker);

/// First floor(fraction*n) samples train, the rest test; no shuffling.
std::pair<SupervisedSet, SupervisedSet> chrono_split(const SupervisedSet& set,
                                                     double train_fraction);

}  // namespace wavecast
