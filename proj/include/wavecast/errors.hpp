#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong dimensions: bad signal length, band-length mismatch, invalid
// decomposition depth, feature-dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Unusable content: malformed files, non-finite values, empty or
// degenerate datasets.
class DataError : public Error {
 public:
  using Error::Error;
};

// A metric that is undefined for the given inputs (e.g. R^2 on a
// constant target series).
class MetricError : public DataError {
 public:
  using DataError::DataError;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace wavecast
