#pragma once

#include <stdexcept>
#include <string>

namespace lrdecon {

/// Invalid user-facing parameter (out-of-range exponent, unknown name, shape mismatch).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Out-of-range wavelet index (j, k).
class IndexError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// A requested configuration cannot be realized, e.g. a resolution level above Nyquist.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input is degenerate for the requested operation (all-zero signal for SNR calibration).
class DegenerateInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure inside a numerical routine (negative circulant eigenvalue, non-finite output).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Blur kernel vanishes on a Fourier mode the estimator needs to divide by.
class IllPosednessError : public NumericalError {
public:
  IllPosednessError(const std::string& what, int mode, int column)
      : NumericalError(what), mode_(mode), column_(column) {}
  int mode() const noexcept { return mode_; }
  int column() const noexcept { return column_; }

private:
  int mode_;
  int column_;
};

}  // namespace lrdecon
