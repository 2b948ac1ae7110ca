#pragma once

#include <stdexcept>
#include <string>

namespace ctqw {

// Each error category maps onto one CLI exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// Raised when |<psi|psi> - 1| exceeds the failure tolerance.
class NormFailure : public NumericError {
 public:
  NormFailure(double deviation, long realization, long step)
      : NumericError(describe(deviation, realization, step)),
        deviation_(deviation),
        realization_(realization),
        step_(step) {}

  double deviation() const noexcept { return deviation_; }
  long realization() const noexcept { return realization_; }
  long step() const noexcept { return step_; }

 private:
  static std::string describe(double deviation, long realization, long step) {
    std::string msg = "norm deviation " + std::to_string(deviation) + " exceeds tol_fail";
    if (realization >= 0) msg += " in realization " + std::to_string(realization);
    if (step >= 0) msg += " at step " + std::to_string(step);
    msg += "; reduce the time step or raise the Taylor order";
    return msg;
  }

  double deviation_;
  long realization_;
  long step_;
};

namespace exit_codes {
inline constexpr int kSuccess = 0;
inline constexpr int kConfig = 2;
inline constexpr int kNumeric = 3;
inline constexpr int kCapacity = 4;
inline constexpr int kIo = 5;
}  // namespace exit_codes

inline int exit_code(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IndexError*>(&e))
    return exit_codes::kConfig;
  if (dynamic_cast<const NumericError*>(&e)) return exit_codes::kNumeric;
  if (dynamic_cast<const CapacityError*>(&e)) return exit_codes::kCapacity;
  if (dynamic_cast<const IoError*>(&e)) return exit_codes::kIo;
  return 1;
}

}  // namespace ctqw
