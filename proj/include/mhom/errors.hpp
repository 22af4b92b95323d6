#pragma once

#include <stdexcept>
#include <string>

namespace mhom {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MHOM_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

MHOM_DEFINE_ERROR(NonConvergence);
MHOM_DEFINE_ERROR(MeshQualityFailure);
MHOM_DEFINE_ERROR(StitchFailure);
MHOM_DEFINE_ERROR(NonEllipticField);
MHOM_DEFINE_ERROR(SolverDivergence);
MHOM_DEFINE_ERROR(MeshMismatch);
MHOM_DEFINE_ERROR(DegenerateFit);
MHOM_DEFINE_ERROR(HypothesisViolation);
MHOM_DEFINE_ERROR(SingularMatrix);
MHOM_DEFINE_ERROR(EllipticityViolation);
MHOM_DEFINE_ERROR(InsufficientSamples);

#undef MHOM_DEFINE_ERROR

/// Configuration problem, carrying the offending key and (when known) line.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string &what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string &key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string &key, int line, const std::string &what) {
    std::string msg = "config";
    if (line > 0) msg += " line " + std::to_string(line);
    if (!key.empty()) msg += " key '" + key + "'";
    return msg + ": " + what;
  }
  std::string key_;
  int line_;
};

}  // namespace mhom
