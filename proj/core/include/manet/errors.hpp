#pragma once

#include <stdexcept>
#include <string>

namespace manet {

/// Base of every error raised by the library. `code()` is a short
/// machine-readable tag that the CLI echoes in its error document.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define MANET_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(tag, message) {} \
  }

/// Invalid or inconsistent configuration.
MANET_DEFINE_ERROR(ConfigError, "config");
/// Derived scheme parameters are unusable (e.g. zero data packets per block).
MANET_DEFINE_ERROR(RegimeError, "regime");
/// Argument outside the range where a formula is exact.
MANET_DEFINE_ERROR(DomainError, "domain");
/// Configuration the implementation does not support (e.g. C != 9).
MANET_DEFINE_ERROR(UnsupportedConfig, "unsupported");
/// API used in a context where it is meaningless.
MANET_DEFINE_ERROR(MisuseError, "misuse");
/// Coded packet does not belong to the block being decoded.
MANET_DEFINE_ERROR(IntegrityError, "integrity");
/// Coded packet budget below the block size.
MANET_DEFINE_ERROR(InfeasibleRate, "infeasible_rate");
/// Statistical check parameters out of range.
MANET_DEFINE_ERROR(ParameterError, "parameter");
/// Not enough usable rows for a regression.
MANET_DEFINE_ERROR(InsufficientData, "insufficient_data");
/// A hard invariant failed; always indicates an implementation bug.
MANET_DEFINE_ERROR(InvariantViolation, "invariant");
/// Malformed input file.
MANET_DEFINE_ERROR(FormatError, "format");

#undef MANET_DEFINE_ERROR

}  // namespace manet
