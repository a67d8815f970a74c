#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace despeckle {

enum class ErrorKind {
  InvalidInput,
  DegenerateInput,
  Divergence,
  NoSignal,
  RegistrationFailed,
  SelectionAmbiguous,
  UndefinedMetric,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the pipeline in particular) record a failure per cell without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidInput, what);
}

}  // namespace despeckle
