#include "despeckle/error.hpp"

namespace despeckle {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::NoSignal: return "no-signal";
    case ErrorKind::RegistrationFailed: return "registration-failed";
    case ErrorKind::SelectionAmbiguous: return "selection-ambiguous";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace despeckle
