#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asn {

enum class ErrorKind {
  InvalidGeometry,
  InfeasibleReverberation,
  Placement,
  InsufficientData,
  DegenerateExcitation,
  Dimension,
  NumericalConditioning,
  IncompleteObservation,
  TuningFailure,
  State,
  Domain,
  DegenerateMessage,
  Capacity,
  Fitting,
  UndefinedAuc,
  Calibration,
  Config,
  Schema,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGeometry: return "invalid geometry";
    case ErrorKind::InfeasibleReverberation: return "infeasible reverberation";
    case ErrorKind::Placement: return "placement error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::DegenerateExcitation: return "degenerate excitation";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::NumericalConditioning: return "numerical conditioning";
    case ErrorKind::IncompleteObservation: return "incomplete observation";
    case ErrorKind::TuningFailure: return "tuning failure";
    case ErrorKind::State: return "state error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateMessage: return "degenerate message";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Fitting: return "fitting error";
    case ErrorKind::UndefinedAuc: return "undefined AUC";
    case ErrorKind::Calibration: return "calibration error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

}  // namespace asn
