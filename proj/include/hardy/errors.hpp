#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardy {

/// Failure categories raised by the numerical routines.
enum class ErrorKind {
  InvalidParams,
  InvalidGrid,
  NonIntegrable,
  ResonantIndicialGap,
  StepFailure,
  ResidualTooLarge,
  BubbleUnresolved,
  NotCoercive,
  SignViolation,
  PoleCrossing,
  NoSignChange,
  NonConvergence,
  NegativeCoercivity,
  PoleTooCloseToOrigin,
  NoAdmissibleBetaPrime,
  RegimeMismatch,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::ResonantIndicialGap: return "ResonantIndicialGap";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::BubbleUnresolved: return "BubbleUnresolved";
    case ErrorKind::NotCoercive: return "NotCoercive";
    case ErrorKind::SignViolation: return "SignViolation";
    case ErrorKind::PoleCrossing: return "PoleCrossing";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NegativeCoercivity: return "NegativeCoercivity";
    case ErrorKind::PoleTooCloseToOrigin: return "PoleTooCloseToOrigin";
    case ErrorKind::NoAdmissibleBetaPrime: return "NoAdmissibleBetaPrime";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// what() without the kind prefix
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hardy
