#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scopt {

enum class ErrorKind {
  // scop-core
  MissingMarkers,
  MultipleRegions,
  NonAffineBound,
  UnsupportedConstruct,
  UnknownParameter,
  InvalidScop,
  BestEffort,
  // synthesizer
  Infeasible,
  // retrieval
  UnknownDoc,
  EmptyCorpus,
  // llm-client
  MissingSlot,
  AuthError,
  RateLimited,
  Timeout,
  NoCodeBlock,
  // verifier / environment
  CompilerNotFound,
  CoverageToolUnavailable,
  BaselineFailed,
  BackendUnavailable,
  EnvironmentError,
  // pipeline / backend
  VerificationFailed,
  NoImprovement,
  // generic
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingMarkers: return "MissingMarkers";
    case ErrorKind::MultipleRegions: return "MultipleRegions";
    case ErrorKind::NonAffineBound: return "NonAffineBound";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::InvalidScop: return "InvalidScop";
    case ErrorKind::BestEffort: return "BestEffort";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::UnknownDoc: return "UnknownDoc";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::MissingSlot: return "MissingSlot";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::NoCodeBlock: return "NoCodeBlock";
    case ErrorKind::CompilerNotFound: return "CompilerNotFound";
    case ErrorKind::CoverageToolUnavailable: return "CoverageToolUnavailable";
    case ErrorKind::BaselineFailed: return "BaselineFailed";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::EnvironmentError: return "EnvironmentError";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::NoImprovement: return "NoImprovement";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Environment errors map to CLI exit code 2; everything else is a domain
/// failure (exit code 1).
constexpr bool is_environment_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CompilerNotFound:
    case ErrorKind::CoverageToolUnavailable:
    case ErrorKind::BackendUnavailable:
    case ErrorKind::EnvironmentError:
    case ErrorKind::AuthError:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace scopt
