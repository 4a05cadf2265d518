#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

enum class ErrorCode {
  UnknownLetter,
  ResourceLimit,
  TrivialSubgroup,
  NotProper,
  EmptyCollection,
  CosetEqual,
  NotMalnormal,
  BadCompacts,
  NotConicalCandidate,
  Horizon,
  BadR,
  ParseError,
  ValidationError,
  IoError,
  Internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownLetter: return "UNKNOWN_LETTER";
    case ErrorCode::ResourceLimit: return "RESOURCE_LIMIT";
    case ErrorCode::TrivialSubgroup: return "TRIVIAL_SUBGROUP";
    case ErrorCode::NotProper: return "NOT_PROPER";
    case ErrorCode::EmptyCollection: return "EMPTY_COLLECTION";
    case ErrorCode::CosetEqual: return "COSET_EQUAL";
    case ErrorCode::NotMalnormal: return "NOT_MALNORMAL";
    case ErrorCode::BadCompacts: return "BAD_COMPACTS";
    case ErrorCode::NotConicalCandidate: return "NOT_CONICAL_CANDIDATE";
    case ErrorCode::Horizon: return "HORIZON";
    case ErrorCode::BadR: return "BAD_R";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

  // Process exit status: 0 ok, 2 hypothesis failure, 3 resource limit, 1 everything else.
  int exit_status() const {
    switch (code_) {
      case ErrorCode::ResourceLimit:
        return 3;
      case ErrorCode::TrivialSubgroup:
      case ErrorCode::NotProper:
      case ErrorCode::NotMalnormal:
      case ErrorCode::BadCompacts:
      case ErrorCode::NotConicalCandidate:
      case ErrorCode::BadR:
      case ErrorCode::CosetEqual:
      case ErrorCode::Horizon:
        return 2;
      default:
        return 1;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace cusp
