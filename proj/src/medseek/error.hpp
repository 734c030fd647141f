#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace medseek {

enum class ErrorCode {
  InvalidArgument,
  MalformedTopicFile,
  MissingField,
  DuplicateTopicId,
  UnknownStance,
  InvalidTopic,
  ProviderUnavailable,
  RateLimited,
  EmptySerp,
  StoreCorrupt,
  InvalidUrl,
  EmptyPage,
  ScorerUnavailable,
  EmptyInput,
  ProviderError,
  BudgetExceeded,
  OfflineCacheMiss,
  EmptyDemos,
  DemoTopicOverlap,
  MissingSerp,
  LengthMismatch,
  NoAnsweredRecords,
  TooFewPairs,
  TopicSetMismatch,
  UnknownFormat,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Retryable; carries the delay the provider asked for.
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& what, std::chrono::milliseconds advised)
      : Error(ErrorCode::RateLimited, what), advised_delay_(advised) {}

  std::chrono::milliseconds advised_delay() const noexcept { return advised_delay_; }

 private:
  std::chrono::milliseconds advised_delay_;
};

// Provider-side failure with the provider's status (HTTP code or 0).
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, long status)
      : Error(ErrorCode::ProviderError, what), status_(status) {}

  long status() const noexcept { return status_; }

 private:
  long status_;
};

}  // namespace medseek
