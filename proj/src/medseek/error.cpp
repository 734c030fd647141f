#include "medseek/error.hpp"

namespace medseek {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedTopicFile: return "MalformedTopicFile";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateTopicId: return "DuplicateTopicId";
    case ErrorCode::UnknownStance: return "UnknownStance";
    case ErrorCode::InvalidTopic: return "InvalidTopic";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::EmptySerp: return "EmptySerp";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::InvalidUrl: return "InvalidUrl";
    case ErrorCode::EmptyPage: return "EmptyPage";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::OfflineCacheMiss: return "OfflineCacheMiss";
    case ErrorCode::EmptyDemos: return "EmptyDemos";
    case ErrorCode::DemoTopicOverlap: return "DemoTopicOverlap";
    case ErrorCode::MissingSerp: return "MissingSerp";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoAnsweredRecords: return "NoAnsweredRecords";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::TopicSetMismatch: return "TopicSetMismatch";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace medseek
