#include "tai/error.hpp"

namespace tai {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::AttemptsExhausted: return "AttemptsExhausted";
    case ErrorCode::NotApproved: return "NotApproved";
    case ErrorCode::IllegalState: return "IllegalState";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::EmptyQuestion: return "EmptyQuestion";
    case ErrorCode::NoPriorDraft: return "NoPriorDraft";
    case ErrorCode::BudgetImpossible: return "BudgetImpossible";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::MalformedPayload: return "MalformedPayload";
    case ErrorCode::ThreadNotFound: return "ThreadNotFound";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::ForumUnavailable: return "ForumUnavailable";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyResponses: return "EmptyResponses";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace tai
