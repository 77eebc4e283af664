#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tai {

enum class ErrorCode {
    // workflow
    IllegalTransition,
    StaleVersion,
    AttemptsExhausted,
    NotApproved,
    IllegalState,
    UnknownItem,
    // prompt
    EmptyQuestion,
    NoPriorDraft,
    BudgetImpossible,
    // connectors
    AuthFailed,
    Unreachable,
    MalformedPayload,
    ThreadNotFound,
    RateLimited,
    Timeout,
    ProviderError,
    EmptyCompletion,
    ForumUnavailable,
    // storage
    StorageFailure,
    // analytics
    UnknownLabel,
    EmptyResponses,
    ParseError,
    // general
    InvalidArgument,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace tai
