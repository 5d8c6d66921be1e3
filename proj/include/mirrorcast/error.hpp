#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mirrorcast {

enum class ErrorCode {
    InvalidMessage,
    MalformedFrame,
    UnknownKind,
    SequenceRegression,
    SequenceGap,
    DriverUnreachable,
    NavigationFailed,
    StaleSession,
    StaleElement,
    HistoryEmpty,
    CaptureFailed,
    ExtractionFailed,
    QueueClosed,
    UnknownSession,
    SessionOpen,
    StorageFull,
    FetchFailed,
    InvalidConfig,
    SessionLost,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library surfaces as this exception; callers
// switch on code() rather than catching distinct types.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mirrorcast
