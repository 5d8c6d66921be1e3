#include "mirrorcast/error.hpp"

namespace mirrorcast {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidMessage: return "InvalidMessage";
        case ErrorCode::MalformedFrame: return "MalformedFrame";
        case ErrorCode::UnknownKind: return "UnknownKind";
        case ErrorCode::SequenceRegression: return "SequenceRegression";
        case ErrorCode::SequenceGap: return "SequenceGap";
        case ErrorCode::DriverUnreachable: return "DriverUnreachable";
        case ErrorCode::NavigationFailed: return "NavigationFailed";
        case ErrorCode::StaleSession: return "StaleSession";
        case ErrorCode::StaleElement: return "StaleElement";
        case ErrorCode::HistoryEmpty: return "HistoryEmpty";
        case ErrorCode::CaptureFailed: return "CaptureFailed";
        case ErrorCode::ExtractionFailed: return "ExtractionFailed";
        case ErrorCode::QueueClosed: return "QueueClosed";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::SessionOpen: return "SessionOpen";
        case ErrorCode::StorageFull: return "StorageFull";
        case ErrorCode::FetchFailed: return "FetchFailed";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::SessionLost: return "SessionLost";
    }
    return "Unknown";
}

}  // namespace mirrorcast
