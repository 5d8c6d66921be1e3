#pragma once

// Append-only per-session recording. Archive layout (one directory per session):
//
//   meta.json       {"sessionId","startedAtMs","targetUrl","closed"}
//   events.jsonl    one {"serverMs":T,"message":<command-channel envelope>[,"target":{x,y,w,h}]} per line
//   views.jsonl     one {"seq","path","title","screenshot":<relative path>|null} per line
//   screenshots/    <seq, 8 digits>.png when screenshot recording is on

#include "mirrorcast/wire.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace mirrorcast::recorder {

/// Page-space box of the element a text event targeted, kept so a log can be
/// replayed in a fresh browser where element handles differ.
struct TargetBox {
    double x = 0;
    double y = 0;
    double width = 0;
    double height = 0;
    bool operator==(const TargetBox&) const = default;
};

struct RecordedEvent {
    std::int64_t serverMs = 0;
    std::uint64_t sequence = 0;
    wire::InputEvent event;
    std::optional<TargetBox> target;
    bool operator==(const RecordedEvent&) const = default;
};

struct RecordedView {
    std::uint64_t sequence = 0;
    std::string displayPath;
    std::string title;
    std::optional<std::string> screenshotRef;
    bool operator==(const RecordedView&) const = default;
};

struct SessionMeta {
    std::string sessionId;
    std::int64_t startedAtMs = 0;
    std::string targetUrl;
    bool closed = false;
};

struct SessionArchive {
    SessionMeta meta;
    std::vector<RecordedEvent> events;
    std::vector<RecordedView> views;
};

class SessionRecorder {
public:
    SessionRecorder(const std::filesystem::path& storageDir, std::string targetUrl, bool recordScreenshots);
    ~SessionRecorder();
    SessionRecorder(const SessionRecorder&) = delete;
    SessionRecorder& operator=(const SessionRecorder&) = delete;

    const std::string& session_id() const { return meta_.sessionId; }
    const std::filesystem::path& directory() const { return dir_; }

    /// Appends and flushes before returning. On a write failure recording is
    /// switched off for the rest of the session and an error is logged; the
    /// caller keeps going.
    void record(const wire::InputEvent& event, std::uint64_t sequence,
                const std::optional<TargetBox>& target = std::nullopt);
    void record(const wire::EnrichedView& view);

    /// Marks the archive closed; further records are ignored.
    void close();

    bool enabled() const { return enabled_; }
    std::size_t event_count() const { return eventCount_; }

private:
    std::int64_t now_ms() const;
    bool append(std::ofstream& out, const std::string& line);
    void write_meta();
    void disable(const std::string& why);

    std::filesystem::path dir_;
    SessionMeta meta_;
    bool recordScreenshots_;
    bool enabled_ = true;
    std::chrono::steady_clock::time_point started_;
    std::int64_t lastMs_ = 0;
    std::ofstream events_;
    std::ofstream views_;
    std::size_t eventCount_ = 0;
    std::optional<std::string> lastScreenshot_;
};

SessionArchive read_archive(const std::filesystem::path& directory);

/// Copies a closed session's archive to dest/<sessionId>. Throws
/// UnknownSession or SessionOpen.
std::filesystem::path export_session(const std::filesystem::path& storageDir, const std::string& sessionId,
                                     const std::filesystem::path& dest);

}  // namespace mirrorcast::recorder
