#pragma once

// One mirroring session: a browser, its replay queue, the view composer and
// the recorder. start() and step() belong to the session loop thread;
// submit() may be called from the network thread.

#include "mirrorcast/composer.hpp"
#include "mirrorcast/driver.hpp"
#include "mirrorcast/mimicry.hpp"
#include "mirrorcast/recorder.hpp"
#include "mirrorcast/replay.hpp"
#include "mirrorcast/url.hpp"
#include "mirrorcast/wire.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace mirrorcast {

struct SessionOptions {
    std::string targetUrl;
    wire::Viewport viewport{1280, 720};
    std::chrono::milliseconds quiescence = replay::kDefaultQuiescence;
    bool adBlock = false;
    bool recordScreenshots = false;
    /// Empty disables recording.
    std::filesystem::path storageDir;
    driver::DriverOptions driver;
};

/// What the last capture looked like, beyond what travels on the wire.
struct SessionDiagnostics {
    std::string currentUrl;
    int cspViolations = 0;
    bool loadFailed = false;
    std::uint64_t viewsComposed = 0;
    std::uint64_t eventsSubmitted = 0;
    std::size_t eventsDropped = 0;
    std::string recordingId;
};

class MirrorSession {
public:
    MirrorSession(SessionOptions options, mimicry::FaviconCache& icons);
    ~MirrorSession();
    MirrorSession(const MirrorSession&) = delete;
    MirrorSession& operator=(const MirrorSession&) = delete;

    /// Opens the browser at the target joined with initialPath (a proxy path)
    /// and returns the first view. Throws DriverUnreachable/NavigationFailed.
    wire::EnrichedView start(const std::string& initialPath);

    /// Records the event, then queues it. Throws QueueClosed after close().
    void submit(const wire::InputEvent& event, std::uint64_t sequence);

    /// Waits up to `wait` for input; if any arrives, replays everything,
    /// captures once the page is quiet and returns the composed view.
    std::optional<wire::EnrichedView> step(std::chrono::milliseconds wait);

    /// Stops accepting input and wakes a step() in progress; teardown is
    /// left to close() on the loop thread. Safe from any thread.
    void interrupt();

    /// Capture without new input.
    wire::EnrichedView capture();

    /// Stops accepting input, executes what is still queued, then shuts the
    /// browser down and seals the recording. Idempotent.
    void close();

    bool started() const { return driver_ != nullptr; }
    SessionDiagnostics diagnostics() const;
    driver::DriverSession* driver() { return driver_.get(); }
    const recorder::SessionRecorder* recorder() const { return recorder_.get(); }
    const Url& origin() const { return origin_; }

private:
    wire::EnrichedView compose(const driver::PageSnapshot& snapshot);

    SessionOptions options_;
    Url origin_;
    mimicry::FaviconCache& icons_;
    std::unique_ptr<driver::DriverSession> driver_;
    std::unique_ptr<composer::ViewComposer> composer_;
    std::unique_ptr<replay::ReplayEngine> engine_;
    replay::ReplayQueue queue_;
    wire::SequenceCounter viewSeq_;

    mutable std::mutex mutex_;  // guards recorder_, elements_, diag_
    std::unique_ptr<recorder::SessionRecorder> recorder_;
    std::vector<wire::UIElementDescriptor> elements_;
    SessionDiagnostics diag_;
    bool closed_ = false;
    bool interrupted_ = false;
};

}  // namespace mirrorcast
