#include "mirrorcast/session.hpp"

#include "mirrorcast/error.hpp"

#include <spdlog/spdlog.h>

namespace mirrorcast {

namespace {

Url parse_target(const std::string& target) {
    auto u = Url::parse(target);
    if (!u || !u->is_http()) throw Error(ErrorCode::InvalidConfig, "target is not an absolute http(s) URL: " + target);
    return *u;
}

}  // namespace

MirrorSession::MirrorSession(SessionOptions options, mimicry::FaviconCache& icons)
    : options_(std::move(options)), origin_(parse_target(options_.targetUrl)), icons_(icons),
      queue_(options_.quiescence) {
    if (!options_.storageDir.empty()) {
        recorder_ = std::make_unique<recorder::SessionRecorder>(options_.storageDir, options_.targetUrl,
                                                                options_.recordScreenshots);
        diag_.recordingId = recorder_->session_id();
    }
}

MirrorSession::~MirrorSession() {
    try {
        close();
    } catch (const std::exception& e) {
        spdlog::error("session teardown: {}", e.what());
    }
}

wire::EnrichedView MirrorSession::start(const std::string& initialPath) {
    // "/" means the configured target itself, which may carry a path of its own.
    std::string url = options_.targetUrl;
    if (!initialPath.empty() && initialPath != "/") {
        if (auto resolved = resolve_proxy_path(initialPath, origin_)) url = *resolved;
        else spdlog::warn("ignoring unmirrorable initial path {}", initialPath);
    }
    driver_ = driver::DriverSession::open(url, options_.viewport, options_.adBlock, options_.driver);
    composer_ = std::make_unique<composer::ViewComposer>(origin_);
    engine_ = std::make_unique<replay::ReplayEngine>(*driver_, origin_);
    return capture();
}

void MirrorSession::submit(const wire::InputEvent& event, std::uint64_t sequence) {
    replay::QueuedEvent q{sequence, event, std::nullopt};
    {
        std::lock_guard lock(mutex_);
        if (closed_ || interrupted_) throw Error(ErrorCode::QueueClosed, "session closed");
        if (!event.elementId.empty()) {
            for (const auto& d : elements_)
                if (d.elementId == event.elementId) q.target = recorder::TargetBox{d.x, d.y, d.width, d.height};
        }
        // Logged before queueing, so the log order is the execution order.
        if (recorder_) recorder_->record(event, sequence, q.target);
        ++diag_.eventsSubmitted;
        queue_.submit(std::move(q));
    }
}

std::optional<wire::EnrichedView> MirrorSession::step(std::chrono::milliseconds wait) {
    if (!driver_ || !queue_.wait_for(wait)) return std::nullopt;
    return compose(engine_->drain_and_capture(queue_));
}

wire::EnrichedView MirrorSession::capture() {
    if (!driver_) throw Error(ErrorCode::StaleSession, "session not started");
    driver_->sync_history();
    return compose(driver_->capture_snapshot());
}

wire::EnrichedView MirrorSession::compose(const driver::PageSnapshot& snapshot) {
    auto elements = composer::extract_elements(*driver_);
    std::string icon = icons_.fetch(snapshot.faviconUrl);
    wire::EnrichedView view = composer_->compose(snapshot, elements, driver_->history(), viewSeq_.next(), icon);
    std::lock_guard lock(mutex_);
    elements_ = std::move(elements);
    diag_.currentUrl = snapshot.currentUrl;
    diag_.cspViolations = snapshot.cspViolations;
    diag_.loadFailed = snapshot.loadFailed;
    diag_.viewsComposed = viewSeq_.last();
    diag_.eventsDropped = engine_ ? engine_->dropped() : 0;
    if (recorder_) recorder_->record(view);
    return view;
}

void MirrorSession::interrupt() {
    {
        std::lock_guard lock(mutex_);
        interrupted_ = true;
    }
    queue_.close();
}

void MirrorSession::close() {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        closed_ = true;
    }
    queue_.close();
    if (driver_) {
        try {
            if (std::size_t n = engine_->drain(queue_)) spdlog::debug("executed {} pending events before teardown", n);
        } catch (const Error& e) {
            spdlog::warn("pending events at teardown: {}", e.what());
        }
        driver_->close();
    }
    std::lock_guard lock(mutex_);
    if (recorder_) recorder_->close();
}

SessionDiagnostics MirrorSession::diagnostics() const {
    std::lock_guard lock(mutex_);
    return diag_;
}

}  // namespace mirrorcast
