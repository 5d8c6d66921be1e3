#pragma once

// Ordered execution of viewer input against a browser session, followed by a
// capture once the page has been quiet for the configured timeout.

#include "mirrorcast/driver.hpp"
#include "mirrorcast/recorder.hpp"
#include "mirrorcast/url.hpp"
#include "mirrorcast/wire.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

namespace mirrorcast::replay {

inline constexpr std::chrono::milliseconds kDefaultQuiescence{200};

struct QueuedEvent {
    std::uint64_t sequence = 0;
    wire::InputEvent event;
    /// Box of the element a text event targets, used to find it again when
    /// its handle has gone stale.
    std::optional<recorder::TargetBox> target;
};

/// FIFO shared between the network receiver (producer) and the session loop
/// (consumer).
class ReplayQueue {
public:
    explicit ReplayQueue(std::chrono::milliseconds quiescence = kDefaultQuiescence) : quiescence_(quiescence) {}

    /// Throws QueueClosed once close() was called. A TextChanged for the same
    /// element as the newest pending event replaces its value.
    void submit(QueuedEvent event);
    void submit(const wire::InputEvent& event, std::uint64_t sequence) { submit(QueuedEvent{sequence, event, {}}); }

    /// Removes and returns everything pending.
    std::vector<QueuedEvent> take_all();

    /// Blocks until something is pending, the queue is closed, or the deadline
    /// passes. True when events are pending.
    bool wait_until(std::chrono::steady_clock::time_point deadline);
    bool wait_for(std::chrono::milliseconds timeout) { return wait_until(std::chrono::steady_clock::now() + timeout); }

    void close();
    bool closed() const;
    bool empty() const;

    std::uint64_t last_executed() const;
    /// Never moves backwards.
    void mark_executed(std::uint64_t sequence);

    std::chrono::milliseconds quiescence() const { return quiescence_; }
    void set_quiescence(std::chrono::milliseconds q) { quiescence_ = q; }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<QueuedEvent> pending_;
    std::uint64_t lastExecuted_ = 0;
    bool closed_ = false;
    std::chrono::milliseconds quiescence_;
};

/// Executes queued events on one browser session. Confined to the session loop.
class ReplayEngine {
public:
    ReplayEngine(driver::DriverSession& session, Url originSite) : session_(session), origin_(std::move(originSite)) {}

    /// Runs every pending event, then waits until no new event arrived for the
    /// quiescence interval and the document reports complete, and captures.
    driver::PageSnapshot drain_and_capture(ReplayQueue& queue);

    /// Runs whatever is pending without waiting or capturing (teardown path).
    std::size_t drain(ReplayQueue& queue);

    /// Executes one event. Navigation failures and empty history are logged
    /// and swallowed so the live session keeps going; a stale element handle
    /// gets one retry after re-extraction and is then dropped.
    void execute(const QueuedEvent& event);

    std::size_t dropped() const { return dropped_; }

private:
    void execute_batch(std::vector<QueuedEvent>& batch, ReplayQueue& queue);
    void wait_for_load(ReplayQueue& queue);
    void set_text(const QueuedEvent& e);

    driver::DriverSession& session_;
    Url origin_;
    std::size_t dropped_ = 0;
};

/// Replays a recorded event log in a fresh session, one settle cycle per
/// event, and returns the final snapshot.
driver::PageSnapshot replay_log(driver::DriverSession& session, const Url& originSite,
                                const std::vector<recorder::RecordedEvent>& events,
                                std::chrono::milliseconds quiescence = kDefaultQuiescence);

}  // namespace mirrorcast::replay
