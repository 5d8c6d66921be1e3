#include "mirrorcast/replay.hpp"

#include "mirrorcast/composer.hpp"
#include "mirrorcast/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <thread>

namespace mirrorcast::replay {

using wire::InputKind;
using Clock = std::chrono::steady_clock;

void ReplayQueue::submit(QueuedEvent event) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) throw Error(ErrorCode::QueueClosed, "replay queue closed");
        if (event.event.kind == InputKind::TextChanged && !pending_.empty()) {
            QueuedEvent& back = pending_.back();
            if (back.event.kind == InputKind::TextChanged && back.event.elementId == event.event.elementId) {
                if (!event.target) event.target = back.target;
                back = std::move(event);
                cv_.notify_one();
                return;
            }
        }
        pending_.push_back(std::move(event));
    }
    cv_.notify_one();
}

std::vector<QueuedEvent> ReplayQueue::take_all() {
    std::lock_guard lock(mutex_);
    std::vector<QueuedEvent> out(std::make_move_iterator(pending_.begin()), std::make_move_iterator(pending_.end()));
    pending_.clear();
    return out;
}

bool ReplayQueue::wait_until(Clock::time_point deadline) {
    std::unique_lock lock(mutex_);
    cv_.wait_until(lock, deadline, [&] { return !pending_.empty() || closed_; });
    return !pending_.empty();
}

void ReplayQueue::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool ReplayQueue::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

bool ReplayQueue::empty() const {
    std::lock_guard lock(mutex_);
    return pending_.empty();
}

std::uint64_t ReplayQueue::last_executed() const {
    std::lock_guard lock(mutex_);
    return lastExecuted_;
}

void ReplayQueue::mark_executed(std::uint64_t sequence) {
    std::lock_guard lock(mutex_);
    lastExecuted_ = std::max(lastExecuted_, sequence);
}

namespace {

bool contains(const wire::UIElementDescriptor& d, double x, double y) {
    return x >= d.x && x <= d.x + d.width && y >= d.y && y <= d.y + d.height;
}

}  // namespace

void ReplayEngine::set_text(const QueuedEvent& e) {
    try {
        session_.set_element_text(e.event.elementId, e.event.text);
        return;
    } catch (const Error& err) {
        if (err.code() != ErrorCode::StaleElement) throw;
    }
    // Re-extraction refreshes the handle registry; a recorded box lets us find
    // the element again when the handle belongs to another page load.
    auto elements = composer::extract_elements(session_);
    std::string id;
    for (const auto& d : elements)
        if (d.elementId == e.event.elementId) id = d.elementId;
    if (id.empty() && e.target) {
        const double cx = e.target->x + e.target->width / 2, cy = e.target->y + e.target->height / 2;
        for (const auto& d : elements)
            if (d.kind == wire::ElementKind::TextBox && contains(d, cx, cy)) {
                id = d.elementId;
                break;
            }
    }
    if (!id.empty()) {
        try {
            session_.set_element_text(id, e.event.text);
            return;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::StaleElement) throw;
        }
    }
    ++dropped_;
    spdlog::warn("dropping text event seq {}: element {} is gone", e.sequence, e.event.elementId);
}

void ReplayEngine::execute(const QueuedEvent& q) {
    const wire::InputEvent& e = q.event;
    try {
        switch (e.kind) {
            case InputKind::Click:
                session_.inject_click(e.x, e.y);
                break;
            case InputKind::KeyPress: {
                const std::string key = e.key;
                session_.inject_keys(std::span<const std::string>(&key, 1));
                break;
            }
            case InputKind::TextChanged:
            case InputKind::Paste:
                set_text(q);
                break;
            case InputKind::Scroll:
                session_.scroll_to(e.x, e.y);
                break;
            case InputKind::Navigate: {
                auto target = resolve_proxy_path(e.url, origin_);
                if (!target) {
                    ++dropped_;
                    spdlog::warn("dropping navigate seq {}: {} is not a mirrorable path", q.sequence, e.url);
                    break;
                }
                session_.navigate(*target);
                break;
            }
            case InputKind::HistoryBack:
                session_.history_back();
                break;
            case InputKind::HistoryForward:
                session_.history_forward();
                break;
            case InputKind::DragMove:
                session_.inject_drag(e.x, e.y, e.toX, e.toY);
                break;
        }
    } catch (const Error& err) {
        switch (err.code()) {
            case ErrorCode::NavigationFailed:
            case ErrorCode::HistoryEmpty:
            case ErrorCode::ExtractionFailed:
                spdlog::info("event seq {} ({}): {}", q.sequence, wire::tag(e.kind), err.what());
                break;
            case ErrorCode::StaleElement:
                ++dropped_;
                spdlog::warn("dropping event seq {}: {}", q.sequence, err.what());
                break;
            default:
                throw;
        }
    }
}

void ReplayEngine::execute_batch(std::vector<QueuedEvent>& batch, ReplayQueue& queue) {
    for (std::size_t i = 0; i < batch.size();) {
        // Consecutive key presses go out as one action sequence.
        if (batch[i].event.kind == InputKind::KeyPress) {
            std::size_t j = i;
            std::vector<std::string> keys;
            while (j < batch.size() && batch[j].event.kind == InputKind::KeyPress) keys.push_back(batch[j++].event.key);
            if (keys.size() > 1) {
                session_.inject_keys(keys);
                queue.mark_executed(batch[j - 1].sequence);
                i = j;
                continue;
            }
        }
        execute(batch[i]);
        queue.mark_executed(batch[i].sequence);
        ++i;
    }
}

std::size_t ReplayEngine::drain(ReplayQueue& queue) {
    auto batch = queue.take_all();
    execute_batch(batch, queue);
    return batch.size();
}

void ReplayEngine::wait_for_load(ReplayQueue& queue) {
    constexpr auto kLoadLimit = std::chrono::seconds(15);
    const auto giveUp = Clock::now() + kLoadLimit;
    while (!session_.document_ready()) {
        if (Clock::now() > giveUp) {
            spdlog::warn("page still loading after {}s, capturing anyway", kLoadLimit.count());
            return;
        }
        if (queue.wait_for(std::chrono::milliseconds(25))) return;
    }
}

driver::PageSnapshot ReplayEngine::drain_and_capture(ReplayQueue& queue) {
    for (;;) {
        drain(queue);
        if (queue.wait_for(queue.quiescence())) continue;
        wait_for_load(queue);
        if (!queue.empty()) continue;
        break;
    }
    session_.sync_history();
    return session_.capture_snapshot();
}

driver::PageSnapshot replay_log(driver::DriverSession& session, const Url& originSite,
                                const std::vector<recorder::RecordedEvent>& events,
                                std::chrono::milliseconds quiescence) {
    ReplayQueue queue(quiescence);
    ReplayEngine engine(session, originSite);
    for (const auto& r : events) {
        queue.submit(QueuedEvent{r.sequence, r.event, r.target});
        engine.drain(queue);
        // Settle like the live loop so later events see the page they saw live.
        std::this_thread::sleep_for(quiescence);
        const auto limit = Clock::now() + std::chrono::seconds(15);
        while (!session.document_ready() && Clock::now() < limit) std::this_thread::sleep_for(std::chrono::milliseconds(25));
        session.sync_history();
    }
    return session.capture_snapshot();
}

}  // namespace mirrorcast::replay
