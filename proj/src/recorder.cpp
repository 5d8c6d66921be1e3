#include "mirrorcast/recorder.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/error.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cerrno>
#include <cstdio>
#include <cstring>

namespace mirrorcast::recorder {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string screenshot_name(std::uint64_t seq) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08llu.png", static_cast<unsigned long long>(seq));
    return std::string("screenshots/") + buf;
}

json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::UnknownSession, "missing " + p.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedFrame, "corrupt " + p.string());
    return j;
}

template <typename F>
void for_each_line(const fs::path& p, F&& f) {
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        // A last line without its newline is a torn append (disk full, crash).
        if (j.is_discarded() && in.eof()) break;
        if (j.is_discarded()) throw Error(ErrorCode::MalformedFrame, "corrupt line in " + p.string());
        f(j);
    }
}

}  // namespace

SessionRecorder::SessionRecorder(const fs::path& storageDir, std::string targetUrl, bool recordScreenshots)
    : recordScreenshots_(recordScreenshots), started_(std::chrono::steady_clock::now()) {
    meta_.sessionId = codec::random_id();
    meta_.targetUrl = std::move(targetUrl);
    meta_.startedAtMs =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch()).count();
    dir_ = storageDir / meta_.sessionId;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (recordScreenshots_) fs::create_directories(dir_ / "screenshots", ec);
    if (ec) {
        disable("cannot create " + dir_.string() + ": " + ec.message());
        return;
    }
    write_meta();
    events_.open(dir_ / "events.jsonl", std::ios::app);
    views_.open(dir_ / "views.jsonl", std::ios::app);
    if (!events_ || !views_) disable("cannot open log files in " + dir_.string());
}

SessionRecorder::~SessionRecorder() { close(); }

std::int64_t SessionRecorder::now_ms() const {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started_);
    return meta_.startedAtMs + elapsed.count();
}

void SessionRecorder::disable(const std::string& why) {
    if (!enabled_) return;
    enabled_ = false;
    // Drop the streams now so a failed buffer is never flushed again later.
    events_.close();
    views_.close();
    spdlog::error("session {}: RECORDING DISABLED ({}); the session continues unrecorded", meta_.sessionId, why);
}

bool SessionRecorder::append(std::ofstream& out, const std::string& line) {
    out << line << '\n';
    out.flush();
    if (!out) {
        disable(std::string("write failed (") + std::strerror(errno) + ")");
        return false;
    }
    return true;
}

void SessionRecorder::write_meta() {
    json j = {{"sessionId", meta_.sessionId},
              {"startedAtMs", meta_.startedAtMs},
              {"targetUrl", meta_.targetUrl},
              {"closed", meta_.closed}};
    const fs::path tmp = dir_ / "meta.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump(2) << '\n';
        out.flush();
        if (!out) {
            disable("cannot write meta.json");
            return;
        }
    }
    std::error_code ec;
    fs::rename(tmp, dir_ / "meta.json", ec);
    if (ec) disable("cannot write meta.json: " + ec.message());
}

void SessionRecorder::record(const wire::InputEvent& event, std::uint64_t sequence,
                             const std::optional<TargetBox>& target) {
    if (!enabled_ || meta_.closed) return;
    std::int64_t ts = std::max(now_ms(), lastMs_);
    lastMs_ = ts;
    wire::Frame frame = wire::encode(wire::make_message(sequence, event));
    json line = {{"serverMs", ts}, {"message", json::parse(frame.text())}};
    if (target) line["target"] = {{"x", target->x}, {"y", target->y}, {"w", target->width}, {"h", target->height}};
    if (append(events_, line.dump())) ++eventCount_;
}

void SessionRecorder::record(const wire::EnrichedView& view) {
    if (!enabled_ || meta_.closed) return;
    std::optional<std::string> ref;
    if (recordScreenshots_) {
        if (view.reuseImage) {
            ref = lastScreenshot_;
        } else {
            std::string name = screenshot_name(view.sequence);
            std::ofstream png(dir_ / name, std::ios::binary | std::ios::trunc);
            png.write(reinterpret_cast<const char*>(view.screenshot.data()),
                      static_cast<std::streamsize>(view.screenshot.size()));
            png.flush();
            if (!png) {
                disable("cannot write " + name);
                return;
            }
            ref = lastScreenshot_ = name;
        }
    }
    json line = {{"seq", view.sequence},
                 {"path", view.displayPath},
                 {"title", view.pageTitle},
                 {"screenshot", ref ? json(*ref) : json(nullptr)}};
    append(views_, line.dump());
}

void SessionRecorder::close() {
    if (meta_.closed) return;
    meta_.closed = true;
    events_.close();
    views_.close();
    if (enabled_) write_meta();
}

SessionArchive read_archive(const fs::path& directory) {
    SessionArchive a;
    json meta = read_json_file(directory / "meta.json");
    a.meta.sessionId = meta.value("sessionId", "");
    a.meta.startedAtMs = meta.value("startedAtMs", std::int64_t{0});
    a.meta.targetUrl = meta.value("targetUrl", "");
    a.meta.closed = meta.value("closed", false);
    for_each_line(directory / "events.jsonl", [&](const json& j) {
        wire::WireMessage m = wire::decode(j.at("message").dump(), wire::FrameType::Text);
        const auto* event = std::get_if<wire::InputEvent>(&m.body);
        if (!event) throw Error(ErrorCode::MalformedFrame, "event log holds a non-input message");
        RecordedEvent e{j.at("serverMs").get<std::int64_t>(), m.sequence, *event, std::nullopt};
        if (auto t = j.find("target"); t != j.end())
            e.target = TargetBox{t->at("x").get<double>(), t->at("y").get<double>(), t->at("w").get<double>(),
                                 t->at("h").get<double>()};
        a.events.push_back(std::move(e));
    });
    for_each_line(directory / "views.jsonl", [&](const json& j) {
        RecordedView v;
        v.sequence = j.at("seq").get<std::uint64_t>();
        v.displayPath = j.at("path").get<std::string>();
        v.title = j.at("title").get<std::string>();
        if (j.at("screenshot").is_string()) v.screenshotRef = j.at("screenshot").get<std::string>();
        a.views.push_back(std::move(v));
    });
    return a;
}

fs::path export_session(const fs::path& storageDir, const std::string& sessionId, const fs::path& dest) {
    const fs::path src = storageDir / sessionId;
    if (sessionId.empty() || sessionId.find('/') != std::string::npos || !fs::is_regular_file(src / "meta.json"))
        throw Error(ErrorCode::UnknownSession, "no session " + sessionId);
    if (!read_json_file(src / "meta.json").value("closed", false))
        throw Error(ErrorCode::SessionOpen, "session " + sessionId + " is still open");
    const fs::path out = dest / sessionId;
    fs::create_directories(dest);
    fs::copy(src, out, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    return out;
}

}  // namespace mirrorcast::recorder
