#include "mirrorcast/driver.hpp"

#include "mirrorcast/image.hpp"
#include "mirrorcast/codec.hpp"
#include "mirrorcast/page_scripts.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_map>

extern char** environ;

#ifndef MIRRORCAST_DEFAULT_BROWSER_DIR
#define MIRRORCAST_DEFAULT_BROWSER_DIR "/opt/mirror-browser"
#endif

namespace mirrorcast::driver {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

bool executable(const fs::path& p) { return !p.empty() && ::access(p.c_str(), X_OK) == 0 && fs::is_regular_file(p); }

std::string search_path(std::initializer_list<const char*> names) {
    std::string path = env_or_empty("PATH");
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t end = path.find(':', start);
        if (end == std::string::npos) end = path.size();
        fs::path dir = path.substr(start, end - start);
        for (const char* n : names)
            if (executable(dir / n)) return (dir / n).string();
        start = end + 1;
    }
    return "";
}

int free_loopback_port() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return 0;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof addr;
    int port = 0;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 &&
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
        port = ntohs(addr.sin_port);
    ::close(fd);
    return port;
}

bool wait_for_exit(int pid, std::chrono::milliseconds budget) {
    auto deadline = std::chrono::steady_clock::now() + budget;
    while (std::chrono::steady_clock::now() < deadline) {
        int status = 0;
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid || r < 0) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    return false;
}

std::pair<std::string, int> split_endpoint(const std::string& endpoint) {
    std::string rest = endpoint;
    if (auto p = rest.find("://"); p != std::string::npos) rest = rest.substr(p + 3);
    if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) return {rest, 80};
    return {rest.substr(0, colon), std::atoi(rest.substr(colon + 1).c_str())};
}

const std::unordered_map<std::string, std::string>& named_keys() {
    // WebDriver normalized key code points.
    static const std::unordered_map<std::string, std::string> keys = {
        {"Cancel", "\uE001"},
        {"Help", "\uE002"},
        {"Backspace", "\uE003"},
        {"Tab", "\uE004"},
        {"Clear", "\uE005"},
        {"Enter", "\uE007"},
        {"Shift", "\uE008"},
        {"Control", "\uE009"},
        {"Alt", "\uE00A"},
        {"Pause", "\uE00B"},
        {"Escape", "\uE00C"},
        {"PageUp", "\uE00E"},
        {"PageDown", "\uE00F"},
        {"End", "\uE010"},
        {"Home", "\uE011"},
        {"ArrowLeft", "\uE012"},
        {"ArrowUp", "\uE013"},
        {"ArrowRight", "\uE014"},
        {"ArrowDown", "\uE015"},
        {"Insert", "\uE016"},
        {"Delete", "\uE017"},
        {"F1", "\uE031"},
        {"F2", "\uE032"},
        {"F3", "\uE033"},
        {"F4", "\uE034"},
        {"F5", "\uE035"},
        {"F6", "\uE036"},
        {"F7", "\uE037"},
        {"F8", "\uE038"},
        {"F9", "\uE039"},
        {"F10", "\uE03A"},
        {"F11", "\uE03B"},
        {"F12", "\uE03C"},
        {"Meta", "\uE03D"},
        {"Spacebar", " "},
    };
    return keys;
}

std::size_t utf8_code_points(const std::string& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

BrowserPaths BrowserPaths::discover() {
    BrowserPaths p;
    p.chromedriver = env_or_empty("MIRRORCAST_CHROMEDRIVER");
    p.browser = env_or_empty("MIRRORCAST_BROWSER");
    const fs::path dir = MIRRORCAST_DEFAULT_BROWSER_DIR;
    if (p.chromedriver.empty() && executable(dir / "chromedriver")) p.chromedriver = (dir / "chromedriver").string();
    if (p.browser.empty() && executable(dir / "chromium")) p.browser = (dir / "chromium").string();
    if (p.chromedriver.empty()) p.chromedriver = search_path({"chromedriver"});
    if (p.browser.empty())
        p.browser = search_path({"chrome-headless-shell", "chromium", "chromium-browser", "google-chrome"});
    return p;
}

std::optional<std::string> webdriver_key(const std::string& key) {
    if (key.empty()) return std::nullopt;
    const auto& named = named_keys();
    if (auto it = named.find(key); it != named.end()) return it->second;
    if (utf8_code_points(key) == 1) return key;
    return std::nullopt;
}

std::vector<int> processes_running(const std::string& needle) {
    std::vector<int> pids;
    if (needle.empty()) return pids;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator("/proc", ec)) {
        const std::string name = entry.path().filename().string();
        if (name.empty() || !std::all_of(name.begin(), name.end(), ::isdigit)) continue;
        std::ifstream in(entry.path() / "cmdline", std::ios::binary);
        std::string cmdline((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (cmdline.empty()) continue;  // kernel thread or zombie
        std::replace(cmdline.begin(), cmdline.end(), '\0', ' ');
        if (cmdline.find(needle) != std::string::npos && std::stoi(name) != ::getpid()) pids.push_back(std::stoi(name));
    }
    return pids;
}

// --- DriverProcess ---

DriverProcess::DriverProcess(const std::string& exe) {
    if (exe.empty()) throw Error(ErrorCode::DriverUnreachable, "no chromedriver executable found");
    for (int attempt = 0; attempt < 3 && pid_ < 0; ++attempt) {
        port_ = free_loopback_port();
        std::string portArg = "--port=" + std::to_string(port_);
        std::array<char*, 4> argv{const_cast<char*>(exe.c_str()), portArg.data(),
                                  const_cast<char*>("--allowed-ips=127.0.0.1"), nullptr};
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
        posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
        posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
        pid_t pid = -1;
        int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        if (rc != 0) throw Error(ErrorCode::DriverUnreachable, "cannot spawn " + exe + ": " + std::strerror(rc));

        httplib::Client probe("127.0.0.1", port_);
        probe.set_connection_timeout(std::chrono::milliseconds(200));
        auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
        while (std::chrono::steady_clock::now() < deadline) {
            if (auto res = probe.Get("/status"); res && res->status == 200) {
                pid_ = pid;
                break;
            }
            int status = 0;
            if (::waitpid(pid, &status, WNOHANG) == pid) break;  // died, likely port clash
            std::this_thread::sleep_for(std::chrono::milliseconds(25));
        }
        if (pid_ < 0) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
        }
    }
    if (pid_ < 0) throw Error(ErrorCode::DriverUnreachable, "chromedriver did not become ready");
}

DriverProcess::~DriverProcess() {
    if (pid_ <= 0) return;
    ::kill(pid_, SIGTERM);
    if (!wait_for_exit(pid_, std::chrono::seconds(3))) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
    }
}

// --- DriverSession ---

json DriverSession::capabilities(Viewport viewport, bool adBlock, const DriverOptions& options,
                                 const std::string& userDataDir) {
    json args = json::array({"--no-sandbox", "--disable-gpu", "--hide-scrollbars", "--disable-dev-shm-usage",
                             "--no-first-run", "--no-default-browser-check", "--mute-audio",
                             "--force-device-scale-factor=1", "--disable-background-networking",
                             "--window-size=" + std::to_string(viewport.width) + "," + std::to_string(viewport.height)});
    if (options.headless) args.push_back("--headless=new");
    if (!userDataDir.empty()) args.push_back("--user-data-dir=" + userDataDir);
    if (adBlock && !options.contentBlockerPath.empty()) {
        args.push_back("--load-extension=" + options.contentBlockerPath);
        args.push_back("--disable-extensions-except=" + options.contentBlockerPath);
    }
    json chrome = {{"args", args}};
    if (!options.paths.browser.empty()) chrome["binary"] = options.paths.browser;
    return {{"capabilities",
             {{"alwaysMatch",
               {{"browserName", "chrome"},
                {"pageLoadStrategy", "normal"},
                {"timeouts", {{"pageLoad", options.pageLoadTimeout.count()}, {"script", 30000}}},
                {"goog:chromeOptions", chrome}}}}}};
}

std::unique_ptr<DriverSession> DriverSession::open(const std::string& targetUrl, Viewport viewport, bool adBlock,
                                                   const DriverOptions& options) {
    if (viewport.width <= 0 || viewport.height <= 0) throw Error(ErrorCode::InvalidConfig, "viewport must be positive");
    std::unique_ptr<DriverSession> s(new DriverSession());
    s->viewport_ = viewport;
    std::string endpoint = options.endpoint;
    if (endpoint.empty()) {
        s->process_ = std::make_unique<DriverProcess>(options.paths.chromedriver);
        endpoint = s->process_->endpoint();
    }
    auto [host, port] = split_endpoint(endpoint);
    s->http_ = std::make_unique<httplib::Client>(host, port);
    s->http_->set_connection_timeout(std::chrono::seconds(2));
    s->http_->set_read_timeout(std::chrono::seconds(90));
    s->http_->set_keep_alive(true);
    s->http_->set_tcp_nodelay(true);

    json created = s->command("POST", "/session", capabilities(viewport, adBlock, options, s->userDataDir_),
                              ErrorCode::DriverUnreachable);
    s->sessionId_ = created.value("sessionId", "");
    if (s->sessionId_.empty()) throw Error(ErrorCode::DriverUnreachable, "driver returned no session id");
    if (auto caps = created.find("capabilities"); caps != created.end()) {
        s->browserPid_ = caps->value("goog:processID", -1);
        // The headless shell stalls on a caller-chosen --user-data-dir, so the
        // driver picks the profile and we only learn it here (for reaping).
        if (s->process_ && caps->contains("chrome") && (*caps)["chrome"].is_object())
            s->userDataDir_ = (*caps)["chrome"].value("userDataDir", "");
    }

    try {
        s->cdp("Emulation.setDeviceMetricsOverride",
               {{"width", viewport.width}, {"height", viewport.height}, {"deviceScaleFactor", 1}, {"mobile", false}});
        s->cdp("Page.addScriptToEvaluateOnNewDocument", {{"source", scripts::kNewDocument}});
    } catch (const Error& e) {
        spdlog::warn("driver has no CDP passthrough, falling back to plain WebDriver: {}", e.what());
        s->cdpAvailable_ = false;
        s->session_command("POST", "/window/rect", {{"width", viewport.width}, {"height", viewport.height}},
                           ErrorCode::DriverUnreachable);
    }
    s->navigate(targetUrl);
    return s;
}

DriverSession::~DriverSession() {
    try {
        close();
    } catch (const std::exception& e) {
        spdlog::warn("driver teardown: {}", e.what());
    }
}

void DriverSession::close() {
    if (closed_) return;
    closed_ = true;
    if (http_ && !sessionId_.empty()) {
        auto res = http_->Delete("/session/" + sessionId_);
        if (!res) spdlog::warn("could not delete WebDriver session {}", sessionId_);
    }
    process_.reset();
    if (!userDataDir_.empty()) {
        // Chrome children orphaned by a crashed driver still carry our profile dir.
        for (int pid : processes_running(userDataDir_)) ::kill(pid, SIGKILL);
        std::error_code ec;
        fs::remove_all(userDataDir_, ec);
    }
}

json DriverSession::command(const char* method, const std::string& path, const json& body, ErrorCode failure) {
    if (!http_) throw Error(ErrorCode::StaleSession, "session is closed");
    httplib::Result res = std::string_view(method) == "GET"      ? http_->Get(path)
                          : std::string_view(method) == "DELETE" ? http_->Delete(path)
                                                                 : http_->Post(path, body.dump(), "application/json");
    if (!res) {
        throw Error(failure == ErrorCode::DriverUnreachable ? ErrorCode::DriverUnreachable : ErrorCode::StaleSession,
                    std::string("WebDriver request ") + method + " " + path + " failed: " + httplib::to_string(res.error()));
    }
    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(failure, std::string("unparseable WebDriver response for ") + path);
    json value = doc.value("value", json());
    if (res->status >= 400 || (value.is_object() && value.contains("error"))) {
        std::string err = value.is_object() ? value.value("error", "") : "";
        std::string msg = value.is_object() ? value.value("message", "") : res->body;
        ErrorCode code = failure;
        if (err == "invalid session id" || err == "no such window" || err == "session not created") {
            code = failure == ErrorCode::DriverUnreachable ? ErrorCode::DriverUnreachable : ErrorCode::StaleSession;
        } else if (err == "stale element reference" || err == "no such element") {
            code = ErrorCode::StaleElement;
        } else if (msg.find("net::ERR_") != std::string::npos || err == "timeout") {
            code = ErrorCode::NavigationFailed;
        }
        throw Error(code, err + ": " + msg.substr(0, 300));
    }
    return value;
}

json DriverSession::session_command(const char* method, const std::string& path, const json& body, ErrorCode failure) {
    if (closed_) throw Error(ErrorCode::StaleSession, "session is closed");
    return command(method, "/session/" + sessionId_ + path, body, failure);
}

json DriverSession::cdp(const std::string& cmd, const json& params) {
    return session_command("POST", "/goog/cdp/execute", {{"cmd", cmd}, {"params", params}}, ErrorCode::CaptureFailed);
}

json DriverSession::execute_script(const std::string& script, const json& args) {
    return session_command("POST", "/execute/sync", {{"script", script}, {"args", args}}, ErrorCode::ExtractionFailed);
}

bool DriverSession::document_ready() {
    json r = execute_script(scripts::kReadyState);
    return r.is_string() && r.get<std::string>() == "complete";
}

std::string DriverSession::current_url() {
    // The WebDriver /url endpoint reports the requested URL even when the
    // browser ended up on its own error page; the document knows better.
    json r = session_command("POST", "/execute/sync", {{"script", "return location.href;"}, {"args", json::array()}},
                             ErrorCode::StaleSession);
    if (!r.is_string()) r = session_command("GET", "/url", json(), ErrorCode::StaleSession);
    return r.is_string() ? r.get<std::string>() : "";
}

void DriverSession::check_load(const std::string& url) {
    std::string now = current_url();
    if (now.starts_with("chrome-error://")) throw Error(ErrorCode::NavigationFailed, "could not load " + url);
}

void DriverSession::sync_history() {
    std::string url = current_url();
    if (history_.empty()) {
        history_.push_back(url);
        historyIndex_ = 0;
        return;
    }
    if (history_[historyIndex_] == url) return;
    history_.resize(historyIndex_ + 1);
    history_.push_back(url);
    historyIndex_ = history_.size() - 1;
}

void DriverSession::navigate(const std::string& url) {
    session_command("POST", "/url", {{"url", url}}, ErrorCode::NavigationFailed);
    check_load(url);
    sync_history();
}

void DriverSession::history_back() {
    sync_history();
    if (historyIndex_ == 0) throw Error(ErrorCode::HistoryEmpty, "no page to go back to");
    session_command("POST", "/back", json::object(), ErrorCode::NavigationFailed);
    --historyIndex_;
    std::string url = current_url();
    if (url != history_[historyIndex_]) history_[historyIndex_] = url;
}

void DriverSession::history_forward() {
    sync_history();
    if (historyIndex_ + 1 >= history_.size()) throw Error(ErrorCode::HistoryEmpty, "no page to go forward to");
    session_command("POST", "/forward", json::object(), ErrorCode::NavigationFailed);
    ++historyIndex_;
    std::string url = current_url();
    if (url != history_[historyIndex_]) history_[historyIndex_] = url;
}

HistoryDepth DriverSession::history() const {
    if (history_.empty()) return {};
    return {static_cast<int>(historyIndex_), static_cast<int>(history_.size() - 1 - historyIndex_)};
}

void DriverSession::perform_actions(const json& actions) {
    session_command("POST", "/actions", {{"actions", actions}}, ErrorCode::StaleSession);
    session_command("DELETE", "/actions", json(), ErrorCode::StaleSession);
}

std::pair<double, double> DriverSession::reveal(double x, double y) {
    json r = execute_script(scripts::kRevealPoint, json::array({x, y}));
    if (!r.is_array() || r.size() < 2) return {0.0, 0.0};
    return {r[0].get<double>(), r[1].get<double>()};
}

namespace {

json pointer_move(double x, double y, int durationMs, Viewport vp) {
    const int ix = std::clamp(static_cast<int>(std::floor(x)), 0, std::max(0, vp.width - 1));
    const int iy = std::clamp(static_cast<int>(std::floor(y)), 0, std::max(0, vp.height - 1));
    return {{"type", "pointerMove"}, {"x", ix}, {"y", iy}, {"origin", "viewport"}, {"duration", durationMs}};
}

json mouse_source(json steps) {
    return {{"type", "pointer"}, {"id", "mouse"}, {"parameters", {{"pointerType", "mouse"}}}, {"actions", std::move(steps)}};
}

}  // namespace

void DriverSession::inject_click(double x, double y) {
    auto [sx, sy] = reveal(x, y);
    json steps = json::array({pointer_move(x - sx, y - sy, 0, viewport_),
                              {{"type", "pointerDown"}, {"button", 0}},
                              {{"type", "pointerUp"}, {"button", 0}}});
    perform_actions(json::array({mouse_source(std::move(steps))}));
}

void DriverSession::inject_drag(double fromX, double fromY, double toX, double toY) {
    auto [sx, sy] = reveal(fromX, fromY);
    json steps = json::array({pointer_move(fromX - sx, fromY - sy, 0, viewport_), {{"type", "pointerDown"}, {"button", 0}}});
    for (int i = 1; i <= kDragSteps; ++i) {
        const double t = double(i) / kDragSteps;
        steps.push_back(pointer_move(fromX + (toX - fromX) * t - sx, fromY + (toY - fromY) * t - sy,
                                     static_cast<int>(kDragStepInterval.count()), viewport_));
    }
    steps.push_back({{"type", "pointerUp"}, {"button", 0}});
    perform_actions(json::array({mouse_source(std::move(steps))}));
}

void DriverSession::inject_keys(std::span<const std::string> keys) {
    json steps = json::array();
    for (const auto& k : keys) {
        auto value = webdriver_key(k);
        if (!value) {
            spdlog::warn("ignoring unknown key identifier '{}'", k);
            continue;
        }
        steps.push_back({{"type", "keyDown"}, {"value", *value}});
        steps.push_back({{"type", "keyUp"}, {"value", *value}});
    }
    if (steps.empty()) return;
    perform_actions(json::array({{{"type", "key"}, {"id", "keyboard"}, {"actions", std::move(steps)}}}));
}

void DriverSession::set_element_text(const std::string& elementId, const std::string& text) {
    json r = execute_script(scripts::kSetElementText, json::array({elementId, text}));
    if (!r.is_string() || r.get<std::string>() != "ok")
        throw Error(ErrorCode::StaleElement, "element " + elementId + " is not on the current page");
}

void DriverSession::scroll_to(double x, double y) { execute_script(scripts::kScrollTo, json::array({x, y})); }

void DriverSession::set_viewport(Viewport viewport) {
    if (viewport == viewport_) return;
    if (cdpAvailable_) {
        cdp("Emulation.setDeviceMetricsOverride",
            {{"width", viewport.width}, {"height", viewport.height}, {"deviceScaleFactor", 1}, {"mobile", false}});
    } else {
        session_command("POST", "/window/rect", {{"width", viewport.width}, {"height", viewport.height}},
                        ErrorCode::StaleSession);
    }
    viewport_ = viewport;
}

PageSnapshot DriverSession::capture_snapshot() {
    json meta = execute_script(scripts::kPageMetadata);
    if (!meta.is_object()) throw Error(ErrorCode::CaptureFailed, "page metadata unavailable");
    PageSnapshot snap;
    snap.title = meta.value("title", "");
    snap.currentUrl = meta.value("url", "");
    snap.cspViolations = meta.value("csp", 0);
    snap.loadFailed = snap.currentUrl.starts_with("chrome-error://");
    if (meta.contains("icon") && meta["icon"].is_string()) {
        snap.faviconUrl = meta["icon"].get<std::string>();
    } else if (snap.currentUrl.starts_with("http://") || snap.currentUrl.starts_with("https://")) {
        auto slash = snap.currentUrl.find('/', snap.currentUrl.find("://") + 3);
        snap.faviconUrl = snap.currentUrl.substr(0, slash) + "/favicon.ico";
    }
    const int vw = meta.value("vw", viewport_.width);
    const int pageHeight = static_cast<int>(std::ceil(meta.value("height", 0.0)));
    const int pageWidth = static_cast<int>(std::ceil(meta.value("width", 0.0)));
    snap.fullPageHeight = pageHeight;
    const int width = std::clamp(std::max(pageWidth, vw), 1, kMaxCaptureHeight);
    const int height = std::clamp(pageHeight, 1, kMaxCaptureHeight);

    std::string data;
    if (cdpAvailable_) {
        json shot = cdp("Page.captureScreenshot",
                        {{"format", "png"},
                         {"captureBeyondViewport", true},
                         {"optimizeForSpeed", true},
                         {"clip", {{"x", 0}, {"y", 0}, {"width", width}, {"height", height}, {"scale", 1}}}});
        data = shot.value("data", "");
    } else {
        json shot = session_command("GET", "/screenshot", json(), ErrorCode::CaptureFailed);
        data = shot.is_string() ? shot.get<std::string>() : "";
    }
    auto bytes = codec::base64_decode(data);
    if (!bytes || bytes->empty()) throw Error(ErrorCode::CaptureFailed, "screenshot payload is not valid base64 PNG");
    auto dims = image::png_dimensions(*bytes);
    if (!dims) throw Error(ErrorCode::CaptureFailed, "screenshot is not a PNG");
    snap.imageWidth = dims->first;
    snap.imageHeight = dims->second;
    snap.screenshot = std::move(*bytes);
    return snap;
}

}  // namespace mirrorcast::driver
