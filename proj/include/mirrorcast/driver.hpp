#pragma once

// Minimal WebDriver client controlling one headless browser per mirroring
// session. Speaks the HTTP wire protocol directly; when no endpoint is
// configured it also owns the chromedriver child process.

#include "mirrorcast/error.hpp"
#include "mirrorcast/wire.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace httplib {
class Client;
}

namespace mirrorcast::driver {

using wire::Viewport;

inline constexpr int kMaxCaptureHeight = 16384;
inline constexpr int kDragSteps = 10;
inline constexpr std::chrono::milliseconds kDragStepInterval{8};

struct BrowserPaths {
    std::string chromedriver;
    std::string browser;

    /// MIRRORCAST_CHROMEDRIVER / MIRRORCAST_BROWSER, then the build-time
    /// default directory, then $PATH.
    static BrowserPaths discover();
};

struct DriverOptions {
    /// Base URL of an already running WebDriver server. When empty a
    /// chromedriver process is spawned per session.
    std::string endpoint;
    BrowserPaths paths = BrowserPaths::discover();
    bool headless = true;
    /// Unpacked content-blocker extension loaded when ad blocking is on.
    std::string contentBlockerPath;
    std::chrono::milliseconds pageLoadTimeout{20000};
};

struct PageSnapshot {
    std::vector<std::uint8_t> screenshot;  // PNG
    int imageWidth = 0;
    int imageHeight = 0;
    int fullPageHeight = 0;
    std::string title;
    std::string currentUrl;
    std::optional<std::string> faviconUrl;
    int cspViolations = 0;
    bool loadFailed = false;  // browser is showing its own network error page
};

struct HistoryDepth {
    int back = 0;
    int forward = 0;
};

/// A chromedriver child process listening on a loopback port. Killed and
/// reaped on destruction.
class DriverProcess {
public:
    explicit DriverProcess(const std::string& executable);
    ~DriverProcess();
    DriverProcess(const DriverProcess&) = delete;
    DriverProcess& operator=(const DriverProcess&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int pid() const { return pid_; }

private:
    int pid_ = -1;
    int port_ = 0;
};

class DriverSession {
public:
    /// Starts a browser at targetUrl with the given viewport. Throws
    /// DriverUnreachable or NavigationFailed.
    static std::unique_ptr<DriverSession> open(const std::string& targetUrl, Viewport viewport, bool adBlock,
                                               const DriverOptions& options = {});

    ~DriverSession();
    DriverSession(const DriverSession&) = delete;
    DriverSession& operator=(const DriverSession&) = delete;

    /// Ends the WebDriver session and reaps the driver process. Idempotent.
    void close();
    bool closed() const { return closed_; }

    void navigate(const std::string& url);
    void history_back();
    void history_forward();
    HistoryDepth history() const;

    void inject_click(double x, double y);
    void inject_keys(std::span<const std::string> keys);
    void set_element_text(const std::string& elementId, const std::string& text);
    void inject_drag(double fromX, double fromY, double toX, double toY);
    void scroll_to(double x, double y);

    PageSnapshot capture_snapshot();
    nlohmann::json execute_script(const std::string& script, const nlohmann::json& args = nlohmann::json::array());
    bool document_ready();
    std::string current_url();

    /// Re-reads the browser location and records it as a history entry if it
    /// changed (link clicks, form submits, script navigation).
    void sync_history();

    Viewport viewport() const { return viewport_; }
    void set_viewport(Viewport viewport);

    const std::string& handle() const { return sessionId_; }
    /// Browser process id reported by the driver, or -1.
    int browser_pid() const { return browserPid_; }

    /// Capability document sent when creating the session.
    static nlohmann::json capabilities(Viewport viewport, bool adBlock, const DriverOptions& options,
                                       const std::string& userDataDir);

private:
    DriverSession() = default;

    nlohmann::json command(const char* method, const std::string& path, const nlohmann::json& body,
                           ErrorCode failure);
    nlohmann::json session_command(const char* method, const std::string& path, const nlohmann::json& body,
                                   ErrorCode failure);
    nlohmann::json cdp(const std::string& cmd, const nlohmann::json& params);
    void perform_actions(const nlohmann::json& actions);
    std::pair<double, double> reveal(double x, double y);
    void check_load(const std::string& url);

    std::unique_ptr<DriverProcess> process_;
    std::unique_ptr<httplib::Client> http_;
    std::string sessionId_;
    std::string userDataDir_;
    Viewport viewport_;
    int browserPid_ = -1;
    bool closed_ = false;
    bool cdpAvailable_ = true;
    std::vector<std::string> history_;
    std::size_t historyIndex_ = 0;
};

/// WebDriver key value for a UI-events key name ("Enter" -> U+E007). Single
/// characters map to themselves; unknown names return nullopt.
std::optional<std::string> webdriver_key(const std::string& key);

/// Live processes whose command line references the given executable path.
std::vector<int> processes_running(const std::string& executable);

}  // namespace mirrorcast::driver
