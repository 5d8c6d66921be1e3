#pragma once

// HTTP + WebSocket front end. Every non-reserved GET returns the bootstrap
// page with a fresh session token; the viewer then opens
// "/__ws/view?t=<token>" and "/__ws/cmd?t=<token>" and says Hello on the
// command channel, which starts a browser for that viewer.
//
// Reserved paths: /__icon/<hash>, /__app/<asset>, /__ws/view, /__ws/cmd.

#include "mirrorcast/driver.hpp"
#include "mirrorcast/mimicry.hpp"
#include "mirrorcast/session.hpp"
#include "mirrorcast/wire.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mirrorcast::gateway {

inline constexpr std::string_view kViewEndpoint = "/__ws/view";
inline constexpr std::string_view kCommandEndpoint = "/__ws/cmd";
inline constexpr std::string_view kAppPrefix = "/__app/";

struct GatewayConfig {
    std::string targetUrl;
    std::string bindAddress = "0.0.0.0";
    /// 0 picks a free port (see Gateway::port()).
    int httpPort = 8080;
    wire::Viewport viewportDefault{1280, 720};
    int quiescenceMs = 200;
    bool adBlock = false;
    bool recordScreenshots = false;
    int sessionTimeoutS = 300;
    std::filesystem::path storageDir = "sessions";
    /// Built viewer bundle served under /__app/. Empty serves nothing.
    std::filesystem::path assetsDir;
    driver::DriverOptions driver;
    int ioThreads = 2;

    /// Throws InvalidConfig.
    void validate() const;
};

struct HttpResponse {
    int status = 200;
    std::string contentType;
    std::string body;
};

struct SessionInfo {
    std::string token;
    bool open = false;
    std::string closeReason;
    SessionDiagnostics diagnostics;
};

class Gateway {
public:
    explicit Gateway(GatewayConfig config);
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds and starts serving on background threads.
    void start();
    /// Closes every session (reaping its browser) and stops serving. Idempotent.
    void stop();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();

    unsigned short port() const;
    const GatewayConfig& config() const;
    mimicry::FaviconCache& icons();

    /// Plain GET routing, shared by the network path and tests.
    HttpResponse handle_get(std::string_view target);

    std::size_t active_sessions() const;
    std::optional<SessionInfo> session(const std::string& token) const;
    std::vector<SessionInfo> sessions() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

std::string bootstrap_html(const std::string& token, std::string_view requestTarget);

}  // namespace mirrorcast::gateway
