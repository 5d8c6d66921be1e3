#pragma once

// Scripted viewer: fetches the bootstrap page for a token, opens both
// channels, says Hello, then sends input and collects views. Used by tests,
// the auditor and the acceptance suite in place of the browser overlay.

#include "mirrorcast/wire.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>

namespace mirrorcast {

struct HttpResult {
    int status = 0;
    std::string contentType;
    std::string body;
};

/// Plain GET against host:port (no TLS).
HttpResult http_get(const std::string& host, unsigned short port, const std::string& target);

class WireClient {
public:
    /// Connects as a viewer that opened `path` on the proxy.
    static std::unique_ptr<WireClient> connect(const std::string& host, unsigned short port,
                                               const std::string& path = "/", wire::Viewport viewport = {1280, 720});
    ~WireClient();
    WireClient(const WireClient&) = delete;
    WireClient& operator=(const WireClient&) = delete;

    const std::string& token() const;

    /// Sends one input event; returns its sequence number.
    std::uint64_t send(const wire::InputEvent& event);
    /// Sends a raw text frame on the command channel (protocol-violation tests).
    void send_raw(const std::string& text);

    /// Next view, or nullopt on timeout or once the channel closed.
    std::optional<wire::EnrichedView> next_view(std::chrono::milliseconds timeout);
    /// Next view or throws SessionLost.
    wire::EnrichedView expect_view(std::chrono::milliseconds timeout = std::chrono::seconds(30));
    /// Next protocol error sent by the server on the command channel.
    std::optional<wire::ProtocolError> next_error(std::chrono::milliseconds timeout);

    /// True once the server closed the view channel.
    bool view_closed() const;
    /// Waits for the server to close the view channel.
    bool wait_closed(std::chrono::milliseconds timeout);

    /// Closes both channels.
    void close();

    struct Impl;

private:
    WireClient();
    std::unique_ptr<Impl> impl_;
};

}  // namespace mirrorcast
