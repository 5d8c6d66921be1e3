#include "mirrorcast/gateway.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/error.hpp"
#include "mirrorcast/url.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace mirrorcast::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

void GatewayConfig::validate() const {
    auto u = Url::parse(targetUrl);
    if (!u || !u->is_http() || u->host.empty())
        throw Error(ErrorCode::InvalidConfig, "target must be an absolute http(s) URL, got '" + targetUrl + "'");
    if (httpPort < 0 || httpPort > 65535) throw Error(ErrorCode::InvalidConfig, "port out of range");
    if (viewportDefault.width < 1 || viewportDefault.height < 1 || viewportDefault.width > driver::kMaxCaptureHeight ||
        viewportDefault.height > driver::kMaxCaptureHeight)
        throw Error(ErrorCode::InvalidConfig, "viewport out of range");
    if (quiescenceMs < 0) throw Error(ErrorCode::InvalidConfig, "quiescence must be >= 0");
    if (sessionTimeoutS < 1) throw Error(ErrorCode::InvalidConfig, "session timeout must be >= 1s");
    if (ioThreads < 1) throw Error(ErrorCode::InvalidConfig, "need at least one I/O thread");
    boost::system::error_code ec;
    net::ip::make_address(bindAddress, ec);
    if (ec) throw Error(ErrorCode::InvalidConfig, "bad bind address " + bindAddress);
}

std::string bootstrap_html(const std::string& token, std::string_view requestTarget) {
    nlohmann::json cfg = {{"token", token},
                          {"view", std::string(kViewEndpoint) + "?t=" + token},
                          {"cmd", std::string(kCommandEndpoint) + "?t=" + token},
                          {"path", std::string(requestTarget)}};
    std::string js = cfg.dump(-1, ' ', true, nlohmann::json::error_handler_t::replace);
    // Keep "</script>" sequences in the path from closing the element.
    std::string safe;
    for (char c : js) safe += c == '<' ? std::string("\\u003c") : std::string(1, c);
    std::ostringstream out;
    out << "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title></title>\n"
        << "<meta name=\"viewport\" content=\"width=device-width,initial-scale=1\">\n"
        << "<link rel=\"icon\" href=\"data:,\">\n"
        << "<style>html,body{margin:0;padding:0;background:#fff}</style>\n"
        << "<script>window.__MC=" << safe << ";</script>\n"
        << "<script src=\"" << kAppPrefix << "client.js\" defer></script>\n"
        << "</head><body></body></html>\n";
    return out.str();
}

namespace {

std::string content_type_for(const std::filesystem::path& p) {
    static const std::map<std::string, std::string> types = {
        {".js", "text/javascript"}, {".mjs", "text/javascript"}, {".css", "text/css"},  {".html", "text/html"},
        {".json", "application/json"}, {".png", "image/png"},   {".svg", "image/svg+xml"}, {".map", "application/json"},
        {".ico", "image/x-icon"},      {".woff2", "font/woff2"}};
    auto it = types.find(p.extension().string());
    return it == types.end() ? "application/octet-stream" : it->second;
}

std::pair<std::string_view, std::string_view> split_target(std::string_view target) {
    auto q = target.find('?');
    if (q == std::string_view::npos) return {target, {}};
    return {target.substr(0, q), target.substr(q + 1)};
}

std::string query_param(std::string_view query, std::string_view name) {
    while (!query.empty()) {
        auto amp = query.find('&');
        std::string_view part = query.substr(0, amp);
        if (part.size() > name.size() && part.substr(0, name.size()) == name && part[name.size()] == '=')
            return std::string(part.substr(name.size() + 1));
        if (amp == std::string_view::npos) break;
        query.remove_prefix(amp + 1);
    }
    return {};
}

bool is_reserved(std::string_view path) {
    return path.starts_with(mimicry::kIconPrefix) || path.starts_with(kAppPrefix) || path.starts_with("/__ws/");
}

// One WebSocket connection. All members are touched on the connection strand.
class WsChannel : public std::enable_shared_from_this<WsChannel> {
public:
    using MessageHandler = std::function<void(std::vector<std::uint8_t>, bool binary)>;
    using CloseHandler = std::function<void()>;

    explicit WsChannel(tcp::socket&& socket) : ws_(std::move(socket)) {}

    void accept(http::request<http::string_body> req, MessageHandler onMessage, CloseHandler onClose) {
        onMessage_ = std::move(onMessage);
        onClose_ = std::move(onClose);
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(4 << 20);
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return self->finish();
            self->read();
        });
    }

    void send(wire::Frame frame) {
        auto data = std::make_shared<wire::Frame>(std::move(frame));
        net::post(ws_.get_executor(), [self = shared_from_this(), data] {
            if (self->closed_ || self->closing_) return;
            self->out_.push_back(data);
            if (self->out_.size() == 1) self->write();
        });
    }

    /// Flushes queued frames, then closes.
    void close() {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            if (self->closed_ || self->closing_) return;
            self->closing_ = true;
            if (self->out_.empty()) self->do_close();
        });
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->finish();
            auto bytes = self->buffer_.cdata();
            std::vector<std::uint8_t> data(net::buffers_begin(bytes), net::buffers_end(bytes));
            self->buffer_.consume(self->buffer_.size());
            if (self->onMessage_ && !self->closing_) self->onMessage_(std::move(data), self->ws_.got_binary());
            self->read();
        });
    }

    void write() {
        const auto& f = *out_.front();
        ws_.binary(f.type == wire::FrameType::Binary);
        ws_.async_write(net::buffer(f.bytes), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->finish();
            self->out_.pop_front();
            if (!self->out_.empty()) self->write();
            else if (self->closing_) self->do_close();
        });
    }

    void do_close() {
        ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) { self->finish(); });
    }

    void finish() {
        if (closed_) return;
        closed_ = true;
        out_.clear();
        if (auto cb = std::move(onClose_)) cb();
        onMessage_ = nullptr;
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::shared_ptr<wire::Frame>> out_;
    MessageHandler onMessage_;
    CloseHandler onClose_;
    bool closing_ = false;
    bool closed_ = false;
};

}  // namespace

struct Slot {
    std::string token;
    Clock::time_point issued = Clock::now();
    std::shared_ptr<WsChannel> view;
    std::shared_ptr<WsChannel> cmd;
    std::optional<wire::Hello> hello;
    wire::FrameReader cmdReader;     // cmd strand only
    wire::SequenceCounter errorSeq;  // guarded by Impl::mutex
    std::shared_ptr<MirrorSession> session;
    bool launched = false;
    bool finished = false;
    Clock::time_point finishedAt;
    std::atomic<bool> closing{false};
    std::string closeReason;
    std::atomic<Clock::rep> lastActivity{Clock::now().time_since_epoch().count()};
    SessionDiagnostics lastDiag;
};

// Network handlers hold a raw Impl pointer: stop() joins every thread that
// could run them before the Impl is destroyed.
struct Gateway::Impl {
    explicit Impl(GatewayConfig c) : config(std::move(c)), origin(*Url::parse(config.targetUrl)) {}

    GatewayConfig config;
    Url origin;
    mimicry::FaviconCache icons;
    net::io_context ioc;
    std::optional<tcp::acceptor> acceptor;
    std::vector<std::thread> ioThreads;
    std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
    unsigned short boundPort = 0;

    mutable std::mutex mutex;
    std::condition_variable stoppedCv;
    bool running = false;
    bool stopped = false;
    std::map<std::string, std::shared_ptr<Slot>> slots;
    std::vector<std::pair<std::thread, std::shared_ptr<std::atomic<bool>>>> loops;

    HttpResponse handle_get(std::string_view target);
    void accept();
    void on_http(tcp::socket socket);
    void route_upgrade(tcp::socket&& socket, http::request<http::string_body> req);
    void on_command(const std::shared_ptr<Slot>& slot, std::vector<std::uint8_t> data, bool binary);
    void violation(const std::shared_ptr<Slot>& slot, ErrorCode code, const std::string& what);
    void send_error(const std::shared_ptr<Slot>& slot, ErrorCode code, const std::string& what);
    void end_session(const std::shared_ptr<Slot>& slot, const std::string& reason);
    void maybe_launch(const std::shared_ptr<Slot>& slot);
    void run_session(std::shared_ptr<Slot> slot);
    void reap_threads(bool all);
    SessionOptions session_options(const wire::Hello& hello) const;
};

HttpResponse Gateway::Impl::handle_get(std::string_view target) {
    auto [path, query] = split_target(target);
    if (path.empty() || path.front() != '/') return {400, "text/plain", "bad request target\n"};
    if (path.starts_with(mimicry::kIconPrefix)) {
        if (auto icon = icons.lookup(path)) return {200, icon->contentType, std::string(icon->bytes.begin(), icon->bytes.end())};
        return {404, "text/plain", "unknown icon\n"};
    }
    if (path.starts_with(kAppPrefix)) {
        std::filesystem::path rel(std::string(path.substr(kAppPrefix.size())));
        bool safe = !config.assetsDir.empty() && !rel.empty();
        for (const auto& part : rel)
            if (part == ".." || part == ".") safe = false;
        if (safe) {
            std::ifstream in(config.assetsDir / rel, std::ios::binary);
            if (in) {
                std::ostringstream ss;
                ss << in.rdbuf();
                return {200, content_type_for(rel), ss.str()};
            }
        }
        return {404, "text/plain", "unknown asset\n"};
    }
    if (is_reserved(path)) return {404, "text/plain", "websocket endpoint\n"};

    auto slot = std::make_shared<Slot>();
    slot->token = codec::random_id();
    {
        std::lock_guard lock(mutex);
        // Tokens nobody connected with expire after the session timeout.
        const auto cutoff = Clock::now() - std::chrono::seconds(config.sessionTimeoutS);
        for (auto it = slots.begin(); it != slots.end();) {
            const Slot& s = *it->second;
            const bool stale = (!s.launched && !s.finished && s.issued < cutoff) ||
                               (s.finished && s.finishedAt < Clock::now() - std::chrono::hours(1));
            if (stale) it = slots.erase(it);
            else ++it;
        }
        slots[slot->token] = slot;
    }
    return {200, "text/html; charset=utf-8", bootstrap_html(slot->token, target)};
}

namespace {

// One plain HTTP connection; hands itself over to WsChannel on upgrade.
class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(tcp::socket&& socket, Gateway::Impl* gw) : stream_(std::move(socket)), gw_(gw) {}

    void run() { read(); }

private:
    void read() {
        parser_.emplace();
        parser_->body_limit(64 * 1024);
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, *parser_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->shutdown();
            self->on_request();
        });
    }

    void on_request() {
        auto req = parser_->release();
        if (websocket::is_upgrade(req)) {
            stream_.expires_never();
            gw_->route_upgrade(stream_.release_socket(), std::move(req));
            return;
        }
        http::response<http::string_body> res;
        res.version(req.version());
        res.keep_alive(req.keep_alive());
        res.set(http::field::server, "mirrorcast");
        res.set(http::field::cache_control, "no-store");
        if (req.method() != http::verb::get && req.method() != http::verb::head) {
            res.result(http::status::method_not_allowed);
            res.set(http::field::allow, "GET, HEAD");
            res.set(http::field::content_type, "text/plain");
            res.body() = "method not allowed\n";
        } else {
            HttpResponse r = gw_->handle_get(std::string_view(req.target().data(), req.target().size()));
            res.result(static_cast<unsigned>(r.status));
            res.set(http::field::content_type, r.contentType);
            res.body() = std::move(r.body);
        }
        res.prepare_payload();
        if (req.method() == http::verb::head) res.body().clear();
        write(std::move(res));
    }

    void write(http::response<http::string_body> res) {
        auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
        http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
            if (ec || sp->need_eof()) return self->shutdown();
            self->read();
        });
    }

    void shutdown() {
        beast::error_code ec;
        stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    std::optional<http::request_parser<http::string_body>> parser_;
    Gateway::Impl* gw_;
};

// Answers a refused upgrade with a plain HTTP error.
void reject_upgrade(tcp::socket&& socket, unsigned version, http::status status, std::string body) {
    auto stream = std::make_shared<beast::tcp_stream>(std::move(socket));
    auto res = std::make_shared<http::response<http::string_body>>(status, version);
    res->set(http::field::content_type, "text/plain");
    res->body() = std::move(body);
    res->keep_alive(false);
    res->prepare_payload();
    http::async_write(*stream, *res, [stream, res](beast::error_code, std::size_t) {
        beast::error_code ec;
        stream->socket().shutdown(tcp::socket::shutdown_both, ec);
    });
}

}  // namespace

void Gateway::Impl::route_upgrade(tcp::socket&& socket, http::request<http::string_body> req) {
    auto [path, query] = split_target(std::string_view(req.target().data(), req.target().size()));
    const bool isView = path == kViewEndpoint, isCmd = path == kCommandEndpoint;
    const std::string token = query_param(query, "t");
    std::shared_ptr<Slot> slot;
    if (isView || isCmd) {
        std::lock_guard lock(mutex);
        if (auto it = slots.find(token); it != slots.end() && !it->second->finished && !it->second->closing &&
                                         !(isView ? it->second->view : it->second->cmd))
            slot = it->second;
    }
    if (!slot) {
        reject_upgrade(std::move(socket), req.version(), http::status::not_found, "unknown endpoint or token\n");
        return;
    }
    auto channel = std::make_shared<WsChannel>(std::move(socket));
    {
        std::lock_guard lock(mutex);
        (isView ? slot->view : slot->cmd) = channel;
    }
    auto* self = this;
    std::weak_ptr<Slot> weak = slot;
    auto onClose = [self, weak, isView] {
        if (auto s = weak.lock()) self->end_session(s, isView ? "view channel closed" : "command channel closed");
    };
    if (isCmd) {
        channel->accept(
            std::move(req),
            [self, weak](std::vector<std::uint8_t> data, bool binary) {
                if (auto s = weak.lock()) self->on_command(s, std::move(data), binary);
            },
            onClose);
    } else {
        channel->accept(
            std::move(req),
            [self, weak](std::vector<std::uint8_t>, bool) {
                if (auto s = weak.lock())
                    self->violation(s, ErrorCode::InvalidMessage, "the view channel is server-to-client only");
            },
            onClose);
    }
    maybe_launch(slot);
}

void Gateway::Impl::on_command(const std::shared_ptr<Slot>& slot, std::vector<std::uint8_t> data, bool binary) {
    slot->lastActivity = Clock::now().time_since_epoch().count();
    wire::WireMessage msg;
    try {
        msg = slot->cmdReader.read(data, binary ? wire::FrameType::Binary : wire::FrameType::Text);
    } catch (const Error& e) {
        return violation(slot, e.code(), e.what());
    }
    if (const auto* hello = std::get_if<wire::Hello>(&msg.body)) {
        bool duplicate;
        {
            std::lock_guard lock(mutex);
            duplicate = slot->hello.has_value();
            if (!duplicate) slot->hello = *hello;
        }
        if (duplicate) return violation(slot, ErrorCode::InvalidMessage, "duplicate hello");
        return maybe_launch(slot);
    }
    const auto* event = std::get_if<wire::InputEvent>(&msg.body);
    if (!event) return violation(slot, ErrorCode::InvalidMessage, "only hello and input events may be sent");
    std::shared_ptr<MirrorSession> session;
    {
        std::lock_guard lock(mutex);
        if (!slot->hello) return violation(slot, ErrorCode::InvalidMessage, "input before hello");
        session = slot->session;
    }
    if (!session) return violation(slot, ErrorCode::InvalidMessage, "input before the view channel opened");
    try {
        session->submit(*event, msg.sequence);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::QueueClosed) throw;
    }
}

void Gateway::Impl::send_error(const std::shared_ptr<Slot>& slot, ErrorCode code, const std::string& what) {
    std::shared_ptr<WsChannel> cmd;
    std::uint64_t seq;
    {
        std::lock_guard lock(mutex);
        cmd = slot->cmd;
        seq = slot->errorSeq.next();
    }
    if (cmd) cmd->send(wire::encode(wire::make_message(seq, wire::ProtocolError{std::string(to_string(code)), what})));
}

void Gateway::Impl::violation(const std::shared_ptr<Slot>& slot, ErrorCode code, const std::string& what) {
    spdlog::warn("session {}: protocol violation: {}", slot->token.substr(0, 8), what);
    send_error(slot, code, what);
    end_session(slot, "protocol violation: " + what);
}

void Gateway::Impl::end_session(const std::shared_ptr<Slot>& slot, const std::string& reason) {
    std::shared_ptr<MirrorSession> session;
    std::shared_ptr<WsChannel> view, cmd;
    {
        std::lock_guard lock(mutex);
        if (slot->closing.exchange(true)) return;
        slot->closeReason = reason;
        session = slot->session;
        view = slot->view;
        cmd = slot->cmd;
        if (!slot->launched) {
            slot->finished = true;
            slot->finishedAt = Clock::now();
        }
    }
    // Wakes the session loop, which drains and tears down on its own thread.
    if (session) session->interrupt();
    if (view) view->close();
    if (cmd) cmd->close();
}

SessionOptions Gateway::Impl::session_options(const wire::Hello& hello) const {
    SessionOptions o;
    o.targetUrl = config.targetUrl;
    o.viewport = hello.viewport.width > 0 && hello.viewport.height > 0 ? hello.viewport : config.viewportDefault;
    o.viewport.width = std::min(o.viewport.width, driver::kMaxCaptureHeight);
    o.viewport.height = std::min(o.viewport.height, driver::kMaxCaptureHeight);
    o.quiescence = std::chrono::milliseconds(config.quiescenceMs);
    o.adBlock = config.adBlock;
    o.recordScreenshots = config.recordScreenshots;
    o.storageDir = config.storageDir;
    o.driver = config.driver;
    return o;
}

void Gateway::Impl::maybe_launch(const std::shared_ptr<Slot>& slot) {
    std::lock_guard lock(mutex);
    if (slot->launched || slot->closing || !slot->hello || !slot->view || !slot->cmd || stopped) return;
    slot->launched = true;
    try {
        slot->session = std::make_shared<MirrorSession>(session_options(*slot->hello), icons);
    } catch (const std::exception& e) {
        spdlog::error("cannot create session: {}", e.what());
        slot->launched = false;
        return;
    }
    auto done = std::make_shared<std::atomic<bool>>(false);
    loops.emplace_back(
        [this, slot, done] {
            run_session(slot);
            *done = true;
        },
        done);
}

void Gateway::Impl::run_session(std::shared_ptr<Slot> slot) {
    auto session = slot->session;
    auto view = slot->view;
    const std::string tag = slot->token.substr(0, 8);
    auto send_view = [&](const wire::EnrichedView& v) { view->send(wire::encode(wire::make_message(v))); };
    std::string reason;
    try {
        spdlog::info("session {}: starting at '{}'", tag, slot->hello->path);
        send_view(session->start(slot->hello->path));
        const auto timeout = std::chrono::seconds(config.sessionTimeoutS);
        while (!slot->closing) {
            if (auto v = session->step(std::chrono::milliseconds(250))) {
                send_view(*v);
                slot->lastActivity = Clock::now().time_since_epoch().count();
                continue;
            }
            const Clock::time_point last{Clock::duration(slot->lastActivity.load())};
            if (Clock::now() - last > timeout) {
                reason = "idle timeout";
                break;
            }
        }
    } catch (const Error& e) {
        spdlog::error("session {}: closing after {}", tag, e.what());
        send_error(slot, e.code(), e.what());
        reason = std::string("browser failure: ") + e.what();
    } catch (const std::exception& e) {
        spdlog::error("session {}: closing after {}", tag, e.what());
        send_error(slot, ErrorCode::SessionLost, e.what());
        reason = std::string("internal error: ") + e.what();
    }
    if (!reason.empty()) end_session(slot, reason);
    try {
        session->close();
    } catch (const std::exception& e) {
        spdlog::error("session {}: teardown: {}", tag, e.what());
    }
    std::lock_guard lock(mutex);
    slot->lastDiag = session->diagnostics();
    slot->finished = true;
    slot->finishedAt = Clock::now();
    spdlog::info("session {}: closed ({})", tag, slot->closeReason);
}

void Gateway::Impl::reap_threads(bool all) {
    std::vector<std::thread> toJoin;
    {
        std::lock_guard lock(mutex);
        for (auto it = loops.begin(); it != loops.end();) {
            if (all || *it->second) {
                toJoin.push_back(std::move(it->first));
                it = loops.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& t : toJoin)
        if (t.joinable()) t.join();
}

void Gateway::Impl::accept() {
    acceptor->async_accept(net::make_strand(ioc), [self = this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec == net::error::operation_aborted) return;
            spdlog::warn("accept: {}", ec.message());
        } else {
            std::make_shared<HttpConnection>(std::move(socket), self)->run();
            self->reap_threads(false);
        }
        self->accept();
    });
}

Gateway::Gateway(GatewayConfig config) {
    config.validate();
    impl_ = std::make_unique<Impl>(std::move(config));
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
    auto& im = *impl_;
    {
        std::lock_guard lock(im.mutex);
        if (im.running || im.stopped) return;
        im.running = true;
    }
    tcp::endpoint ep(net::ip::make_address(im.config.bindAddress), static_cast<unsigned short>(im.config.httpPort));
    im.acceptor.emplace(im.ioc);
    im.acceptor->open(ep.protocol());
    im.acceptor->set_option(net::socket_base::reuse_address(true));
    im.acceptor->bind(ep);
    im.acceptor->listen(net::socket_base::max_listen_connections);
    im.boundPort = im.acceptor->local_endpoint().port();
    im.work.emplace(net::make_work_guard(im.ioc));
    im.accept();
    for (int i = 0; i < im.config.ioThreads; ++i) im.ioThreads.emplace_back([this] { impl_->ioc.run(); });
    spdlog::info("mirroring {} on http://{}:{}/", im.config.targetUrl, im.config.bindAddress, im.boundPort);
}

void Gateway::stop() {
    if (!impl_) return;
    auto& im = *impl_;
    std::vector<std::shared_ptr<Slot>> all;
    {
        std::lock_guard lock(im.mutex);
        if (im.stopped) return;
        im.stopped = true;
        for (auto& [_, s] : im.slots) all.push_back(s);
    }
    if (im.acceptor) {
        net::post(im.ioc, [&im] {
            beast::error_code ec;
            im.acceptor->close(ec);
        });
    }
    for (auto& s : all) im.end_session(s, "server shutting down");
    im.reap_threads(true);
    im.work.reset();
    // Give pending close handshakes a moment, then force the loop down.
    for (int i = 0; i < 20 && !im.ioc.stopped(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    im.ioc.stop();
    for (auto& t : im.ioThreads)
        if (t.joinable()) t.join();
    im.ioThreads.clear();
    im.stoppedCv.notify_all();
}

void Gateway::wait() {
    std::unique_lock lock(impl_->mutex);
    impl_->stoppedCv.wait(lock, [&] { return impl_->stopped; });
}

unsigned short Gateway::port() const { return impl_->boundPort; }
const GatewayConfig& Gateway::config() const { return impl_->config; }
mimicry::FaviconCache& Gateway::icons() { return impl_->icons; }
HttpResponse Gateway::handle_get(std::string_view target) { return impl_->handle_get(target); }

std::size_t Gateway::active_sessions() const {
    std::lock_guard lock(impl_->mutex);
    std::size_t n = 0;
    for (const auto& [_, s] : impl_->slots) n += s->launched && !s->finished;
    return n;
}

namespace {

SessionInfo info_of(const Slot& s) {
    SessionInfo info;
    info.token = s.token;
    info.open = s.launched && !s.finished;
    info.closeReason = s.closeReason;
    info.diagnostics = s.finished ? s.lastDiag : s.session ? s.session->diagnostics() : SessionDiagnostics{};
    return info;
}

}  // namespace

std::optional<SessionInfo> Gateway::session(const std::string& token) const {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->slots.find(token);
    if (it == impl_->slots.end()) return std::nullopt;
    return info_of(*it->second);
}

std::vector<SessionInfo> Gateway::sessions() const {
    std::lock_guard lock(impl_->mutex);
    std::vector<SessionInfo> out;
    for (const auto& [_, s] : impl_->slots)
        if (s->launched) out.push_back(info_of(*s));
    return out;
}

}  // namespace mirrorcast::gateway
