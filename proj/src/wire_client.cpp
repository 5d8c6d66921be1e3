#include "mirrorcast/wire_client.hpp"

#include "mirrorcast/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>
#include <regex>
#include <thread>

namespace mirrorcast {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

HttpResult http_get(const std::string& host, unsigned short port, const std::string& target) {
    net::io_context ioc;
    beast::tcp_stream stream(ioc);
    tcp::resolver resolver(ioc);
    stream.connect(resolver.resolve(host, std::to_string(port)));
    http::request<http::empty_body> req(http::verb::get, target, 11);
    req.set(http::field::host, host);
    req.keep_alive(false);
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response_parser<http::string_body> parser;
    parser.body_limit(64 << 20);
    http::read(stream, buf, parser);
    auto& res = parser.get();
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {static_cast<int>(res.result_int()), std::string(res[http::field::content_type]), res.body()};
}

namespace {

using Ws = websocket::stream<beast::tcp_stream>;

void handshake(Ws& ws, tcp::resolver::results_type endpoints, const std::string& host, const std::string& target) {
    beast::get_lowest_layer(ws).connect(endpoints);
    ws.read_message_max(256 << 20);
    ws.handshake(host, target);
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
}

}  // namespace

struct WireClient::Impl {
    net::io_context ioc;
    Ws view{ioc};
    Ws cmd{ioc};
    beast::flat_buffer viewBuf;
    beast::flat_buffer cmdBuf;
    std::thread thread;
    std::string token;
    wire::SequenceCounter outSeq;
    wire::FrameReader viewReader;
    wire::FrameReader cmdReader;
    std::deque<std::shared_ptr<wire::Frame>> outbox;
    bool closing = false;

    std::mutex mutex;
    std::condition_variable cv;
    std::deque<wire::EnrichedView> views;
    std::deque<wire::ProtocolError> errors;
    bool viewOpen = true;
    bool cmdOpen = true;
    std::string failure;

    void read_view() {
        view.async_read(viewBuf, [this](beast::error_code ec, std::size_t) {
            if (ec) return mark_closed(true);
            try {
                auto bytes = viewBuf.cdata();
                std::vector<std::uint8_t> data(net::buffers_begin(bytes), net::buffers_end(bytes));
                viewBuf.consume(viewBuf.size());
                auto msg = viewReader.read(data, view.got_binary() ? wire::FrameType::Binary : wire::FrameType::Text);
                std::lock_guard lock(mutex);
                views.push_back(std::get<wire::EnrichedView>(std::move(msg.body)));
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                failure = e.what();
            }
            cv.notify_all();
            read_view();
        });
    }

    void read_cmd() {
        cmd.async_read(cmdBuf, [this](beast::error_code ec, std::size_t) {
            if (ec) return mark_closed(false);
            try {
                auto bytes = cmdBuf.cdata();
                std::vector<std::uint8_t> data(net::buffers_begin(bytes), net::buffers_end(bytes));
                cmdBuf.consume(cmdBuf.size());
                auto msg = cmdReader.read(data, cmd.got_binary() ? wire::FrameType::Binary : wire::FrameType::Text);
                if (auto* err = std::get_if<wire::ProtocolError>(&msg.body)) {
                    std::lock_guard lock(mutex);
                    errors.push_back(*err);
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                failure = e.what();
            }
            cv.notify_all();
            read_cmd();
        });
    }

    void mark_closed(bool isView) {
        {
            std::lock_guard lock(mutex);
            (isView ? viewOpen : cmdOpen) = false;
        }
        cv.notify_all();
    }

    // Runs on the I/O thread.
    void write_next() {
        auto f = outbox.front();
        cmd.text(f->type == wire::FrameType::Text);
        cmd.async_write(net::buffer(f->bytes), [this, f](beast::error_code ec, std::size_t) {
            outbox.pop_front();
            if (ec) {
                outbox.clear();
                return;
            }
            if (!outbox.empty()) write_next();
        });
    }

    void enqueue(wire::Frame frame) {
        auto f = std::make_shared<wire::Frame>(std::move(frame));
        net::post(ioc, [this, f] {
            if (closing) return;
            outbox.push_back(f);
            if (outbox.size() == 1) write_next();
        });
    }
};

WireClient::WireClient() : impl_(std::make_unique<Impl>()) {}

WireClient::~WireClient() { close(); }

std::unique_ptr<WireClient> WireClient::connect(const std::string& host, unsigned short port, const std::string& path,
                                                wire::Viewport viewport) {
    HttpResult boot = http_get(host, port, path);
    static const std::regex tokenRe("\"token\":\"([0-9a-f]+)\"");
    std::smatch m;
    if (boot.status != 200 || !std::regex_search(boot.body, m, tokenRe))
        throw Error(ErrorCode::SessionLost, "bootstrap page for " + path + " carried no session token");
    std::unique_ptr<WireClient> c(new WireClient());
    auto& im = *c->impl_;
    im.token = m[1];
    tcp::resolver resolver(im.ioc);
    auto endpoints = resolver.resolve(host, std::to_string(port));
    const std::string hostHeader = host + ":" + std::to_string(port);
    handshake(im.view, endpoints, hostHeader, "/__ws/view?t=" + im.token);
    handshake(im.cmd, endpoints, hostHeader, "/__ws/cmd?t=" + im.token);
    im.read_view();
    im.read_cmd();
    im.enqueue(wire::encode(wire::make_message(im.outSeq.next(), wire::Hello{viewport, path})));
    im.thread = std::thread([&im] { im.ioc.run(); });
    return c;
}

const std::string& WireClient::token() const { return impl_->token; }

std::uint64_t WireClient::send(const wire::InputEvent& event) {
    std::uint64_t seq = impl_->outSeq.next();
    impl_->enqueue(wire::encode(wire::make_message(seq, event)));
    return seq;
}

void WireClient::send_raw(const std::string& text) {
    wire::Frame f;
    f.type = wire::FrameType::Text;
    f.bytes.assign(text.begin(), text.end());
    impl_->enqueue(std::move(f));
}

std::optional<wire::EnrichedView> WireClient::next_view(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mutex);
    impl_->cv.wait_for(lock, timeout, [&] { return !impl_->views.empty() || !impl_->viewOpen; });
    if (impl_->views.empty()) return std::nullopt;
    auto v = std::move(impl_->views.front());
    impl_->views.pop_front();
    return v;
}

wire::EnrichedView WireClient::expect_view(std::chrono::milliseconds timeout) {
    if (auto v = next_view(timeout)) return std::move(*v);
    std::lock_guard lock(impl_->mutex);
    std::string why = !impl_->errors.empty() ? impl_->errors.front().code + ": " + impl_->errors.front().message
                      : !impl_->failure.empty() ? impl_->failure
                      : impl_->viewOpen         ? std::string("timed out waiting for a view")
                                                : std::string("view channel closed");
    throw Error(ErrorCode::SessionLost, why);
}

std::optional<wire::ProtocolError> WireClient::next_error(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mutex);
    impl_->cv.wait_for(lock, timeout, [&] { return !impl_->errors.empty() || !impl_->cmdOpen; });
    if (impl_->errors.empty()) return std::nullopt;
    auto e = impl_->errors.front();
    impl_->errors.pop_front();
    return e;
}

bool WireClient::view_closed() const {
    std::lock_guard lock(impl_->mutex);
    return !impl_->viewOpen;
}

bool WireClient::wait_closed(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mutex);
    return impl_->cv.wait_for(lock, timeout, [&] { return !impl_->viewOpen; });
}

void WireClient::close() {
    auto& im = *impl_;
    if (!im.thread.joinable()) return;
    net::post(im.ioc, [&im] {
        im.closing = true;
        auto closeOne = [](Ws& ws) {
            if (ws.is_open()) ws.async_close(websocket::close_code::normal, [](beast::error_code) {});
        };
        closeOne(im.view);
        closeOne(im.cmd);
    });
    {
        std::unique_lock lock(im.mutex);
        im.cv.wait_for(lock, std::chrono::seconds(3), [&] { return !im.viewOpen && !im.cmdOpen; });
    }
    im.ioc.stop();
    im.thread.join();
}

}  // namespace mirrorcast
