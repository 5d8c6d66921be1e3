#include "browser_env.hpp"

#include "mirrorcast/gateway.hpp"
#include "mirrorcast/wire_client.hpp"

#include <thread>

using namespace mirrorcast;
using namespace browser_env;
using namespace std::chrono_literals;
using wire::ElementKind;
using wire::InputEvent;
namespace fs = std::filesystem;

namespace {

class GatewayTest : public ::testing::Test {
protected:
    void SetUp() override { storage = fs::temp_directory_path() / ("mc-gw-" + std::to_string(::getpid())); }
    void TearDown() override {
        if (gw) gw->stop();
        fs::remove_all(storage);
    }

    void start(int timeoutS = 60, const std::string& path = "/static/") {
        gateway::GatewayConfig c;
        c.targetUrl = server().url(path);
        c.bindAddress = "127.0.0.1";
        c.httpPort = 0;
        c.quiescenceMs = 50;
        c.sessionTimeoutS = timeoutS;
        c.storageDir = storage;
        gw = std::make_unique<gateway::Gateway>(c);
        gw->start();
    }

    std::unique_ptr<WireClient> connect(const std::string& path = "/") {
        return WireClient::connect("127.0.0.1", gw->port(), path);
    }

    bool wait_idle(std::chrono::milliseconds limit = 20s) {
        auto until = std::chrono::steady_clock::now() + limit;
        while (gw->active_sessions() > 0 && std::chrono::steady_clock::now() < until) std::this_thread::sleep_for(20ms);
        return gw->active_sessions() == 0;
    }

    fs::path storage;
    std::unique_ptr<gateway::Gateway> gw;
};

}  // namespace

TEST_F(GatewayTest, ClientsGetIndependentSessions) {
    start();
    auto a = connect();
    auto b = connect();
    EXPECT_NE(a->token(), b->token());
    auto va = a->expect_view();
    auto vb = b->expect_view();
    EXPECT_EQ(va.sequence, 1u);
    EXPECT_EQ(vb.sequence, 1u);
    EXPECT_EQ(gw->active_sessions(), 2u);

    auto about = find(va.elements, ElementKind::Hyperlink, "About");
    ASSERT_TRUE(about);
    a->send(InputEvent::navigate(about->href));
    auto va2 = a->expect_view();
    EXPECT_EQ(va2.sequence, 2u);
    EXPECT_EQ(va2.displayPath, "/static/about.html");
    // The other viewer saw nothing.
    EXPECT_FALSE(b->next_view(500ms));

    auto ia = gw->session(a->token());
    ASSERT_TRUE(ia);
    EXPECT_TRUE(ia->open);
    EXPECT_EQ(ia->diagnostics.eventsSubmitted, 1u);
    a->close();
    b->close();
    EXPECT_TRUE(wait_idle());
    EXPECT_EQ(gw->session(a->token())->closeReason.find("channel closed") != std::string::npos, true);
}

TEST_F(GatewayTest, DeepLinkStartsAtPath) {
    start();
    auto c = connect("/static/contact.html?x=1");
    EXPECT_EQ(c->expect_view().displayPath, "/static/contact.html?x=1");
}

TEST_F(GatewayTest, MalformedFrameEndsSession) {
    start();
    auto c = connect();
    c->expect_view();
    c->send_raw("{this is not json");
    auto err = c->next_error(10s);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->code, "MalformedFrame");
    EXPECT_TRUE(c->wait_closed(20s));
    EXPECT_TRUE(wait_idle());
    EXPECT_NE(gw->session(c->token())->closeReason.find("protocol violation"), std::string::npos);
}

TEST_F(GatewayTest, SequenceGapEndsSession) {
    start();
    auto c = connect();
    c->expect_view();
    // Hello was 1; jump straight to 5.
    c->send_raw(R"({"body":{"t":0,"x":1.0,"y":1.0},"ch":"cmd","kind":"click","seq":5,"v":1})");
    auto err = c->next_error(10s);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->code, "SequenceGap");
    EXPECT_TRUE(c->wait_closed(20s));
}

TEST_F(GatewayTest, ServerOnlyKindFromViewerEndsSession) {
    start();
    auto c = connect();
    c->expect_view();
    c->send_raw(R"({"body":{"code":"x","message":"y"},"ch":"cmd","kind":"error","seq":2,"v":1})");
    auto err = c->next_error(10s);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->code, "InvalidMessage");
    EXPECT_TRUE(c->wait_closed(20s));
}

TEST_F(GatewayTest, IdleSessionTimesOut) {
    start(1);
    auto c = connect();
    c->expect_view();
    EXPECT_TRUE(c->wait_closed(15s));
    EXPECT_TRUE(wait_idle());
    EXPECT_EQ(gw->session(c->token())->closeReason, "idle timeout");
}

TEST_F(GatewayTest, DisconnectMidReplayReapsBrowser) {
    const auto paths = driver::BrowserPaths::discover();
    const auto before = driver::processes_running(paths.chromedriver).size();
    start();
    auto c = connect();
    c->expect_view();
    for (int i = 0; i < 20; ++i) c->send(InputEvent::navigate(i % 2 ? "/static/about.html" : "/static/contact.html"));
    c->close();
    EXPECT_TRUE(wait_idle(60s));
    EXPECT_EQ(driver::processes_running(paths.chromedriver).size(), before);
    // Everything that arrived was still recorded, and the archive is sealed.
    auto info = gw->session(c->token());
    ASSERT_TRUE(info);
    auto archive = recorder::read_archive(storage / info->diagnostics.recordingId);
    EXPECT_TRUE(archive.meta.closed);
    EXPECT_EQ(archive.events.size(), info->diagnostics.eventsSubmitted);
    for (std::size_t i = 0; i < archive.events.size(); ++i) EXPECT_EQ(archive.events[i].sequence, i + 2);
}

TEST_F(GatewayTest, StopClosesLiveSessions) {
    const auto paths = driver::BrowserPaths::discover();
    const auto before = driver::processes_running(paths.chromedriver).size();
    start();
    auto c = connect();
    c->expect_view();
    gw->stop();
    EXPECT_TRUE(c->wait_closed(10s));
    EXPECT_EQ(gw->active_sessions(), 0u);
    EXPECT_EQ(driver::processes_running(paths.chromedriver).size(), before);
}

TEST_F(GatewayTest, ServesIconsAndBootstrapOverHttp) {
    start();
    auto page = http_get("127.0.0.1", gw->port(), "/anything?x=1");
    EXPECT_EQ(page.status, 200);
    EXPECT_NE(page.body.find("/__ws/view?t="), std::string::npos);
    auto c = connect();
    auto v = c->expect_view();
    auto icon = http_get("127.0.0.1", gw->port(), v.faviconPath);
    EXPECT_EQ(icon.status, 200);
    EXPECT_EQ(std::vector<std::uint8_t>(icon.body.begin(), icon.body.end()), server().file_bytes("/static/favicon.ico"));
    EXPECT_EQ(http_get("127.0.0.1", gw->port(), "/__ws/cmd?t=nope").status, 404);
}
