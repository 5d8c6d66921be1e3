#include "browser_env.hpp"

#include "mirrorcast/image.hpp"

#include <fstream>

using namespace mirrorcast;
using namespace browser_env;

namespace {

// Zombies awaiting a reaper in the container do not count as running.
bool alive(int pid) {
    std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
    std::string line;
    if (!std::getline(stat, line)) return false;
    auto close = line.rfind(')');
    return close != std::string::npos && close + 2 < line.size() && line[close + 2] != 'Z';
}

}  // namespace

TEST(WebdriverKey, MapsNamedKeys) {
    EXPECT_EQ(driver::webdriver_key("a"), "a");
    EXPECT_EQ(driver::webdriver_key("é"), "é");
    EXPECT_EQ(driver::webdriver_key("Enter"), "\xee\x80\x87");      // U+E007
    EXPECT_EQ(driver::webdriver_key("Backspace"), "\xee\x80\x83");  // U+E003
    EXPECT_EQ(driver::webdriver_key("Tab"), "\xee\x80\x84");        // U+E004
    EXPECT_FALSE(driver::webdriver_key("NoSuchKey"));
    EXPECT_FALSE(driver::webdriver_key(""));
}

TEST(Driver, CapturesStaticPage) {
    auto s = open("/static/");
    auto snap = s->capture_snapshot();
    EXPECT_EQ(snap.title, "Fixture One");
    EXPECT_EQ(snap.currentUrl, server().url("/static/"));
    EXPECT_EQ(snap.faviconUrl, server().url("/static/favicon.ico"));
    EXPECT_FALSE(snap.loadFailed);
    EXPECT_EQ(snap.cspViolations, 0);
    auto dims = image::png_dimensions(snap.screenshot);
    ASSERT_TRUE(dims);
    EXPECT_EQ(dims->first, snap.imageWidth);
    EXPECT_EQ(dims->second, snap.imageHeight);
    EXPECT_EQ(snap.imageWidth, 1280);
    EXPECT_GE(snap.imageHeight, 720);
    auto raster = image::decode_png(snap.screenshot);
    ASSERT_TRUE(raster);
    EXPECT_FALSE(image::is_uniform(*raster));
}

TEST(Driver, FullPageCaptureOfTallPage) {
    auto s = open("/tall/");
    auto snap = s->capture_snapshot();
    EXPECT_GE(snap.fullPageHeight, 3000);
    EXPECT_EQ(snap.imageHeight, snap.fullPageHeight);
    EXPECT_EQ(image::png_dimensions(snap.screenshot)->second, snap.imageHeight);
}

TEST(Driver, HistoryFollowsNavigation) {
    auto s = open("/multipage/");
    s->sync_history();
    EXPECT_EQ(s->history().back, 0);
    s->navigate(server().url("/multipage/p2.html"));
    s->navigate(server().url("/multipage/p3.html"));
    EXPECT_EQ(s->history().back, 2);
    s->history_back();
    EXPECT_EQ(s->current_url(), server().url("/multipage/p2.html"));
    EXPECT_EQ(s->history().forward, 1);
    s->history_forward();
    EXPECT_EQ(s->current_url(), server().url("/multipage/p3.html"));
    try {
        s->history_forward();
        FAIL() << "forward past the newest entry";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HistoryEmpty);
    }
}

TEST(Driver, UnreachableTargetFailsNavigation) {
    auto s = open("/static/");
    try {
        s->navigate("http://127.0.0.1:9/");
        FAIL() << "navigation to a closed port succeeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NavigationFailed);
    }
    EXPECT_TRUE(s->capture_snapshot().loadFailed);
}

TEST(Driver, ClickThenKeysTypeIntoField) {
    auto s = open("/login/");
    auto els = composer::extract_elements(*s);
    const wire::UIElementDescriptor* user = nullptr;
    for (const auto& e : els)
        if (e.kind == wire::ElementKind::TextBox && !user) user = &e;
    ASSERT_TRUE(user);
    auto [x, y] = center(*user);
    s->inject_click(x, y);
    std::vector<std::string> keys{"J", "o", "h", "n", "x", "Backspace"};
    s->inject_keys(keys);
    EXPECT_EQ(s->execute_script("return document.getElementById('user').value;"), "John");
    EXPECT_EQ(s->execute_script("return document.activeElement.id;"), "user");
}

TEST(Driver, DragMovesSlider) {
    auto s = open("/slider/");
    EXPECT_EQ(s->execute_script("return window.__slider;"), 30);
    // Track spans x 40..540 at y 120..132; value 30 sits at x 190.
    s->inject_drag(191, 126, 440, 126);
    EXPECT_EQ(s->execute_script("return window.__slider;"), 80);
}

TEST(Driver, ClickBelowTheFoldScrollsFirst) {
    auto s = open("/tall/");
    auto els = composer::extract_elements(*s);
    const wire::UIElementDescriptor* bottom = nullptr;
    for (const auto& e : els)
        if (e.y > 2000 && e.kind == wire::ElementKind::Button) bottom = &e;
    ASSERT_TRUE(bottom);
    auto [x, y] = center(*bottom);
    s->inject_click(x, y);
    EXPECT_EQ(s->execute_script("return document.getElementById('msg').textContent;"), "Bottom button pressed.");
}

TEST(Driver, CloseReapsDriverAndBrowser) {
    const auto paths = driver::BrowserPaths::discover();
    const auto before = driver::processes_running(paths.chromedriver).size();
    auto s = open("/static/");
    const int browser = s->browser_pid();
    EXPECT_GT(driver::processes_running(paths.chromedriver).size(), before);
    s->close();
    s->close();
    EXPECT_EQ(driver::processes_running(paths.chromedriver).size(), before);
    if (browser > 0) EXPECT_FALSE(alive(browser));
    try {
        s->capture_snapshot();
        FAIL() << "capture on a closed session";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StaleSession);
    }
}
