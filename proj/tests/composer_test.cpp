#include "browser_env.hpp"

#include "mirrorcast/image.hpp"

#include <cmath>

using namespace mirrorcast;
using namespace browser_env;
using wire::ElementKind;

namespace {

ElementKind kind_of(const std::string& k) {
    return k == "textbox" ? ElementKind::TextBox : k == "button" ? ElementKind::Button : ElementKind::Hyperlink;
}

}  // namespace

// Geometry must match the authored CSS boxes of the layout page within 1px.
TEST(Composer, ElementBoxesMatchAuthoredLayout) {
    auto site = fixtures::load_site(fixtures::default_root() / "login");
    const auto& layout = site.raw.at("layout");
    auto s = open(layout.at("page").get<std::string>());
    auto els = composer::extract_elements(*s);
    const auto& expected = layout.at("elements");
    ASSERT_EQ(els.size(), expected.size());
    for (std::size_t i = 0; i < els.size(); ++i) {
        const auto& e = expected[i];
        SCOPED_TRACE(i);
        EXPECT_EQ(els[i].kind, kind_of(e.at("kind")));
        EXPECT_LE(std::abs(els[i].x - e.at("x").get<double>()), 1.0);
        EXPECT_LE(std::abs(els[i].y - e.at("y").get<double>()), 1.0);
        EXPECT_LE(std::abs(els[i].width - e.at("w").get<double>()), 1.0);
        EXPECT_LE(std::abs(els[i].height - e.at("h").get<double>()), 1.0);
    }
}

TEST(Composer, LandingElementCountsMatchManifests) {
    for (const auto& site : fixtures::load_sites(fixtures::default_root())) {
        SCOPED_TRACE(site.name);
        auto s = open(site.entry);
        auto els = composer::extract_elements(*s);
        std::map<std::string, int> counts{{"textbox", 0}, {"button", 0}, {"link", 0}};
        for (const auto& e : els) ++counts[std::string(wire::tag(e.kind))];
        for (const auto& [k, n] : site.landingElements) EXPECT_EQ(counts[k], n) << k;
        auto snap = s->capture_snapshot();
        EXPECT_EQ(snap.title, site.title);
    }
}

TEST(Composer, ViewRewritesLinksAndDeduplicates) {
    auto s = open("/static/");
    composer::ViewComposer c(origin());
    auto snap = s->capture_snapshot();
    auto v1 = c.compose(snap, composer::extract_elements(*s), s->history(), 1, "/__icon/x");
    EXPECT_NO_THROW(wire::validate(v1));
    EXPECT_EQ(v1.displayPath, "/static/");
    EXPECT_EQ(v1.pageTitle, "Fixture One");
    EXPECT_FALSE(v1.reuseImage);
    int links = 0;
    for (const auto& e : v1.elements) {
        if (e.kind != ElementKind::Hyperlink || e.href.empty()) continue;
        ++links;
        EXPECT_EQ(e.href.front(), '/') << e.href;
        EXPECT_FALSE(e.href.starts_with("//"));
    }
    EXPECT_EQ(links, 6);
    auto about = find(v1.elements, ElementKind::Hyperlink, "About (tracked)");
    ASSERT_TRUE(about);
    EXPECT_EQ(about->href, "/static/about.html?ref=home");
    auto partner = find(v1.elements, ElementKind::Hyperlink, "Partner site");
    ASSERT_TRUE(partner);
    EXPECT_EQ(resolve_proxy_path(partner->href, origin()), server().alt_origin() + "/static/partner.html");

    auto v2 = c.compose(s->capture_snapshot(), composer::extract_elements(*s), s->history(), 2, "/__icon/x");
    EXPECT_TRUE(v2.reuseImage);
    EXPECT_TRUE(v2.screenshot.empty());
    c.reset();
    auto v3 = c.compose(s->capture_snapshot(), composer::extract_elements(*s), s->history(), 3, "/__icon/x");
    EXPECT_FALSE(v3.reuseImage);
}

TEST(Composer, UnicodeTitleIsKept) {
    auto s = open("/static/unicode.html");
    composer::ViewComposer c(origin());
    auto v = c.compose(s->capture_snapshot(), {}, s->history(), 1, "/__icon/x");
    EXPECT_EQ(v.pageTitle, "Ünïcødé 日本語 Ελληνικά Привет");
    auto f = wire::encode(wire::make_message(v));
    EXPECT_EQ(std::get<wire::EnrichedView>(wire::decode(f.bytes, f.type).body).pageTitle, v.pageTitle);
}

TEST(Composer, ElementsBeyondCaptureAreClipped) {
    composer::ViewComposer c(origin());
    driver::PageSnapshot snap;
    snap.imageWidth = 100;
    snap.imageHeight = 100;
    snap.screenshot = image::encode_png({100, 100, std::vector<std::uint8_t>(100 * 100 * 4, 255)});
    snap.currentUrl = server().url("/x");
    std::vector<wire::UIElementDescriptor> els = {
        {"a", ElementKind::Button, 90, 90, 20, 20, "edge", "", false},
        {"b", ElementKind::Button, 150, 10, 20, 20, "gone", "", false},
    };
    auto v = c.compose(snap, els, {}, 1, "/__icon/x");
    ASSERT_EQ(v.elements.size(), 1u);
    EXPECT_EQ(v.elements[0].width, 10);
    EXPECT_NO_THROW(wire::validate(v));
}
