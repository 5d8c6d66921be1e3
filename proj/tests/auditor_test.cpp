#include "browser_env.hpp"

#include "mirrorcast/auditor.hpp"

using namespace mirrorcast;
using namespace mirrorcast::auditor;
using namespace browser_env;

namespace {

auditor::SiteAudit audit(const std::string& name) {
    auto site = fixtures::load_site(fixtures::default_root() / name);
    AuditOptions o;
    o.quiescenceMs = 100;
    return audit_site(server().url(site.entry), o, &site);
}

std::string describe(const auditor::SiteAudit& a) {
    std::string s = to_text(a.report) + "\n";
    for (const auto& c : a.assessments)
        s += "  " + std::string(to_string(c.state)) + " '" + c.element.text + "': " + c.note + "\n";
    for (const auto& n : a.notes) s += "  note: " + n + "\n";
    return s;
}

}  // namespace

TEST(Auditor, StaticSiteHasNoDropOuts) {
    auto a = audit("static");
    EXPECT_EQ(a.report.clickableCount, 12) << describe(a);
    EXPECT_EQ(a.report.count(State::DropOut), 0) << describe(a);
    EXPECT_EQ(a.report.count(State::Works), 12) << describe(a);
    EXPECT_TRUE(a.notes.empty()) << describe(a);
    EXPECT_FALSE(a.report.phishSuccess);
}

TEST(Auditor, LoginSiteIsPhished) {
    auto a = audit("login");
    EXPECT_EQ(a.report.clickableCount, 8) << describe(a);
    EXPECT_EQ(a.report.count(State::Works), 8) << describe(a);
    EXPECT_EQ(a.report.count(State::CspBlocked), 0) << describe(a);
    ASSERT_TRUE(a.report.phishSuccess);
    EXPECT_TRUE(*a.report.phishSuccess);
}

TEST(Auditor, FaultySiteHasBrokenClickables) {
    auto a = audit("faults");
    EXPECT_EQ(a.report.clickableCount, 10) << describe(a);
    EXPECT_EQ(a.report.count(State::Works), 8) << describe(a);
    EXPECT_EQ(a.report.count(State::Broken), 2) << describe(a);
    EXPECT_DOUBLE_EQ(*a.report.successRate, 0.8);
}

TEST(Auditor, LandingEnumerationMatchesManifest) {
    for (const auto& site : fixtures::load_sites(fixtures::default_root())) {
        SCOPED_TRACE(site.name);
        gateway::GatewayConfig c;
        c.targetUrl = server().url(site.entry);
        c.bindAddress = "127.0.0.1";
        c.httpPort = 0;
        c.storageDir = std::filesystem::temp_directory_path() / "mc-audit-enum";
        gateway::Gateway gw(c);
        gw.start();
        Auditor auditor(gw, {});
        auto list = enumerate_clickables(auditor.landing(), {1280, 720});
        ASSERT_EQ(list.size(), site.clickables.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            EXPECT_EQ(wire::tag(list[i].kind), site.clickables[i].kind);
            EXPECT_EQ(list[i].text, site.clickables[i].text);
        }
        gw.stop();
        std::filesystem::remove_all(c.storageDir);
    }
}
