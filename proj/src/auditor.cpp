#include "mirrorcast/auditor.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/error.hpp"
#include "mirrorcast/image.hpp"
#include "mirrorcast/recorder.hpp"
#include "mirrorcast/url.hpp"
#include "mirrorcast/wire_client.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>
#include <thread>

namespace mirrorcast::auditor {

using wire::ElementKind;
using wire::UIElementDescriptor;

std::string_view to_string(State state) {
    switch (state) {
        case State::Works: return "works";
        case State::VisualGlitch: return "visual_glitch";
        case State::Broken: return "broken";
        case State::CspBlocked: return "csp_blocked";
        case State::DropOut: return "drop_out";
    }
    return "?";
}

std::vector<UIElementDescriptor> enumerate_clickables(const wire::EnrichedView& view, wire::Viewport viewport) {
    std::vector<UIElementDescriptor> out;
    for (const auto& d : view.elements) {
        if (d.kind == ElementKind::TextBox) continue;
        if (d.y >= viewport.height || d.x >= viewport.width) continue;
        out.push_back(d);
    }
    return out;
}

AuditReport report(std::string site, const std::vector<ClickableAssessment>& assessments,
                   std::optional<bool> phishSuccess) {
    AuditReport r;
    r.site = std::move(site);
    r.clickableCount = static_cast<int>(assessments.size());
    for (const auto& a : assessments) ++r.counts[static_cast<std::size_t>(a.state)];
    if (r.clickableCount > 0)
        r.successRate = static_cast<double>(r.count(State::Works) + r.count(State::VisualGlitch)) / r.clickableCount;
    r.phishSuccess = phishSuccess;
    return r;
}

namespace {

std::string rate_text(const std::optional<double>& rate) {
    if (!rate) return "n/a";
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << *rate;
    return s.str();
}

std::string phish_text(const std::optional<bool>& p) { return p ? (*p ? "yes" : "no") : "n/a"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

bool proxy_local(const std::string& path) { return !path.empty() && path[0] == '/' && !path.starts_with("//"); }

std::string path_only(const std::string& p) { return p.substr(0, p.find_first_of("?#")); }

}  // namespace

std::string to_text(const AuditReport& r) {
    std::ostringstream s;
    s << r.site << ": " << r.clickableCount << " clickables, works/glitch/broken " << r.count(State::Works) << "/"
      << r.count(State::VisualGlitch) << "/" << r.count(State::Broken) << ", csp/drop-out "
      << r.count(State::CspBlocked) << "/" << r.count(State::DropOut) << ", phish " << phish_text(r.phishSuccess)
      << ", success rate " << rate_text(r.successRate);
    return s.str();
}

std::string csv_header() { return "site,clickables,works,visual_glitch,broken,csp_blocked,drop_out,phish_success,success_rate"; }

std::string to_csv_row(const AuditReport& r) {
    std::ostringstream s;
    s << csv_field(r.site) << ',' << r.clickableCount;
    for (State st : kStates) s << ',' << r.count(st);
    s << ',' << phish_text(r.phishSuccess) << ',' << rate_text(r.successRate);
    return s.str();
}

Auditor::Auditor(gateway::Gateway& gw, AuditOptions options) : gw_(gw), options_(std::move(options)) {}

void Auditor::wait_idle() {
    const auto limit = std::chrono::steady_clock::now() + std::chrono::seconds(15);
    while (gw_.active_sessions() > 0 && std::chrono::steady_clock::now() < limit)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
}

wire::EnrichedView Auditor::landing() {
    auto client = WireClient::connect("127.0.0.1", gw_.port(), "/", options_.viewport);
    auto view = client->expect_view(options_.viewTimeout);
    client->close();
    wait_idle();
    return view;
}

namespace {

// Screenshot of the same action performed in a browser without the proxy.
std::optional<image::Raster> reference_capture(const std::string& targetUrl, const Url& origin,
                                               const UIElementDescriptor& el, const AuditOptions& options) {
    auto session = driver::DriverSession::open(targetUrl, options.viewport, false, options.driver);
    if (!el.href.empty()) {
        auto target = resolve_proxy_path(el.href, origin);
        if (!target) return std::nullopt;
        try {
            session->navigate(*target);
        } catch (const Error&) {
        }
    } else {
        session->inject_click(el.x + el.width / 2, el.y + el.height / 2);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(options.quiescenceMs));
    for (int i = 0; i < 200 && !session->document_ready(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(25));
    auto snap = session->capture_snapshot();
    session->close();
    return image::decode_png(snap.screenshot);
}

}  // namespace

ClickableAssessment Auditor::assess(std::size_t index, const UIElementDescriptor& element,
                                    const fixtures::Clickable* expected) {
    ClickableAssessment a{element, State::Broken, ""};
    std::unique_ptr<WireClient> client;
    try {
        client = WireClient::connect("127.0.0.1", gw_.port(), "/", options_.viewport);
        const wire::EnrichedView landing = client->expect_view(options_.viewTimeout);
        auto list = enumerate_clickables(landing, options_.viewport);
        if (index >= list.size() || list[index].kind != element.kind || list[index].text != element.text) {
            a.note = "element not present in a fresh session";
        } else if (const auto& el = list[index]; !el.href.empty() && !proxy_local(el.href)) {
            a.state = State::DropOut;
            a.note = "href escapes the proxy: " + el.href;
        } else {
            a.element = el;
            client->send(!el.href.empty() ? wire::InputEvent::navigate(el.href)
                                          : wire::InputEvent::click(el.x + el.width / 2, el.y + el.height / 2));
            auto after = client->next_view(options_.viewTimeout);
            auto info = gw_.session(client->token());
            if (!after) {
                a.note = "no view after the action";
            } else if (!proxy_local(after->displayPath)) {
                a.state = State::DropOut;
                a.note = "left the proxy: " + after->displayPath;
            } else if (std::any_of(after->elements.begin(), after->elements.end(),
                                   [](const auto& d) { return !d.href.empty() && !proxy_local(d.href); })) {
                a.state = State::DropOut;
                a.note = "resulting page links out of the proxy";
            } else if (info && info->diagnostics.cspViolations > 0) {
                a.state = State::CspBlocked;
                a.note = std::to_string(info->diagnostics.cspViolations) + " CSP violation(s)";
            } else if (info && info->diagnostics.loadFailed) {
                a.note = "target unreachable";
            } else {
                std::optional<image::Raster> shot;
                if (!after->reuseImage) shot = image::decode_png(after->screenshot);
                const bool moved = after->displayPath != landing.displayPath;
                if (!after->reuseImage && !shot) {
                    a.note = "undecodable screenshot";
                } else if (shot && image::is_uniform(*shot)) {
                    a.note = "blank page";
                } else if (after->reuseImage && !moved) {
                    a.note = "no visible reaction";
                } else if (expected && expected->expect == "navigate" && !expected->path.empty() &&
                           after->displayPath != expected->path) {
                    a.note = "expected " + expected->path + ", reached " + after->displayPath;
                } else if (expected && expected->expect == "navigate" && !expected->pathPrefix.empty() &&
                           !after->displayPath.starts_with(expected->pathPrefix)) {
                    a.note = "expected a path under " + expected->pathPrefix + ", reached " + after->displayPath;
                } else if (expected && expected->expect == "change" && after->reuseImage) {
                    a.note = "no visible change";
                } else {
                    a.state = State::Works;
                    a.note = moved ? "reached " + after->displayPath : "page changed";
                    if (options_.visualCheck) {
                        auto proxied = shot ? shot : image::decode_png(landing.screenshot);
                        auto ref = reference_capture(gw_.config().targetUrl, *Url::parse(gw_.config().targetUrl), el,
                                                     options_);
                        if (proxied && ref) {
                            double diff = image::differing_fraction(*proxied, *ref, 8);
                            if (diff > options_.glitchThreshold) {
                                a.state = State::VisualGlitch;
                                a.note += ", " + std::to_string(diff * 100) + "% pixels differ from the reference";
                            }
                        }
                    }
                }
            }
        }
    } catch (const Error& e) {
        a.state = State::Broken;
        a.note = std::string("session lost: ") + e.what();
    }
    if (client) client->close();
    wait_idle();
    return a;
}

bool Auditor::check_login(const fixtures::LoginOracle& oracle) {
    auto client = WireClient::connect("127.0.0.1", gw_.port(), "/", options_.viewport);
    bool reached = false;
    try {
        auto view = client->expect_view(options_.viewTimeout);
        std::vector<UIElementDescriptor> boxes;
        const UIElementDescriptor* submit = nullptr;
        for (const auto& d : view.elements) {
            if (d.kind == ElementKind::TextBox) boxes.push_back(d);
            if (d.kind == ElementKind::Button && d.text == oracle.submit && !submit) submit = &d;
        }
        if (boxes.size() >= 2 && submit) {
            client->send(wire::InputEvent::text_changed(boxes[0].elementId, oracle.user));
            client->send(wire::InputEvent::text_changed(boxes[1].elementId, oracle.password));
            client->send(wire::InputEvent::click(submit->x + submit->width / 2, submit->y + submit->height / 2));
            const auto limit = std::chrono::steady_clock::now() + options_.viewTimeout;
            while (!reached && std::chrono::steady_clock::now() < limit) {
                auto v = client->next_view(std::chrono::milliseconds(500));
                if (v && path_only(v->displayPath) == oracle.successPath) reached = true;
                if (!v && client->view_closed()) break;
            }
        }
    } catch (const Error& e) {
        spdlog::warn("login check: {}", e.what());
    }
    const std::string token = client->token();
    client->close();
    wait_idle();
    if (!reached) return false;
    auto info = gw_.session(token);
    if (!info || info->diagnostics.recordingId.empty()) return false;
    try {
        auto archive = recorder::read_archive(gw_.config().storageDir / info->diagnostics.recordingId);
        bool user = false, pass = false;
        for (const auto& e : archive.events) {
            user = user || e.event.text == oracle.user;
            pass = pass || e.event.text == oracle.password;
        }
        return user && pass;
    } catch (const Error& e) {
        spdlog::warn("login check: {}", e.what());
        return false;
    }
}

SiteAudit audit_site(const std::string& targetUrl, const AuditOptions& options, const fixtures::Site* manifest) {
    namespace fs = std::filesystem;
    gateway::GatewayConfig cfg;
    cfg.targetUrl = targetUrl;
    cfg.bindAddress = "127.0.0.1";
    cfg.httpPort = 0;
    cfg.viewportDefault = options.viewport;
    cfg.quiescenceMs = options.quiescenceMs;
    cfg.sessionTimeoutS = 120;
    cfg.storageDir = fs::temp_directory_path() / ("mirrorcast-audit-" + codec::random_id());
    cfg.driver = options.driver;

    SiteAudit out;
    {
        gateway::Gateway gw(cfg);
        gw.start();
        Auditor auditor(gw, options);
        auto landing = auditor.landing();
        auto list = enumerate_clickables(landing, options.viewport);
        if (manifest) {
            if (list.size() != manifest->clickables.size())
                out.notes.push_back("manifest lists " + std::to_string(manifest->clickables.size()) +
                                    " clickables, the landing view has " + std::to_string(list.size()));
            for (std::size_t i = 0; i < std::min(list.size(), manifest->clickables.size()); ++i)
                if (list[i].text != manifest->clickables[i].text ||
                    wire::tag(list[i].kind) != manifest->clickables[i].kind)
                    out.notes.push_back("clickable " + std::to_string(i) + " is '" + list[i].text + "', manifest says '" +
                                        manifest->clickables[i].text + "'");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const fixtures::Clickable* expected =
                manifest && i < manifest->clickables.size() ? &manifest->clickables[i] : nullptr;
            out.assessments.push_back(auditor.assess(i, list[i], expected));
            spdlog::debug("{} [{}] {}: {}", targetUrl, i, to_string(out.assessments.back().state),
                          out.assessments.back().note);
        }
        std::optional<bool> phish;
        if (manifest && manifest->login) phish = auditor.check_login(*manifest->login);
        out.report = report(manifest ? manifest->name : targetUrl, out.assessments, phish);
        gw.stop();
    }
    std::error_code ec;
    fs::remove_all(cfg.storageDir, ec);
    return out;
}

}  // namespace mirrorcast::auditor
