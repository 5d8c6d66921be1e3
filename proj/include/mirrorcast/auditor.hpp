#pragma once

// Clickable-element audit through the proxy. Every top-level button and link
// of a site's landing view is exercised from a fresh session and put into
// one of five states.

#include "mirrorcast/fixtures.hpp"
#include "mirrorcast/gateway.hpp"
#include "mirrorcast/wire.hpp"

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace mirrorcast::auditor {

enum class State { Works, VisualGlitch, Broken, CspBlocked, DropOut };
inline constexpr std::array kStates{State::Works, State::VisualGlitch, State::Broken, State::CspBlocked, State::DropOut};

std::string_view to_string(State state);

struct ClickableAssessment {
    wire::UIElementDescriptor element;
    State state = State::Broken;
    std::string note;
};

struct AuditReport {
    std::string site;
    int clickableCount = 0;
    std::array<int, 5> counts{};  // indexed like kStates
    std::optional<double> successRate;  // empty when there is nothing to rate
    std::optional<bool> phishSuccess;

    int count(State s) const { return counts[static_cast<std::size_t>(s)]; }
    bool operator==(const AuditReport&) const = default;
};

/// Buttons and links of the landing view that intersect the initial viewport.
std::vector<wire::UIElementDescriptor> enumerate_clickables(const wire::EnrichedView& view, wire::Viewport viewport);

AuditReport report(std::string site, const std::vector<ClickableAssessment>& assessments,
                   std::optional<bool> phishSuccess = std::nullopt);

std::string to_text(const AuditReport& report);
std::string csv_header();
std::string to_csv_row(const AuditReport& report);

struct AuditOptions {
    wire::Viewport viewport{1280, 720};
    /// Compare each result against a direct-browser screenshot.
    bool visualCheck = false;
    double glitchThreshold = 0.005;
    std::chrono::milliseconds viewTimeout{30000};
    int quiescenceMs = 200;
    driver::DriverOptions driver;
};

/// Audits through a gateway that is already running in this process.
class Auditor {
public:
    Auditor(gateway::Gateway& gw, AuditOptions options);

    /// Landing view of a fresh session.
    wire::EnrichedView landing();

    /// Clicks (or follows) the index-th clickable of a fresh landing view.
    /// `expected`, when given, is what the manifest says should happen.
    ClickableAssessment assess(std::size_t index, const wire::UIElementDescriptor& element,
                               const fixtures::Clickable* expected = nullptr);

    /// Types the oracle's credentials, submits, and reports whether the
    /// success page was reached and the session log holds both values.
    bool check_login(const fixtures::LoginOracle& oracle);

private:
    void wait_idle();

    gateway::Gateway& gw_;
    AuditOptions options_;
};

struct SiteAudit {
    AuditReport report;
    std::vector<ClickableAssessment> assessments;
    std::vector<std::string> notes;  // manifest mismatches
};

/// Starts a loopback gateway for targetUrl, audits every clickable and stops it.
SiteAudit audit_site(const std::string& targetUrl, const AuditOptions& options,
                     const fixtures::Site* manifest = nullptr);

}  // namespace mirrorcast::auditor
