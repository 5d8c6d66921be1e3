// mirrorcast: serve a live mirror of one site, audit a site's clickables
// through the mirror, export recorded sessions, or serve the fixture corpus.

#include "mirrorcast/auditor.hpp"
#include "mirrorcast/error.hpp"
#include "mirrorcast/fixtures.hpp"
#include "mirrorcast/gateway.hpp"
#include "mirrorcast/recorder.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

using namespace mirrorcast;

namespace {

// Blocks SIGINT/SIGTERM in every thread and returns a waiter for them.
sigset_t block_stop_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

void wait_for_stop(sigset_t set) {
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("received signal {}, shutting down", sig);
}

wire::Viewport parse_viewport(const std::string& s) {
    auto x = s.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("viewport", "expected WIDTHxHEIGHT");
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Live screenshot mirror of a website, with session recording and a clickable audit"};
    app.require_subcommand(0, 1);

    gateway::GatewayConfig cfg;
    std::string viewport = "1280x720";
    std::string logLevel = "info";
    app.add_option("--target", cfg.targetUrl, "Absolute http(s) URL to mirror")->envname("MIRRORCAST_TARGET");
    app.add_option("--port", cfg.httpPort, "HTTP port (0 picks a free one)")
        ->envname("MIRRORCAST_PORT")->check(CLI::Range(0, 65535))->capture_default_str();
    app.add_option("--bind", cfg.bindAddress, "Listen address")->envname("MIRRORCAST_BIND")->capture_default_str();
    app.add_option("--quiescence-ms", cfg.quiescenceMs, "Idle time after the last input before capturing")
        ->envname("MIRRORCAST_QUIESCENCE_MS")->capture_default_str();
    app.add_flag("--ad-block", cfg.adBlock, "Load the content-blocker extension")->envname("MIRRORCAST_AD_BLOCK");
    app.add_flag("--record-screenshots", cfg.recordScreenshots, "Store every screenshot in the session archive")
        ->envname("MIRRORCAST_RECORD_SCREENSHOTS");
    app.add_option("--storage", cfg.storageDir, "Session archive directory")->envname("MIRRORCAST_STORAGE")
        ->capture_default_str();
    app.add_option("--session-timeout-s", cfg.sessionTimeoutS, "Close sessions idle this long")
        ->envname("MIRRORCAST_SESSION_TIMEOUT_S")->capture_default_str();
    app.add_option("--viewport", viewport, "Default viewport WIDTHxHEIGHT")->envname("MIRRORCAST_VIEWPORT")
        ->capture_default_str();
    app.add_option("--assets", cfg.assetsDir, "Viewer bundle served under /__app/")->envname("MIRRORCAST_ASSETS");
    app.add_option("--content-blocker", cfg.driver.contentBlockerPath, "Unpacked extension used by --ad-block")
        ->envname("MIRRORCAST_CONTENT_BLOCKER");
    app.add_option("--webdriver", cfg.driver.endpoint, "Use a running WebDriver server instead of spawning one")
        ->envname("MIRRORCAST_WEBDRIVER");
    app.add_option("--log-level", logLevel, "trace, debug, info, warn, error")->envname("MIRRORCAST_LOG_LEVEL")
        ->capture_default_str();

    auto* audit = app.add_subcommand("audit", "Exercise every top-level clickable through the mirror");
    std::string auditTarget, csvPath;
    bool auditFixtures = false;
    auditor::AuditOptions auditOpts;
    audit->add_option("--target", auditTarget, "Site to audit");
    audit->add_flag("--fixtures", auditFixtures, "Audit the bundled fixture corpus instead");
    audit->add_option("--csv", csvPath, "Write the report as CSV");
    audit->add_flag("--visual-check", auditOpts.visualCheck, "Compare against direct-browser screenshots");
    audit->add_option("--glitch-threshold", auditOpts.glitchThreshold, "Differing-pixel fraction for a visual glitch")
        ->capture_default_str();

    auto* exportCmd = app.add_subcommand("export", "Copy a closed session's archive");
    std::string sessionId, dest = ".";
    exportCmd->add_option("--storage", cfg.storageDir, "Session archive directory")->capture_default_str();
    exportCmd->add_option("--session", sessionId, "Session id")->required();
    exportCmd->add_option("--dest", dest, "Destination directory")->capture_default_str();

    auto* fixturesCmd = app.add_subcommand("fixtures", "Serve the fixture corpus on loopback");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(logLevel));

    try {
        cfg.viewportDefault = parse_viewport(viewport);
        auditOpts.viewport = cfg.viewportDefault;
        auditOpts.quiescenceMs = cfg.quiescenceMs;
        auditOpts.driver = cfg.driver;

        if (*exportCmd) {
            std::cout << recorder::export_session(cfg.storageDir, sessionId, dest).string() << "\n";
            return 0;
        }

        if (*fixturesCmd) {
            auto set = block_stop_signals();
            fixtures::FixtureServer server;
            for (const auto& site : fixtures::load_sites()) std::cout << server.url(site.entry) << "\n";
            std::cout.flush();
            wait_for_stop(set);
            return 0;
        }

        if (*audit) {
            std::vector<auditor::AuditReport> reports;
            if (auditFixtures) {
                fixtures::FixtureServer server;
                for (const auto& site : fixtures::load_sites()) {
                    if (!site.acceptance) continue;
                    auto result = auditor::audit_site(server.url(site.entry), auditOpts, &site);
                    for (const auto& n : result.notes) spdlog::warn("{}: {}", site.name, n);
                    reports.push_back(result.report);
                    std::cout << auditor::to_text(result.report) << "\n";
                }
            } else {
                if (auditTarget.empty()) auditTarget = cfg.targetUrl;
                if (auditTarget.empty()) throw Error(ErrorCode::InvalidConfig, "audit needs --target or --fixtures");
                auto result = auditor::audit_site(auditTarget, auditOpts);
                for (const auto& a : result.assessments)
                    std::cout << "  " << auditor::to_string(a.state) << "  " << wire::tag(a.element.kind) << " '"
                              << a.element.text << "'  " << a.note << "\n";
                reports.push_back(result.report);
                std::cout << auditor::to_text(result.report) << "\n";
            }
            if (!csvPath.empty()) {
                std::ofstream out(csvPath);
                out << auditor::csv_header() << "\n";
                for (const auto& r : reports) out << auditor::to_csv_row(r) << "\n";
                if (!out) throw Error(ErrorCode::StorageFull, "cannot write " + csvPath);
            }
            return 0;
        }

        if (cfg.targetUrl.empty()) {
            std::cerr << "--target is required\n" << app.help();
            return 2;
        }
        auto set = block_stop_signals();
        gateway::Gateway gw(cfg);
        gw.start();
        std::cout << "mirror of " << cfg.targetUrl << " at http://" << cfg.bindAddress << ":" << gw.port() << "/\n";
        std::cout.flush();
        wait_for_stop(set);
        gw.stop();
        return 0;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return e.code() == ErrorCode::InvalidConfig ? 2 : 1;
    }
}
