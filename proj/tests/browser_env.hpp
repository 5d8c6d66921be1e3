#pragma once

// Shared plumbing for tests that drive a real headless browser against the
// fixture corpus served on loopback.

#include "mirrorcast/composer.hpp"
#include "mirrorcast/driver.hpp"
#include "mirrorcast/fixtures.hpp"
#include "mirrorcast/url.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <string>

namespace browser_env {

using namespace mirrorcast;

inline fixtures::FixtureServer& server() {
    static fixtures::FixtureServer s(fixtures::default_root());
    return s;
}

inline Url origin() { return *Url::parse(server().origin() + "/"); }

inline std::unique_ptr<driver::DriverSession> open(const std::string& path, wire::Viewport vp = {1280, 720}) {
    return driver::DriverSession::open(server().url(path), vp, false);
}

inline const wire::UIElementDescriptor* find(const std::vector<wire::UIElementDescriptor>& els, wire::ElementKind kind,
                                             const std::string& text) {
    for (const auto& e : els)
        if (e.kind == kind && e.text == text) return &e;
    return nullptr;
}

inline std::pair<double, double> center(const wire::UIElementDescriptor& e) {
    return {e.x + e.width / 2, e.y + e.height / 2};
}

}  // namespace browser_env
