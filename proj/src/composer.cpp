#include "mirrorcast/composer.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/error.hpp"
#include "mirrorcast/page_scripts.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace mirrorcast::composer {

using wire::ElementKind;
using wire::UIElementDescriptor;

std::vector<UIElementDescriptor> extract_elements(driver::DriverSession& session) {
    nlohmann::json raw;
    try {
        raw = session.execute_script(scripts::kExtractElements);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StaleSession) throw;
        spdlog::warn("element extraction failed: {}", e.what());
        return {};
    }
    std::vector<UIElementDescriptor> out;
    if (!raw.is_array()) return out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        try {
            UIElementDescriptor d;
            d.elementId = r.at("id").get<std::string>();
            const std::string kind = r.at("kind").get<std::string>();
            d.kind = kind == "textbox" ? ElementKind::TextBox : kind == "button" ? ElementKind::Button : ElementKind::Hyperlink;
            d.x = r.at("x").get<double>();
            d.y = r.at("y").get<double>();
            d.width = r.at("w").get<double>();
            d.height = r.at("h").get<double>();
            d.text = r.value("text", "");
            d.href = d.kind == ElementKind::Hyperlink ? r.value("href", "") : "";
            d.focused = r.value("focused", false);
            out.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            spdlog::warn("skipping malformed element record: {}", e.what());
        }
    }
    return out;
}

ViewComposer::ViewComposer(Url originSite) : origin_(std::move(originSite)) {}

wire::EnrichedView ViewComposer::compose(const driver::PageSnapshot& snapshot, std::vector<UIElementDescriptor> elements,
                                         driver::HistoryDepth history, std::uint64_t sequence,
                                         std::string faviconPath) {
    wire::EnrichedView view;
    view.sequence = sequence;
    view.imageWidth = snapshot.imageWidth;
    view.imageHeight = snapshot.imageHeight;
    view.pageTitle = snapshot.title;
    view.faviconPath = std::move(faviconPath);
    view.historyBack = history.back;
    view.historyForward = history.forward;
    view.displayPath = rewrite_target(snapshot.currentUrl, origin_);

    const double W = snapshot.imageWidth;
    const double H = snapshot.imageHeight;
    view.elements.reserve(elements.size());
    for (auto& d : elements) {
        // Clip to the captured area; pages taller than the capture limit lose their tail.
        const double x0 = std::clamp(d.x, 0.0, W), y0 = std::clamp(d.y, 0.0, H);
        const double x1 = std::clamp(d.x + d.width, 0.0, W), y1 = std::clamp(d.y + d.height, 0.0, H);
        if (x1 - x0 <= 0 || y1 - y0 <= 0) continue;
        d.x = x0;
        d.y = y0;
        d.width = x1 - x0;
        d.height = y1 - y0;
        if (d.kind == ElementKind::Hyperlink && !d.href.empty())
            d.href = rewrite_target(d.href, origin_);
        view.elements.push_back(std::move(d));
    }

    std::string hash = codec::sha256_hex(snapshot.screenshot);
    if (!lastHash_.empty() && hash == lastHash_) {
        view.reuseImage = true;
    } else {
        view.screenshot = snapshot.screenshot;
        lastHash_ = std::move(hash);
    }
    return view;
}

}  // namespace mirrorcast::composer
