#pragma once

#include "mirrorcast/driver.hpp"
#include "mirrorcast/url.hpp"
#include "mirrorcast/wire.hpp"

#include <string>
#include <vector>

namespace mirrorcast::composer {

/// Visible interactive elements of the settled page, geometry in full-page CSS
/// pixels. Hyperlink hrefs are still absolute origin URLs at this point.
/// Script failures yield an empty list; only a dead session throws.
std::vector<wire::UIElementDescriptor> extract_elements(driver::DriverSession& session);

/// Per-session composer. Remembers the previous frame's content hash so an
/// unchanged screenshot is replaced by a reuse marker.
class ViewComposer {
public:
    explicit ViewComposer(Url originSite);

    wire::EnrichedView compose(const driver::PageSnapshot& snapshot, std::vector<wire::UIElementDescriptor> elements,
                               driver::HistoryDepth history, std::uint64_t sequence, std::string faviconPath);

    /// Forget the previous frame (a reconnecting viewer needs full images).
    void reset() { lastHash_.clear(); }

    const Url& origin_site() const { return origin_; }

private:
    Url origin_;
    std::string lastHash_;
};

}  // namespace mirrorcast::composer
