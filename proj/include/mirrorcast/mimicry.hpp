#pragma once

#include "mirrorcast/wire.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mirrorcast::mimicry {

inline constexpr std::string_view kIconPrefix = "/__icon/";

struct Icon {
    std::vector<std::uint8_t> bytes;
    std::string contentType;
};

/// Process-wide favicon cache. This is the only component that contacts the
/// origin directly: one GET per distinct icon URL, failures included.
class FaviconCache {
public:
    /// Returns icon bytes or nullopt on any failure.
    using Fetcher = std::function<std::optional<Icon>(const std::string& url)>;

    FaviconCache();
    explicit FaviconCache(Fetcher fetcher);

    /// Proxy path serving the icon; absent or unreachable icons map to a
    /// 1x1 transparent PNG.
    std::string fetch(const std::optional<std::string>& faviconUrl);

    /// Bytes for a "/__icon/<hash>" path, if known.
    std::optional<Icon> lookup(std::string_view proxyPath) const;

    std::string fallback_path() const { return fallbackPath_; }
    std::size_t origin_fetches() const { return fetches_.load(); }

    /// Plain HTTP(S) GET following redirects.
    static std::optional<Icon> http_fetch(const std::string& url);

private:
    std::string store(Icon icon);

    Fetcher fetcher_;
    std::string fallbackPath_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::string> byUrl_;   // origin URL -> proxy path
    std::unordered_map<std::string, Icon> byPath_;         // proxy path -> bytes
    std::atomic<std::size_t> fetches_{0};
};

/// The origin page title, unmodified.
inline const std::string& title_of(const wire::EnrichedView& view) { return view.pageTitle; }

}  // namespace mirrorcast::mimicry
