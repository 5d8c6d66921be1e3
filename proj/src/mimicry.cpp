#include "mirrorcast/mimicry.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/image.hpp"
#include "mirrorcast/url.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <mutex>

namespace mirrorcast::mimicry {

FaviconCache::FaviconCache() : FaviconCache(&FaviconCache::http_fetch) {}

FaviconCache::FaviconCache(Fetcher fetcher) : fetcher_(std::move(fetcher)) {
    image::Raster transparent{1, 1, {0, 0, 0, 0}};
    fallbackPath_ = store({image::encode_png(transparent), "image/png"});
}

std::string FaviconCache::store(Icon icon) {
    std::string path = std::string(kIconPrefix) + codec::sha256_hex(icon.bytes);
    std::unique_lock lock(mutex_);
    byPath_.try_emplace(path, std::move(icon));
    return path;
}

std::string FaviconCache::fetch(const std::optional<std::string>& faviconUrl) {
    if (!faviconUrl || faviconUrl->empty()) return fallbackPath_;
    {
        std::shared_lock lock(mutex_);
        if (auto it = byUrl_.find(*faviconUrl); it != byUrl_.end()) return it->second;
    }
    // Fetched outside the lock; a concurrent duplicate fetch stores identical bytes.
    ++fetches_;
    std::optional<Icon> icon = fetcher_(*faviconUrl);
    std::string path = icon && !icon->bytes.empty() ? store(std::move(*icon)) : fallbackPath_;
    if (path == fallbackPath_) spdlog::info("favicon {} unavailable, using transparent fallback", *faviconUrl);
    std::unique_lock lock(mutex_);
    byUrl_[*faviconUrl] = path;
    return path;
}

std::optional<Icon> FaviconCache::lookup(std::string_view proxyPath) const {
    std::shared_lock lock(mutex_);
    if (auto it = byPath_.find(std::string(proxyPath)); it != byPath_.end()) return it->second;
    return std::nullopt;
}

std::optional<Icon> FaviconCache::http_fetch(const std::string& url) {
    auto parsed = Url::parse(url);
    if (!parsed || !parsed->is_http()) return std::nullopt;
    try {
        httplib::Client client(parsed->origin());
        client.set_follow_location(true);
        client.set_connection_timeout(std::chrono::seconds(3));
        client.set_read_timeout(std::chrono::seconds(5));
        auto res = client.Get(parsed->path_query());
        if (!res || res->status != 200 || res->body.empty()) return std::nullopt;
        Icon icon;
        icon.bytes.assign(res->body.begin(), res->body.end());
        icon.contentType = res->get_header_value("Content-Type");
        if (icon.contentType.empty()) icon.contentType = "image/x-icon";
        return icon;
    } catch (const std::exception& e) {
        spdlog::warn("favicon fetch {} failed: {}", url, e.what());
        return std::nullopt;
    }
}

}  // namespace mirrorcast::mimicry
