#include "mirrorcast/fixtures.hpp"
#include "mirrorcast/mimicry.hpp"
#include "mirrorcast/image.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace mirrorcast;
using namespace mirrorcast::mimicry;

TEST(FaviconCache, OneFetchPerDistinctUrl) {
    std::map<std::string, int> calls;
    std::mutex m;
    FaviconCache cache([&](const std::string& url) -> std::optional<Icon> {
        std::lock_guard lock(m);
        ++calls[url];
        if (url.ends_with("missing.ico")) return std::nullopt;
        return Icon{{1, 2, 3, static_cast<std::uint8_t>(url.size())}, "image/x-icon"};
    });
    const std::string a = "https://a.example/favicon.ico", b = "https://b.example/icon.png";
    auto pa = cache.fetch(a);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(cache.fetch(a), pa);
    auto pb = cache.fetch(b);
    EXPECT_NE(pa, pb);
    auto miss = cache.fetch("https://a.example/missing.ico");
    EXPECT_EQ(miss, cache.fallback_path());
    cache.fetch("https://a.example/missing.ico");
    EXPECT_EQ(calls[a], 1);
    EXPECT_EQ(calls[b], 1);
    EXPECT_EQ(calls["https://a.example/missing.ico"], 1);  // failures are cached too
    EXPECT_EQ(cache.origin_fetches(), 3u);
    EXPECT_TRUE(pa.starts_with(kIconPrefix));
    EXPECT_EQ(cache.lookup(pa)->bytes, (std::vector<std::uint8_t>{1, 2, 3, static_cast<std::uint8_t>(a.size())}));
    EXPECT_FALSE(cache.lookup("/__icon/unknown"));
}

TEST(FaviconCache, AbsentIconIsTransparentPixel) {
    FaviconCache cache([](const std::string&) -> std::optional<Icon> { return std::nullopt; });
    EXPECT_EQ(cache.fetch(std::nullopt), cache.fallback_path());
    EXPECT_EQ(cache.fetch(std::string()), cache.fallback_path());
    EXPECT_EQ(cache.origin_fetches(), 0u);
    auto icon = cache.lookup(cache.fallback_path());
    ASSERT_TRUE(icon);
    EXPECT_EQ(icon->contentType, "image/png");
    auto r = image::decode_png(icon->bytes);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->width, 1);
    EXPECT_EQ(r->height, 1);
    EXPECT_EQ(r->rgba[3], 0);
}

TEST(FaviconCache, ConcurrentCallersShareOneEntry) {
    std::atomic<int> calls{0};
    FaviconCache cache([&](const std::string&) -> std::optional<Icon> {
        ++calls;
        return Icon{{9, 9}, "image/png"};
    });
    std::vector<std::thread> threads;
    std::vector<std::string> paths(8);
    for (int i = 0; i < 8; ++i) threads.emplace_back([&, i] { paths[i] = cache.fetch("https://x.example/f.ico"); });
    for (auto& t : threads) t.join();
    for (auto& p : paths) EXPECT_EQ(p, paths[0]);
    EXPECT_GE(calls.load(), 1);
}

// Against a live origin the cache issues exactly one request per icon and
// serves the origin's bytes unchanged.
TEST(FaviconCache, HttpFetchHitsOriginOnce) {
    fixtures::FixtureServer server(fixtures::default_root());
    FaviconCache cache;
    const std::string url = server.url("/static/favicon.ico");
    std::string path;
    for (int i = 0; i < 5; ++i) path = cache.fetch(url);
    EXPECT_EQ(server.request_count("/static/favicon.ico"), 1u);
    auto icon = cache.lookup(path);
    ASSERT_TRUE(icon);
    EXPECT_EQ(icon->bytes, server.file_bytes("/static/favicon.ico"));
    EXPECT_EQ(icon->contentType, "image/x-icon");

    EXPECT_EQ(cache.fetch(server.url("/static/nope.ico")), cache.fallback_path());
    EXPECT_EQ(cache.fetch("http://127.0.0.1:9/favicon.ico"), cache.fallback_path());
}
