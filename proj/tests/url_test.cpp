#include "generators.hpp"

#include "mirrorcast/codec.hpp"
#include "mirrorcast/url.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace mirrorcast;

namespace {

Url site(const char* s) { return *Url::parse(s); }

// Random absolute URL on some other origin.
std::string foreign_url(gen::Rng& rng) {
    static const char* schemes[] = {"http", "https"};
    static const char* hosts[] = {"other.example", "cdn.example.net", "xn--bcher-kva.example", "127.0.0.1", "a.b.c.d.example"};
    std::string u = std::string(schemes[gen::uniform(rng, 0, 1)]) + "://" + hosts[gen::uniform(rng, 0, 4)];
    if (gen::coin(rng)) u += ":" + std::to_string(gen::uniform(rng, 1, 65535));
    u += gen::path(rng);
    if (gen::coin(rng)) u += "&x=" + gen::ascii(rng, 10);
    if (gen::coin(rng)) u += "#" + gen::ascii(rng, 6);
    return u;
}

}  // namespace

TEST(Url, ParsesAndDefaultsPorts) {
    auto u = Url::parse("HTTPS://Accounts.Google.com/login?x=1#top");
    ASSERT_TRUE(u);
    EXPECT_EQ(u->scheme, "https");
    EXPECT_EQ(u->host, "accounts.google.com");
    EXPECT_EQ(u->port, 443);
    EXPECT_FALSE(u->explicitPort);
    EXPECT_EQ(u->path, "/login");
    EXPECT_EQ(u->query, "x=1");
    EXPECT_EQ(u->fragment, "top");
    EXPECT_EQ(u->origin(), "https://accounts.google.com");
    EXPECT_EQ(Url::parse("http://h:8080")->path, "/");
    EXPECT_EQ(Url::parse("http://h:80/")->origin(), "http://h");
    EXPECT_FALSE(Url::parse("mailto:someone@example.org"));
    EXPECT_FALSE(Url::parse("not a url"));
}

TEST(Url, GoogleLoginExample) {
    const Url google = site("https://accounts.google.com/");
    EXPECT_EQ(rewrite_target("https://accounts.google.com/login", google), "/login");
    EXPECT_EQ(rewrite_target("https://accounts.google.com/", google), "/");
    EXPECT_EQ(rewrite_target("https://accounts.google.com", google), "/");
    EXPECT_EQ(resolve_proxy_path("/login", google), "https://accounts.google.com/login");
}

TEST(Url, QueryIsKeptAndOriginsCompareStrictly) {
    const Url s = site("http://127.0.0.1:8000/");
    EXPECT_EQ(rewrite_target("http://127.0.0.1:8000/a/b?c=1&d=2", s), "/a/b?c=1&d=2");
    // Different port, host spelling or scheme is a different origin.
    for (auto other : {"http://127.0.0.1:8001/a", "http://localhost:8000/a", "https://127.0.0.1:8000/a"})
        EXPECT_TRUE(rewrite_target(other, s).starts_with("/__x/")) << other;
}

TEST(Url, ReservedPrefixesAreEscaped) {
    const Url s = site("https://example.org/");
    const std::string p = rewrite_target("https://example.org/__x/abc", s);
    EXPECT_EQ(p, "/__o/__x/abc");
    EXPECT_EQ(resolve_proxy_path(p, s), "https://example.org/__x/abc");
    EXPECT_EQ(rewrite_target("https://example.org/__ws/view", s), "/__o/__ws/view");
    // A literal "/__o" path of the origin that is not escaping anything passes through.
    EXPECT_EQ(rewrite_target("https://example.org/__oak", s), "/__o/__oak");
    EXPECT_EQ(resolve_proxy_path("/__oak", s), "https://example.org/__oak");
}

TEST(Url, CrossOriginRoundTrip) {
    gen::Rng rng(7);
    const Url s = site("https://accounts.google.com/");
    for (int i = 0; i < 500; ++i) {
        const std::string u = foreign_url(rng);
        const std::string p = rewrite_target(u, s);
        ASSERT_TRUE(p.starts_with("/__x/")) << u;
        // The payload is the base64url of the exact input string.
        EXPECT_EQ(codec::base64url_decode(p.substr(5)), u);
        EXPECT_EQ(resolve_proxy_path(p, s), u);
        // Every byte of the path is URL-safe.
        EXPECT_EQ(p.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_/"),
                  std::string::npos);
    }
}

TEST(Url, NonHttpTargetsAreCarriedNotDropped) {
    const Url s = site("https://example.org/");
    for (auto u : {"javascript:void(0)", "mailto:a@b.c", "data:text/plain,hi", "ftp://example.org/x"}) {
        auto p = rewrite_target(u, s);
        EXPECT_EQ(decode_cross_origin(p), u);
    }
}

TEST(Url, SameOriginRewriteIsInjective) {
    gen::Rng rng(11);
    const Url s = site("https://example.org/");
    std::map<std::string, std::string> seen;  // proxy path -> origin url
    for (int i = 0; i < 2000; ++i) {
        std::string path = gen::path(rng);
        if (gen::uniform(rng, 0, 9) == 0) path = "/__" + path.substr(1);
        if (gen::uniform(rng, 0, 9) == 0) path = "/__o" + path;
        const std::string u = "https://example.org" + path;
        const std::string p = rewrite_target(u, s);
        auto [it, fresh] = seen.emplace(p, u);
        EXPECT_TRUE(fresh || it->second == u) << p << " from " << u << " and " << it->second;
        EXPECT_EQ(resolve_proxy_path(p, s), u);
    }
}

TEST(Url, ResolveRejectsBadPaths) {
    const Url s = site("https://example.org/");
    EXPECT_FALSE(resolve_proxy_path("", s));
    EXPECT_FALSE(resolve_proxy_path("relative", s));
    EXPECT_FALSE(resolve_proxy_path("//evil.example/", s));
    EXPECT_FALSE(resolve_proxy_path("/__x/***", s));
    EXPECT_FALSE(resolve_proxy_path("/__x/YQ=", s));  // padding is not canonical
}
