#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mirrorcast {

/// Absolute URL split into the parts the proxy cares about. Only hierarchical
/// schemes ("scheme://authority/...") parse.
struct Url {
    std::string scheme;  // lower-case
    std::string host;    // lower-case
    int port = 0;        // effective port; defaulted from scheme when absent
    bool explicitPort = false;
    std::string path = "/";
    std::optional<std::string> query;
    std::optional<std::string> fragment;

    static std::optional<Url> parse(std::string_view text);

    /// scheme://host[:port] with default ports omitted.
    std::string origin() const;
    /// path[?query][#fragment]
    std::string path_query() const;
    std::string str() const;

    bool same_origin(const Url& other) const;
    bool is_http() const { return scheme == "http" || scheme == "https"; }
};

/// Reserved path prefixes owned by the gateway. Origin paths that start with
/// "/__" are escaped under kEscapedPrefix so they never collide.
inline constexpr std::string_view kCrossOriginPrefix = "/__x/";
inline constexpr std::string_view kEscapedPrefix = "/__o";

/// Maps an absolute URL seen in the mirrored page to the path the viewer uses
/// on the proxy. Same-origin URLs keep their path and query; everything else
/// is carried losslessly under "/__x/<base64url(url)>". Total.
std::string rewrite_target(std::string_view originUrl, const Url& originSite);

/// Inverse of rewrite_target: proxy path -> absolute URL the headless browser
/// should load. Returns nullopt for undecodable "/__x/" payloads.
std::optional<std::string> resolve_proxy_path(std::string_view proxyPath, const Url& originSite);

std::string encode_cross_origin(std::string_view absoluteUrl);
std::optional<std::string> decode_cross_origin(std::string_view proxyPath);

}  // namespace mirrorcast
