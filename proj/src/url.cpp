#include "mirrorcast/url.hpp"

#include "mirrorcast/codec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace mirrorcast {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

int default_port(std::string_view scheme) {
    if (scheme == "http" || scheme == "ws") return 80;
    if (scheme == "https" || scheme == "wss") return 443;
    return 0;
}

}  // namespace

std::optional<Url> Url::parse(std::string_view text) {
    auto colon = text.find("://");
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    Url url;
    url.scheme = lower(text.substr(0, colon));
    if (!std::all_of(url.scheme.begin(), url.scheme.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '+' || c == '-' || c == '.'; }))
        return std::nullopt;

    std::string_view rest = text.substr(colon + 3);
    auto auth_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, auth_end);
    rest = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    if (authority.empty()) return std::nullopt;

    std::string_view host = authority;
    std::string_view port;
    if (authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = authority.substr(0, close + 1);
        if (close + 1 < authority.size()) {
            if (authority[close + 1] != ':') return std::nullopt;
            port = authority.substr(close + 2);
        }
    } else if (auto c = authority.rfind(':'); c != std::string_view::npos) {
        host = authority.substr(0, c);
        port = authority.substr(c + 1);
    }
    if (host.empty()) return std::nullopt;
    url.host = lower(host);
    url.port = default_port(url.scheme);
    if (!port.empty()) {
        int p = 0;
        auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
        if (ec != std::errc{} || ptr != port.data() + port.size() || p < 0 || p > 65535) return std::nullopt;
        url.explicitPort = p != url.port;
        url.port = p;
    }

    if (auto hash = rest.find('#'); hash != std::string_view::npos) {
        url.fragment = std::string(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    if (auto q = rest.find('?'); q != std::string_view::npos) {
        url.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    url.path = rest.empty() ? "/" : std::string(rest);
    return url;
}

std::string Url::origin() const {
    std::string out = scheme + "://" + host;
    if (explicitPort) out += ":" + std::to_string(port);
    return out;
}

std::string Url::path_query() const {
    std::string out = path;
    if (query) out += "?" + *query;
    if (fragment) out += "#" + *fragment;
    return out;
}

std::string Url::str() const { return origin() + path_query(); }

bool Url::same_origin(const Url& other) const {
    return scheme == other.scheme && host == other.host && port == other.port;
}

std::string encode_cross_origin(std::string_view absoluteUrl) {
    return std::string(kCrossOriginPrefix) + codec::base64url_encode(absoluteUrl);
}

std::optional<std::string> decode_cross_origin(std::string_view proxyPath) {
    if (!proxyPath.starts_with(kCrossOriginPrefix)) return std::nullopt;
    return codec::base64url_decode(proxyPath.substr(kCrossOriginPrefix.size()));
}

std::string rewrite_target(std::string_view originUrl, const Url& originSite) {
    auto url = Url::parse(originUrl);
    if (!url || !url->is_http() || !url->same_origin(originSite)) return encode_cross_origin(originUrl);
    std::string path = url->path_query();
    if (path.starts_with("/__")) return std::string(kEscapedPrefix) + path;
    return path;
}

std::optional<std::string> resolve_proxy_path(std::string_view proxyPath, const Url& originSite) {
    if (proxyPath.empty() || proxyPath.front() != '/' || proxyPath.starts_with("//")) return std::nullopt;
    if (proxyPath.starts_with(kCrossOriginPrefix)) return decode_cross_origin(proxyPath);
    if (proxyPath.starts_with(kEscapedPrefix) && proxyPath.substr(kEscapedPrefix.size()).starts_with("/__"))
        proxyPath.remove_prefix(kEscapedPrefix.size());
    return originSite.origin() + std::string(proxyPath);
}

}  // namespace mirrorcast
