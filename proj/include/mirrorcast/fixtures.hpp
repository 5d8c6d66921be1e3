#pragma once

// Local fixture corpus: a directory of small sites, each with a manifest.json
// describing its landing-page elements and what every top-level clickable is
// authored to do. Served by an in-process HTTP server on loopback.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mirrorcast::fixtures {

struct Clickable {
    std::string kind;  // "button" or "link"
    std::string text;
    std::string expect;  // "navigate" or "change"
    std::string path;        // exact proxy path after a navigation
    std::string pathPrefix;  // or a required prefix
};

struct LoginOracle {
    std::string user;
    std::string password;
    std::string submit;       // button text
    std::string successPath;  // path of the page reached on success
};

struct Site {
    std::string name;
    std::string entry;  // server path of the landing page
    std::string title;
    bool acceptance = true;
    std::map<std::string, int> landingElements;  // kind tag -> count
    std::vector<Clickable> clickables;           // document order
    std::map<std::string, std::string> headers;
    std::optional<LoginOracle> login;
    nlohmann::json raw;
};

/// MIRRORCAST_FIXTURES, else the source-tree corpus.
std::filesystem::path default_root();

std::vector<Site> load_sites(const std::filesystem::path& root = default_root());
Site load_site(const std::filesystem::path& siteDir);

/// Serves root on 127.0.0.1 with an ephemeral port. In HTML files "{{ALT}}"
/// becomes "http://localhost:<port>", a second origin backed by the same
/// server. Per-site headers from the manifests are added to every response
/// under that site.
class FixtureServer {
public:
    explicit FixtureServer(std::filesystem::path root = default_root());
    ~FixtureServer();
    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    unsigned short port() const;
    std::string origin() const;
    std::string alt_origin() const;
    std::string url(const std::string& path) const { return origin() + path; }

    /// Requests seen for a path (query ignored).
    std::size_t request_count(const std::string& path) const;
    std::vector<std::uint8_t> file_bytes(const std::string& path) const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

}  // namespace mirrorcast::fixtures
