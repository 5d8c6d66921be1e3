#include "mirrorcast/fixtures.hpp"

#include "mirrorcast/error.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mirrorcast::fixtures {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_root() {
    if (const char* env = std::getenv("MIRRORCAST_FIXTURES"); env && *env) return env;
    return MIRRORCAST_FIXTURE_DIR;
}

Site load_site(const fs::path& siteDir) {
    std::ifstream in(siteDir / "manifest.json");
    if (!in) throw Error(ErrorCode::InvalidConfig, "no manifest in " + siteDir.string());
    json j = json::parse(in);
    Site s;
    s.raw = j;
    s.name = j.at("name").get<std::string>();
    s.entry = j.at("entry").get<std::string>();
    s.title = j.value("title", "");
    s.acceptance = j.value("acceptance", true);
    const json landing = j.value("landingElements", json::object());
    for (auto& [k, v] : landing.items()) s.landingElements[k] = v.get<int>();
    const json clickables = j.value("clickables", json::array());
    for (const auto& c : clickables)
        s.clickables.push_back({c.at("kind").get<std::string>(), c.at("text").get<std::string>(),
                                c.at("expect").get<std::string>(), c.value("path", ""), c.value("pathPrefix", "")});
    const json headers = j.value("headers", json::object());
    for (auto& [k, v] : headers.items()) s.headers[k] = v.get<std::string>();
    if (j.contains("login")) {
        const auto& l = j.at("login");
        s.login = LoginOracle{l.at("user").get<std::string>(), l.at("password").get<std::string>(),
                              l.at("submit").get<std::string>(), l.at("successPath").get<std::string>()};
    }
    return s;
}

std::vector<Site> load_sites(const fs::path& root) {
    std::vector<Site> sites;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) sites.push_back(load_site(entry.path()));
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.name < b.name; });
    return sites;
}

namespace {

std::string mime_of(const fs::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html") return "text/html; charset=utf-8";
    if (ext == ".css") return "text/css";
    if (ext == ".js") return "text/javascript";
    if (ext == ".png") return "image/png";
    if (ext == ".ico") return "image/x-icon";
    if (ext == ".json") return "application/json";
    return "application/octet-stream";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

struct FixtureServer::Impl {
    fs::path root;
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::map<std::string, std::map<std::string, std::string>> siteHeaders;  // "/site/" -> headers
    mutable std::mutex mutex;
    std::map<std::string, std::size_t> counts;

    std::optional<fs::path> resolve(const std::string& path) const {
        fs::path rel = fs::path(path).relative_path();
        for (const auto& part : rel)
            if (part == "..") return std::nullopt;
        fs::path p = root / rel;
        if (fs::is_directory(p)) p /= "index.html";
        if (!fs::is_regular_file(p) || p.filename() == "manifest.json") return std::nullopt;
        return p;
    }
};

FixtureServer::FixtureServer(fs::path root) : impl_(std::make_unique<Impl>()) {
    auto& im = *impl_;
    im.root = std::move(root);
    for (const auto& site : load_sites(im.root))
        if (!site.headers.empty()) im.siteHeaders["/" + site.name + "/"] = site.headers;

    im.server.Get(".*", [&im](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(im.mutex);
            ++im.counts[req.path];
        }
        for (const auto& [prefix, headers] : im.siteHeaders)
            if (req.path.rfind(prefix, 0) == 0)
                for (const auto& [k, v] : headers) res.set_header(k, v);
        auto file = im.resolve(req.path);
        if (!file) {
            res.status = 404;
            res.set_content("not found\n", "text/plain");
            return;
        }
        std::string body = slurp(*file);
        if (file->extension() == ".html") {
            const std::string alt = "http://localhost:" + std::to_string(im.port);
            for (std::size_t pos; (pos = body.find("{{ALT}}")) != std::string::npos;) body.replace(pos, 7, alt);
        }
        res.set_header("Cache-Control", "no-store");
        res.set_content(body, mime_of(*file));
    });
    im.server.Post(".*", [&im](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(im.mutex);
        ++im.counts[req.path];
        res.status = 405;
    });
    im.port = im.server.bind_to_any_port("127.0.0.1");
    if (im.port <= 0) throw Error(ErrorCode::InvalidConfig, "fixture server cannot bind");
    im.thread = std::thread([&im] { im.server.listen_after_bind(); });
    im.server.wait_until_ready();
}

FixtureServer::~FixtureServer() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

unsigned short FixtureServer::port() const { return static_cast<unsigned short>(impl_->port); }
std::string FixtureServer::origin() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }
std::string FixtureServer::alt_origin() const { return "http://localhost:" + std::to_string(impl_->port); }

std::size_t FixtureServer::request_count(const std::string& path) const {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->counts.find(path);
    return it == impl_->counts.end() ? 0 : it->second;
}

std::vector<std::uint8_t> FixtureServer::file_bytes(const std::string& path) const {
    auto p = impl_->resolve(path);
    if (!p) return {};
    std::string s = slurp(*p);
    return {s.begin(), s.end()};
}

}  // namespace mirrorcast::fixtures
