#include "mirrorcast/codec.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <random>

namespace mirrorcast::codec {

namespace b64 = boost::beast::detail::base64;

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(b64::encoded_size(bytes.size()), '\0');
    out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) return std::nullopt;
    std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
    auto [written, read] = b64::decode(out.data(), text.data(), text.size());
    // The decoder stops at padding; anything after it must be padding too.
    const std::string_view rest = text.substr(read);
    if (rest.size() > 2 || rest.find_first_not_of('=') != std::string_view::npos) return std::nullopt;
    out.resize(written);
    return out;
}

std::string base64url_encode(std::string_view bytes) {
    std::string out = base64_encode({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
    while (!out.empty() && out.back() == '=') out.pop_back();
    std::replace(out.begin(), out.end(), '+', '-');
    std::replace(out.begin(), out.end(), '/', '_');
    return out;
}

std::optional<std::string> base64url_decode(std::string_view text) {
    std::string padded(text);
    if (padded.find_first_of("+/=") != std::string::npos) return std::nullopt;
    std::replace(padded.begin(), padded.end(), '-', '+');
    std::replace(padded.begin(), padded.end(), '_', '/');
    while (padded.size() % 4 != 0) padded.push_back('=');
    auto bytes = base64_decode(padded);
    if (!bytes) return std::nullopt;
    std::string out(bytes->begin(), bytes->end());
    if (base64url_encode(out) != text) return std::nullopt;
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(bytes.data(), bytes.size(), digest.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (unsigned char c : digest) {
        out.push_back(kHex[c >> 4]);
        out.push_back(kHex[c & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string random_id() {
    std::random_device rd;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int word = 0; word < 2; ++word) {
        std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        for (int i = 0; i < 16; ++i, v >>= 4) out.push_back(kHex[v & 0xf]);
    }
    return out;
}

}  // namespace mirrorcast::codec
