#include "generators.hpp"

#include "mirrorcast/codec.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace mirrorcast::codec;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Codec, Base64Rfc4648Vectors) {
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},        {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (auto [plain, enc] : vectors) {
        EXPECT_EQ(base64_encode(bytes_of(plain)), enc);
        EXPECT_EQ(base64_decode(enc), bytes_of(plain));
    }
    EXPECT_FALSE(base64_decode("Zm9v!"));
}

TEST(Codec, Base64UrlAlphabetAndPadding) {
    const std::string s("\xfb\xff\xbf", 3);
    EXPECT_EQ(base64url_encode(s), "-_-_");
    EXPECT_EQ(base64url_encode("f"), "Zg");
    EXPECT_EQ(base64url_decode("Zg"), "f");
    EXPECT_FALSE(base64url_decode("Zg=="));
    EXPECT_FALSE(base64url_decode("Zh"));  // non-zero trailing bits
    EXPECT_FALSE(base64url_decode("Z"));
    EXPECT_FALSE(base64url_decode("+/"));
}

TEST(Codec, Base64UrlRoundTripsArbitraryBytes) {
    gen::Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        auto b = gen::bytes(rng, 64);
        std::string s(b.begin(), b.end());
        auto enc = base64url_encode(s);
        EXPECT_EQ(enc.size(), (s.size() * 4 + 2) / 3);
        EXPECT_EQ(base64url_decode(enc), s);
    }
}

TEST(Codec, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(std::string_view("")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex(std::string_view("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Codec, RandomIdsAreHexAndDistinct) {
    std::set<std::string> ids;
    for (int i = 0; i < 1000; ++i) {
        auto id = random_id();
        ASSERT_EQ(id.size(), 32u);
        EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
        ids.insert(id);
    }
    EXPECT_EQ(ids.size(), 1000u);
}
