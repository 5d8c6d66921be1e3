#include "generators.hpp"

#include "mirrorcast/error.hpp"
#include "mirrorcast/wire.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace mirrorcast;
using namespace mirrorcast::wire;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::SessionLost;
}

}  // namespace

TEST(Wire, RoundTripGeneratedMessages) {
    gen::Rng rng(20240611);
    for (int i = 0; i < 2000; ++i) {
        WireMessage m = gen::message(rng);
        Frame f = encode(m);
        EXPECT_EQ(f.type, frame_type_of(m.kind));
        ASSERT_EQ(decode(f.bytes, f.type), m) << "iteration " << i;
    }
}

TEST(Wire, ClickTextFrameIsExact) {
    // Fixed layout: sorted keys, version 1, the click example coordinates.
    Frame f = encode(make_message(2, InputEvent::click(52, 142, 1000)));
    EXPECT_EQ(f.type, FrameType::Text);
    EXPECT_EQ(f.text(), R"({"body":{"t":1000,"x":52.0,"y":142.0},"ch":"cmd","kind":"click","seq":2,"v":1})");
}

TEST(Wire, KeyAndTextBodies) {
    Frame k = encode(make_message(3, InputEvent::key_press("J")));
    EXPECT_EQ(k.text(), R"({"body":{"key":"J","t":0},"ch":"cmd","kind":"key","seq":3,"v":1})");
    Frame t = encode(make_message(4, InputEvent::text_changed("e1", "John")));
    EXPECT_EQ(t.text(), R"({"body":{"id":"e1","t":0,"text":"John"},"ch":"cmd","kind":"text","seq":4,"v":1})");
}

TEST(Wire, ViewUsesBinaryFrameWithBigEndianPrefix) {
    EnrichedView v;
    v.sequence = 0x0102030405060708ULL;
    v.imageWidth = 10;
    v.imageHeight = 10;
    v.screenshot = {0x89, 'P', 'N', 'G'};
    v.displayPath = "/";
    Frame f = encode(make_message(v));
    ASSERT_EQ(f.type, FrameType::Binary);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(f.bytes[i], i + 1);
    const std::uint32_t h = (f.bytes[8] << 24) | (f.bytes[9] << 16) | (f.bytes[10] << 8) | f.bytes[11];
    ASSERT_EQ(f.bytes.size(), 12 + h + 4);
    std::string header(f.bytes.begin() + 12, f.bytes.begin() + 12 + h);
    auto env = nlohmann::json::parse(header);
    EXPECT_FALSE(env.contains("seq"));
    EXPECT_EQ(env["kind"], "view");
    EXPECT_EQ(env["ch"], "view");
    EXPECT_EQ(std::vector<std::uint8_t>(f.bytes.end() - 4, f.bytes.end()), v.screenshot);
}

TEST(Wire, ReuseViewCarriesNoImageBytes) {
    EnrichedView v;
    v.sequence = 5;
    v.imageWidth = 4;
    v.imageHeight = 4;
    v.reuseImage = true;
    v.displayPath = "/a";
    Frame f = encode(make_message(v));
    const std::uint32_t h = (f.bytes[8] << 24) | (f.bytes[9] << 16) | (f.bytes[10] << 8) | f.bytes[11];
    EXPECT_EQ(f.bytes.size(), 12 + h);
}

TEST(Wire, DecodeRejectsMalformedInput) {
    EXPECT_EQ(code_of([] { decode(std::string_view("{not json"), FrameType::Text); }), ErrorCode::MalformedFrame);
    EXPECT_EQ(code_of([] { decode(std::string_view(""), FrameType::Text); }), ErrorCode::MalformedFrame);
    EXPECT_EQ(code_of([] {
                  decode(std::string_view(R"({"body":{},"ch":"cmd","kind":"teleport","seq":1,"v":1})"), FrameType::Text);
              }),
              ErrorCode::UnknownKind);
    EXPECT_EQ(code_of([] {
                  decode(std::string_view(R"({"body":{"t":0,"x":1,"y":1},"ch":"cmd","kind":"click","seq":1,"v":2})"),
                         FrameType::Text);
              }),
              ErrorCode::MalformedFrame);
    // A view on a text frame breaks the frame discipline.
    EXPECT_EQ(code_of([] {
                  decode(std::string_view(R"({"body":{},"ch":"view","kind":"view","seq":1,"v":1})"), FrameType::Text);
              }),
              ErrorCode::MalformedFrame);
    std::vector<std::uint8_t> shortFrame{0, 0, 0};
    EXPECT_EQ(code_of([&] { decode(shortFrame, FrameType::Binary); }), ErrorCode::MalformedFrame);
}

TEST(Wire, ValidationRules) {
    EXPECT_EQ(code_of([] { validate(InputEvent::click(-1, 3)); }), ErrorCode::InvalidMessage);
    EXPECT_EQ(code_of([] { validate(InputEvent::click(std::nan(""), 3)); }), ErrorCode::InvalidMessage);
    EXPECT_EQ(code_of([] { validate(InputEvent::navigate("https://evil.example/")); }), ErrorCode::InvalidMessage);
    EXPECT_EQ(code_of([] { validate(InputEvent::text_changed("", "x")); }), ErrorCode::InvalidMessage);
    InputEvent stray = InputEvent::click(1, 1);
    stray.key = "a";
    EXPECT_EQ(code_of([&] { validate(stray); }), ErrorCode::InvalidMessage);
    EXPECT_EQ(code_of([] { encode(make_message(0, InputEvent::click(1, 1))); }), ErrorCode::InvalidMessage);

    EnrichedView v;
    v.sequence = 1;
    v.imageWidth = 100;
    v.imageHeight = 100;
    v.screenshot = {1};
    v.displayPath = "/";
    v.elements.push_back({"a", ElementKind::Hyperlink, 0, 0, 10, 10, "x", "https://origin.example/", false});
    EXPECT_EQ(code_of([&] { validate(v); }), ErrorCode::InvalidMessage);
    v.elements[0].href = "/ok";
    EXPECT_NO_THROW(validate(v));
    v.elements[0].width = 200;
    EXPECT_EQ(code_of([&] { validate(v); }), ErrorCode::InvalidMessage);
    v.elements[0].width = 10;
    v.screenshot.clear();
    EXPECT_EQ(code_of([&] { validate(v); }), ErrorCode::InvalidMessage);
}

TEST(Wire, FrameReaderEnforcesSequence) {
    FrameReader reader;
    auto frame = [](std::uint64_t seq) { return encode(make_message(seq, InputEvent::key_press("a"))); };
    auto f1 = frame(1), f2 = frame(2), f4 = frame(4);
    EXPECT_EQ(reader.read(f1.bytes, f1.type).sequence, 1u);
    EXPECT_EQ(code_of([&] { reader.read(f1.bytes, f1.type); }), ErrorCode::SequenceRegression);
    EXPECT_EQ(reader.read(f2.bytes, f2.type).sequence, 2u);
    EXPECT_EQ(code_of([&] { reader.read(f4.bytes, f4.type); }), ErrorCode::SequenceGap);
    EXPECT_EQ(reader.last_sequence(), 2u);
}

TEST(Wire, EveryKindHasOneChannelAndFrameType) {
    for (auto tagName : {"hello", "click", "key", "text", "paste", "scroll", "navigate", "back", "forward", "drag",
                         "view", "error"}) {
        auto k = kind_from_tag(tagName);
        ASSERT_TRUE(k) << tagName;
        EXPECT_EQ(tag(*k), tagName);
        EXPECT_EQ(frame_type_of(*k) == FrameType::Binary, *k == MessageKind::View);
        EXPECT_EQ(channel_of(*k) == Channel::View, *k == MessageKind::View);
    }
    EXPECT_FALSE(kind_from_tag("hover"));
}
