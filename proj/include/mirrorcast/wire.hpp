#pragma once

// Message types and codec for the two WebSocket channels between the viewer
// and the gateway.
//
// Text frames carry one UTF-8 JSON object:
//
//   {"body":{...},"ch":"cmd"|"view","kind":"<tag>","seq":N,"v":1}
//
// Views travel as binary frames so screenshot bytes are never re-encoded:
//
//   offset 0   uint64 big-endian  sequence
//   offset 8   uint32 big-endian  header length H
//   offset 12  H bytes            UTF-8 JSON {"body":{...},"ch":"view","kind":"view","v":1}
//   offset 12+H                   PNG bytes (empty when body.reuse is true)
//
// Keys are emitted in sorted order, so encoding is deterministic.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mirrorcast::wire {

inline constexpr int kProtocolVersion = 1;

enum class Channel { View, Command };
enum class FrameType { Text, Binary };

enum class MessageKind {
    Hello,
    Click,
    KeyPress,
    TextChanged,
    Paste,
    Scroll,
    Navigate,
    HistoryBack,
    HistoryForward,
    DragMove,
    View,
    Error,
};

enum class InputKind {
    Click,
    KeyPress,
    TextChanged,
    Paste,
    Scroll,
    Navigate,
    HistoryBack,
    HistoryForward,
    DragMove,
};

enum class ElementKind { TextBox, Button, Hyperlink };

struct Viewport {
    int width = 0;
    int height = 0;
    bool operator==(const Viewport&) const = default;
};

/// One captured viewer action. Only the fields relevant to `kind` may be set;
/// the rest stay at their defaults (validate() enforces this).
///
/// Click:       x, y
/// DragMove:    x, y (pointer down), toX, toY (pointer up)
/// Scroll:      x, y (viewer scroll offset)
/// KeyPress:    key (UI-events key value: "a", "Enter", "Backspace")
/// TextChanged: elementId, text (complete new value, never a delta)
/// Paste:       elementId, text
/// Navigate:    url (proxy path, starts with "/")
struct InputEvent {
    InputKind kind = InputKind::Click;
    double x = 0;
    double y = 0;
    double toX = 0;
    double toY = 0;
    std::string key;
    std::string elementId;
    std::string text;
    std::string url;
    std::int64_t timestampMs = 0;

    bool operator==(const InputEvent&) const = default;

    static InputEvent click(double x, double y, std::int64_t t = 0);
    static InputEvent key_press(std::string key, std::int64_t t = 0);
    static InputEvent text_changed(std::string elementId, std::string text, std::int64_t t = 0);
    static InputEvent paste(std::string elementId, std::string text, std::int64_t t = 0);
    static InputEvent scroll(double x, double y, std::int64_t t = 0);
    static InputEvent navigate(std::string url, std::int64_t t = 0);
    static InputEvent history_back(std::int64_t t = 0);
    static InputEvent history_forward(std::int64_t t = 0);
    static InputEvent drag(double fromX, double fromY, double toX, double toY, std::int64_t t = 0);
};

struct UIElementDescriptor {
    std::string elementId;
    ElementKind kind = ElementKind::Button;
    double x = 0;
    double y = 0;
    double width = 0;
    double height = 0;
    std::string text;
    std::string href;  // hyperlinks only; proxy-local path or empty for script handlers
    bool focused = false;

    bool operator==(const UIElementDescriptor&) const = default;
};

struct EnrichedView {
    std::uint64_t sequence = 0;
    std::vector<std::uint8_t> screenshot;  // PNG; empty iff reuseImage
    bool reuseImage = false;
    int imageWidth = 0;
    int imageHeight = 0;
    std::vector<UIElementDescriptor> elements;
    std::string pageTitle;
    std::string faviconPath;
    std::string displayPath;
    int historyBack = 0;
    int historyForward = 0;

    bool operator==(const EnrichedView&) const = default;
};

/// First message on the command channel: the viewer's viewport and the path
/// it was opened at.
struct Hello {
    Viewport viewport;
    std::string path;
    bool operator==(const Hello&) const = default;
};

/// Sent by the server on the command channel right before it closes a session.
struct ProtocolError {
    std::string code;
    std::string message;
    bool operator==(const ProtocolError&) const = default;
};

using Body = std::variant<Hello, InputEvent, EnrichedView, ProtocolError>;

struct WireMessage {
    Channel channel = Channel::Command;
    MessageKind kind = MessageKind::Hello;
    std::uint64_t sequence = 0;
    Body body;

    bool operator==(const WireMessage&) const = default;
};

struct Frame {
    FrameType type = FrameType::Text;
    std::vector<std::uint8_t> bytes;

    std::string_view text() const {
        return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
    }
};

std::string_view tag(MessageKind kind);
std::optional<MessageKind> kind_from_tag(std::string_view tag);
std::string_view tag(ElementKind kind);
std::string_view tag(InputKind kind);
MessageKind message_kind(InputKind kind);
std::optional<InputKind> input_kind(MessageKind kind);
Channel channel_of(MessageKind kind);
FrameType frame_type_of(MessageKind kind);

/// Builders that fill channel/kind consistently.
WireMessage make_message(std::uint64_t sequence, Hello hello);
WireMessage make_message(std::uint64_t sequence, InputEvent event);
WireMessage make_message(EnrichedView view);
WireMessage make_message(std::uint64_t sequence, ProtocolError error);

/// Throws Error(InvalidMessage) describing the first violated invariant.
void validate(const WireMessage& message);
void validate(const EnrichedView& view);
void validate(const InputEvent& event);

Frame encode(const WireMessage& message);

/// Stateless decode. Throws MalformedFrame, UnknownKind or InvalidMessage.
WireMessage decode(std::span<const std::uint8_t> frame, FrameType type);
WireMessage decode(std::string_view frame, FrameType type);

/// Issues 1, 2, 3, ... for one (session, direction, channel).
class SequenceCounter {
public:
    std::uint64_t next() noexcept { return ++last_; }
    std::uint64_t last() const noexcept { return last_; }

private:
    std::uint64_t last_ = 0;
};

/// Receiving side of one (session, direction, channel): decodes and enforces
/// that sequence numbers arrive as 1, 2, 3, ... with no gaps.
class FrameReader {
public:
    WireMessage read(std::span<const std::uint8_t> frame, FrameType type);
    std::uint64_t last_sequence() const noexcept { return last_; }

private:
    std::uint64_t last_ = 0;
};

}  // namespace mirrorcast::wire
