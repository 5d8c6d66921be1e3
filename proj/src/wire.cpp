#include "mirrorcast/wire.hpp"

#include "mirrorcast/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <utility>

namespace mirrorcast::wire {

using nlohmann::json;

namespace {

constexpr std::size_t kBinaryPrefix = 12;

constexpr std::array<std::pair<MessageKind, std::string_view>, 12> kKindTags{{
    {MessageKind::Hello, "hello"},
    {MessageKind::Click, "click"},
    {MessageKind::KeyPress, "key"},
    {MessageKind::TextChanged, "text"},
    {MessageKind::Paste, "paste"},
    {MessageKind::Scroll, "scroll"},
    {MessageKind::Navigate, "navigate"},
    {MessageKind::HistoryBack, "back"},
    {MessageKind::HistoryForward, "forward"},
    {MessageKind::DragMove, "drag"},
    {MessageKind::View, "view"},
    {MessageKind::Error, "error"},
}};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidMessage, what); }
[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFrame, what); }

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0; }

std::string_view channel_tag(Channel c) { return c == Channel::View ? "view" : "cmd"; }

// --- typed field access on decode; any mismatch is a malformed frame ---

const json& field(const json& obj, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end()) malformed(std::string("missing field '") + name + "'");
    return *it;
}

std::string get_string(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_string()) malformed(std::string("field '") + name + "' is not a string");
    return v.get<std::string>();
}

double get_number(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number()) malformed(std::string("field '") + name + "' is not a number");
    return v.get<double>();
}

std::int64_t get_int(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number_integer()) malformed(std::string("field '") + name + "' is not an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number_unsigned()) malformed(std::string("field '") + name + "' is not an unsigned integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_boolean()) malformed(std::string("field '") + name + "' is not a boolean");
    return v.get<bool>();
}

std::optional<ElementKind> element_kind_from_tag(std::string_view t) {
    if (t == "textbox") return ElementKind::TextBox;
    if (t == "button") return ElementKind::Button;
    if (t == "link") return ElementKind::Hyperlink;
    return std::nullopt;
}

// --- body <-> json ---

json input_to_json(const InputEvent& e) {
    json j;
    j["t"] = e.timestampMs;
    switch (e.kind) {
        case InputKind::Click:
        case InputKind::Scroll:
            j["x"] = e.x;
            j["y"] = e.y;
            break;
        case InputKind::DragMove:
            j["x"] = e.x;
            j["y"] = e.y;
            j["toX"] = e.toX;
            j["toY"] = e.toY;
            break;
        case InputKind::KeyPress: j["key"] = e.key; break;
        case InputKind::TextChanged:
        case InputKind::Paste:
            j["id"] = e.elementId;
            j["text"] = e.text;
            break;
        case InputKind::Navigate: j["url"] = e.url; break;
        case InputKind::HistoryBack:
        case InputKind::HistoryForward: break;
    }
    return j;
}

InputEvent input_from_json(InputKind kind, const json& j) {
    InputEvent e;
    e.kind = kind;
    e.timestampMs = get_int(j, "t");
    switch (kind) {
        case InputKind::Click:
        case InputKind::Scroll:
            e.x = get_number(j, "x");
            e.y = get_number(j, "y");
            break;
        case InputKind::DragMove:
            e.x = get_number(j, "x");
            e.y = get_number(j, "y");
            e.toX = get_number(j, "toX");
            e.toY = get_number(j, "toY");
            break;
        case InputKind::KeyPress: e.key = get_string(j, "key"); break;
        case InputKind::TextChanged:
        case InputKind::Paste:
            e.elementId = get_string(j, "id");
            e.text = get_string(j, "text");
            break;
        case InputKind::Navigate: e.url = get_string(j, "url"); break;
        case InputKind::HistoryBack:
        case InputKind::HistoryForward: break;
    }
    return e;
}

json element_to_json(const UIElementDescriptor& d) {
    json j = {
        {"id", d.elementId}, {"kind", tag(d.kind)}, {"x", d.x},       {"y", d.y},
        {"w", d.width},      {"h", d.height},       {"text", d.text}, {"focused", d.focused},
    };
    if (d.kind == ElementKind::Hyperlink) j["href"] = d.href;
    return j;
}

UIElementDescriptor element_from_json(const json& j) {
    if (!j.is_object()) malformed("element is not an object");
    UIElementDescriptor d;
    d.elementId = get_string(j, "id");
    auto kind = element_kind_from_tag(get_string(j, "kind"));
    if (!kind) malformed("unknown element kind");
    d.kind = *kind;
    d.x = get_number(j, "x");
    d.y = get_number(j, "y");
    d.width = get_number(j, "w");
    d.height = get_number(j, "h");
    d.text = get_string(j, "text");
    d.focused = get_bool(j, "focused");
    if (d.kind == ElementKind::Hyperlink) d.href = get_string(j, "href");
    return d;
}

json view_to_json(const EnrichedView& v) {
    json elements = json::array();
    for (const auto& d : v.elements) elements.push_back(element_to_json(d));
    return {
        {"w", v.imageWidth},
        {"h", v.imageHeight},
        {"reuse", v.reuseImage},
        {"elements", std::move(elements)},
        {"title", v.pageTitle},
        {"favicon", v.faviconPath},
        {"path", v.displayPath},
        {"back", v.historyBack},
        {"forward", v.historyForward},
    };
}

EnrichedView view_from_json(const json& j) {
    EnrichedView v;
    v.imageWidth = static_cast<int>(get_int(j, "w"));
    v.imageHeight = static_cast<int>(get_int(j, "h"));
    v.reuseImage = get_bool(j, "reuse");
    const json& elements = field(j, "elements");
    if (!elements.is_array()) malformed("elements is not an array");
    v.elements.reserve(elements.size());
    for (const auto& e : elements) v.elements.push_back(element_from_json(e));
    v.pageTitle = get_string(j, "title");
    v.faviconPath = get_string(j, "favicon");
    v.displayPath = get_string(j, "path");
    v.historyBack = static_cast<int>(get_int(j, "back"));
    v.historyForward = static_cast<int>(get_int(j, "forward"));
    return v;
}

json body_to_json(const WireMessage& m) {
    return std::visit(
        [](const auto& b) -> json {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Hello>) {
                return {{"width", b.viewport.width}, {"height", b.viewport.height}, {"path", b.path}};
            } else if constexpr (std::is_same_v<T, InputEvent>) {
                return input_to_json(b);
            } else if constexpr (std::is_same_v<T, EnrichedView>) {
                return view_to_json(b);
            } else {
                return {{"code", b.code}, {"message", b.message}};
            }
        },
        m.body);
}

Body body_from_json(MessageKind kind, const json& j) {
    if (!j.is_object()) malformed("body is not an object");
    if (kind == MessageKind::Hello) {
        Hello h;
        h.viewport.width = static_cast<int>(get_int(j, "width"));
        h.viewport.height = static_cast<int>(get_int(j, "height"));
        h.path = get_string(j, "path");
        return h;
    }
    if (kind == MessageKind::View) return view_from_json(j);
    if (kind == MessageKind::Error) return ProtocolError{get_string(j, "code"), get_string(j, "message")};
    return input_from_json(*input_kind(kind), j);
}

std::string dump(const json& j) {
    try {
        return j.dump();
    } catch (const json::type_error& e) {
        invalid(std::string("string field is not valid UTF-8: ") + e.what());
    }
}

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | in[static_cast<std::size_t>(i)];
    return v;
}

// Shared envelope parsing: version, channel and kind checks.
MessageKind envelope_kind(const json& env) {
    if (!env.is_object()) malformed("envelope is not an object");
    if (get_int(env, "v") != kProtocolVersion) malformed("unsupported protocol version");
    std::string kind_tag = get_string(env, "kind");
    auto kind = kind_from_tag(kind_tag);
    if (!kind) throw Error(ErrorCode::UnknownKind, "unknown message kind '" + kind_tag + "'");
    std::string ch = get_string(env, "ch");
    if (ch != channel_tag(channel_of(*kind))) malformed("kind '" + kind_tag + "' on wrong channel '" + ch + "'");
    return *kind;
}

json parse_json(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded()) malformed("not valid JSON");
    return j;
}

}  // namespace

InputEvent InputEvent::click(double x, double y, std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::Click;
    e.x = x;
    e.y = y;
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::key_press(std::string key, std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::KeyPress;
    e.key = std::move(key);
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::text_changed(std::string elementId, std::string text, std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::TextChanged;
    e.elementId = std::move(elementId);
    e.text = std::move(text);
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::paste(std::string elementId, std::string text, std::int64_t t) {
    InputEvent e = text_changed(std::move(elementId), std::move(text), t);
    e.kind = InputKind::Paste;
    return e;
}

InputEvent InputEvent::scroll(double x, double y, std::int64_t t) {
    InputEvent e = click(x, y, t);
    e.kind = InputKind::Scroll;
    return e;
}

InputEvent InputEvent::navigate(std::string url, std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::Navigate;
    e.url = std::move(url);
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::history_back(std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::HistoryBack;
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::history_forward(std::int64_t t) {
    InputEvent e;
    e.kind = InputKind::HistoryForward;
    e.timestampMs = t;
    return e;
}

InputEvent InputEvent::drag(double fromX, double fromY, double toX, double toY, std::int64_t t) {
    InputEvent e = click(fromX, fromY, t);
    e.kind = InputKind::DragMove;
    e.toX = toX;
    e.toY = toY;
    return e;
}

std::string_view tag(MessageKind kind) {
    for (const auto& [k, t] : kKindTags)
        if (k == kind) return t;
    return "";
}

std::optional<MessageKind> kind_from_tag(std::string_view t) {
    for (const auto& [k, name] : kKindTags)
        if (name == t) return k;
    return std::nullopt;
}

std::string_view tag(ElementKind kind) {
    switch (kind) {
        case ElementKind::TextBox: return "textbox";
        case ElementKind::Button: return "button";
        case ElementKind::Hyperlink: return "link";
    }
    return "";
}

std::string_view tag(InputKind kind) { return tag(message_kind(kind)); }

MessageKind message_kind(InputKind kind) {
    switch (kind) {
        case InputKind::Click: return MessageKind::Click;
        case InputKind::KeyPress: return MessageKind::KeyPress;
        case InputKind::TextChanged: return MessageKind::TextChanged;
        case InputKind::Paste: return MessageKind::Paste;
        case InputKind::Scroll: return MessageKind::Scroll;
        case InputKind::Navigate: return MessageKind::Navigate;
        case InputKind::HistoryBack: return MessageKind::HistoryBack;
        case InputKind::HistoryForward: return MessageKind::HistoryForward;
        case InputKind::DragMove: return MessageKind::DragMove;
    }
    return MessageKind::Click;
}

std::optional<InputKind> input_kind(MessageKind kind) {
    switch (kind) {
        case MessageKind::Click: return InputKind::Click;
        case MessageKind::KeyPress: return InputKind::KeyPress;
        case MessageKind::TextChanged: return InputKind::TextChanged;
        case MessageKind::Paste: return InputKind::Paste;
        case MessageKind::Scroll: return InputKind::Scroll;
        case MessageKind::Navigate: return InputKind::Navigate;
        case MessageKind::HistoryBack: return InputKind::HistoryBack;
        case MessageKind::HistoryForward: return InputKind::HistoryForward;
        case MessageKind::DragMove: return InputKind::DragMove;
        default: return std::nullopt;
    }
}

Channel channel_of(MessageKind kind) { return kind == MessageKind::View ? Channel::View : Channel::Command; }

FrameType frame_type_of(MessageKind kind) { return kind == MessageKind::View ? FrameType::Binary : FrameType::Text; }

WireMessage make_message(std::uint64_t sequence, Hello hello) {
    return {Channel::Command, MessageKind::Hello, sequence, std::move(hello)};
}

WireMessage make_message(std::uint64_t sequence, InputEvent event) {
    MessageKind kind = message_kind(event.kind);
    return {Channel::Command, kind, sequence, std::move(event)};
}

WireMessage make_message(EnrichedView view) {
    std::uint64_t seq = view.sequence;
    return {Channel::View, MessageKind::View, seq, std::move(view)};
}

WireMessage make_message(std::uint64_t sequence, ProtocolError error) {
    return {Channel::Command, MessageKind::Error, sequence, std::move(error)};
}

void validate(const InputEvent& e) {
    if (e.timestampMs < 0) invalid("negative timestamp");
    const bool pointer = e.kind == InputKind::Click || e.kind == InputKind::Scroll || e.kind == InputKind::DragMove;
    const bool drag = e.kind == InputKind::DragMove;
    const bool keyed = e.kind == InputKind::KeyPress;
    const bool textual = e.kind == InputKind::TextChanged || e.kind == InputKind::Paste;
    const bool nav = e.kind == InputKind::Navigate;

    if (pointer) {
        if (!finite_non_negative(e.x) || !finite_non_negative(e.y)) invalid("coordinates must be finite and non-negative");
    } else if (e.x != 0 || e.y != 0) {
        invalid("coordinates set on a non-pointer event");
    }
    if (drag) {
        if (!finite_non_negative(e.toX) || !finite_non_negative(e.toY)) invalid("drag target must be finite and non-negative");
    } else if (e.toX != 0 || e.toY != 0) {
        invalid("drag target set on a non-drag event");
    }
    if (keyed == e.key.empty()) invalid(keyed ? "key press without key" : "key set on a non-key event");
    if (textual) {
        if (e.elementId.empty()) invalid("text event without element id");
    } else if (!e.elementId.empty() || !e.text.empty()) {
        invalid("element text set on a non-text event");
    }
    if (nav) {
        if (e.url.empty() || e.url.front() != '/') invalid("navigate url must be a proxy path starting with '/'");
    } else if (!e.url.empty()) {
        invalid("url set on a non-navigate event");
    }
}

void validate(const EnrichedView& v) {
    if (v.imageWidth <= 0 || v.imageHeight <= 0) invalid("image dimensions must be positive");
    if (v.reuseImage != v.screenshot.empty()) invalid("screenshot must be empty exactly when reuseImage is set");
    if (v.displayPath.empty() || v.displayPath.front() != '/') invalid("displayPath must start with '/'");
    if (v.historyBack < 0 || v.historyForward < 0) invalid("negative history depth");
    for (const auto& d : v.elements) {
        if (d.elementId.empty()) invalid("element without id");
        if (!std::isfinite(d.x) || !std::isfinite(d.y) || !std::isfinite(d.width) || !std::isfinite(d.height))
            invalid("non-finite element geometry");
        if (d.width <= 0 || d.height <= 0) invalid("element box must have positive size");
        if (d.x < 0 || d.y < 0 || d.x + d.width > v.imageWidth || d.y + d.height > v.imageHeight)
            invalid("element box " + d.elementId + " exceeds the screenshot");
        if (d.kind != ElementKind::Hyperlink && !d.href.empty()) invalid("href on a non-link element");
        if (!d.href.empty() && (d.href.front() != '/' || d.href.starts_with("//")))
            invalid("href must be a proxy-local path: " + d.href);
    }
}

void validate(const WireMessage& m) {
    if (m.sequence == 0) invalid("sequence numbers start at 1");
    if (m.channel != channel_of(m.kind)) invalid("message kind on wrong channel");
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Hello>) {
                if (m.kind != MessageKind::Hello) invalid("body does not match kind");
                if (b.viewport.width <= 0 || b.viewport.height <= 0) invalid("viewport must be positive");
                if (b.path.empty() || b.path.front() != '/') invalid("hello path must start with '/'");
            } else if constexpr (std::is_same_v<T, InputEvent>) {
                if (m.kind != message_kind(b.kind)) invalid("body does not match kind");
                validate(b);
            } else if constexpr (std::is_same_v<T, EnrichedView>) {
                if (m.kind != MessageKind::View) invalid("body does not match kind");
                if (b.sequence != m.sequence) invalid("view sequence differs from message sequence");
                validate(b);
            } else {
                if (m.kind != MessageKind::Error) invalid("body does not match kind");
            }
        },
        m.body);
}

Frame encode(const WireMessage& m) {
    validate(m);
    json env = {
        {"v", kProtocolVersion},
        {"ch", channel_tag(m.channel)},
        {"kind", tag(m.kind)},
        {"body", body_to_json(m)},
    };
    Frame frame;
    frame.type = frame_type_of(m.kind);
    if (frame.type == FrameType::Text) {
        env["seq"] = m.sequence;
        std::string text = dump(env);
        frame.bytes.assign(text.begin(), text.end());
        return frame;
    }
    const auto& view = std::get<EnrichedView>(m.body);
    std::string header = dump(env);
    frame.bytes.reserve(kBinaryPrefix + header.size() + view.screenshot.size());
    put_be(frame.bytes, m.sequence, 8);
    put_be(frame.bytes, header.size(), 4);
    frame.bytes.insert(frame.bytes.end(), header.begin(), header.end());
    frame.bytes.insert(frame.bytes.end(), view.screenshot.begin(), view.screenshot.end());
    return frame;
}

WireMessage decode(std::span<const std::uint8_t> frame, FrameType type) {
    if (frame.empty()) malformed("empty frame");
    WireMessage m;
    if (type == FrameType::Text) {
        json env = parse_json({reinterpret_cast<const char*>(frame.data()), frame.size()});
        m.kind = envelope_kind(env);
        if (m.kind == MessageKind::View) malformed("view messages must use binary frames");
        m.sequence = get_uint(env, "seq");
        m.body = body_from_json(m.kind, field(env, "body"));
    } else {
        if (frame.size() < kBinaryPrefix) malformed("binary frame shorter than its prefix");
        m.sequence = get_be(frame, 8);
        std::uint64_t header_len = get_be(frame.subspan(8), 4);
        if (header_len > frame.size() - kBinaryPrefix) malformed("binary header length exceeds frame");
        auto header = frame.subspan(kBinaryPrefix, header_len);
        json env = parse_json({reinterpret_cast<const char*>(header.data()), header.size()});
        m.kind = envelope_kind(env);
        if (m.kind != MessageKind::View) malformed("only view messages use binary frames");
        EnrichedView view = view_from_json(field(env, "body"));
        auto image = frame.subspan(kBinaryPrefix + header_len);
        view.screenshot.assign(image.begin(), image.end());
        view.sequence = m.sequence;
        m.body = std::move(view);
    }
    m.channel = channel_of(m.kind);
    validate(m);
    return m;
}

WireMessage decode(std::string_view frame, FrameType type) {
    return decode(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(frame.data()), frame.size()),
                  type);
}

WireMessage FrameReader::read(std::span<const std::uint8_t> frame, FrameType type) {
    WireMessage m = decode(frame, type);
    if (m.sequence <= last_)
        throw Error(ErrorCode::SequenceRegression,
                    "sequence " + std::to_string(m.sequence) + " after " + std::to_string(last_));
    if (m.sequence != last_ + 1)
        throw Error(ErrorCode::SequenceGap,
                    "sequence " + std::to_string(m.sequence) + " skips from " + std::to_string(last_));
    last_ = m.sequence;
    return m;
}

}  // namespace mirrorcast::wire
