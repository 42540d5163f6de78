#include "pmkit/xml.hpp"

#include <algorithm>
#include <cstdint>

#include "pmkit/error.hpp"

namespace pmkit::xml {

const std::string* Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

const Element* Element::child(std::string_view child_name) const {
    for (const auto& c : children)
        if (c.name == child_name) return &c;
    return nullptr;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == ':' || c == '-' || c == '.' || u >= 0x80;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Parser {
public:
    Parser(const std::string& src, const Document& doc) : s_(src), doc_(doc) {}

    Element parse_document() {
        skip_misc(true);
        if (!at('<')) fail("expected root element");
        Element root = parse_element(0);
        skip_misc(false);
        if (pos_ < s_.size()) fail("unexpected content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t offset) const {
        auto loc = doc_.locate(offset);
        throw ParseError("malformed XML: " + what, loc.line, loc.column);
    }

    bool at(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
    bool starts(std::string_view lit) const { return s_.compare(pos_, lit.size(), lit) == 0; }
    void expect(std::string_view lit) {
        if (!starts(lit)) fail("expected '" + std::string(lit) + "'");
        pos_ += lit.size();
    }
    void skip_space() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }
    void skip_until(std::string_view terminator, const char* what) {
        auto found = s_.find(terminator, pos_);
        if (found == std::string::npos) fail(std::string("unterminated ") + what);
        pos_ = found + terminator.size();
    }

    // Whitespace, comments, processing instructions and (in the prolog) DOCTYPE.
    void skip_misc(bool prolog) {
        for (;;) {
            skip_space();
            if (starts("<?")) skip_until("?>", "processing instruction");
            else if (starts("<!--")) skip_until("-->", "comment");
            else if (prolog && starts("<!DOCTYPE")) skip_doctype();
            else return;
        }
    }

    void skip_doctype() {
        int depth = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '[') ++depth;
            else if (c == ']') --depth;
            else if (c == '>' && depth <= 0) return;
        }
        fail("unterminated DOCTYPE");
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        if (start == pos_) fail("expected a name");
        return s_.substr(start, pos_ - start);
    }

    void decode_entity(std::string& out) {
        std::size_t start = pos_;
        auto semi = s_.find(';', pos_);
        if (semi == std::string::npos || semi - pos_ > 12) fail("unterminated entity reference");
        std::string_view ent(s_.data() + pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
            std::uint32_t cp = 0;
            bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
            std::size_t i = hex ? 2 : 1;
            if (i >= ent.size()) fail_at("empty character reference", start);
            for (; i < ent.size(); ++i) {
                char c = ent[i];
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else fail_at("invalid character reference", start);
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
                if (cp > 0x10FFFF) fail_at("character reference out of range", start);
            }
            append_utf8(out, cp);
        } else {
            fail_at("unknown entity '&" + std::string(ent) + ";'", start);
        }
    }

    std::string parse_attribute_value() {
        if (!at('"') && !at('\'')) fail("expected quoted attribute value");
        char quote = s_[pos_++];
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != quote) {
            if (s_[pos_] == '&') decode_entity(out);
            else if (s_[pos_] == '<') fail("'<' in attribute value");
            else out += s_[pos_++];
        }
        if (pos_ >= s_.size()) fail("unterminated attribute value");
        ++pos_;
        return out;
    }

    Element parse_element(int depth) {
        if (depth > 256) fail("element nesting too deep");
        Element e;
        e.begin = pos_;
        expect("<");
        e.name = parse_name();
        for (;;) {
            bool had_space = pos_ < s_.size() && is_space(s_[pos_]);
            skip_space();
            if (starts("/>")) {
                pos_ += 2;
                e.end = pos_;
                return e;
            }
            if (at('>')) {
                ++pos_;
                break;
            }
            if (!had_space) fail("expected whitespace, '>' or '/>'");
            std::string key = parse_name();
            skip_space();
            expect("=");
            skip_space();
            if (e.attribute(key)) fail("duplicate attribute '" + key + "'");
            e.attributes.emplace_back(std::move(key), parse_attribute_value());
        }
        for (;;) {
            if (pos_ >= s_.size()) fail_at("unclosed element <" + e.name + ">", e.begin);
            if (starts("</")) {
                pos_ += 2;
                std::size_t name_at = pos_;
                std::string closing = parse_name();
                if (closing != e.name)
                    fail_at("mismatched closing tag </" + closing + "> for <" + e.name + ">", name_at);
                skip_space();
                expect(">");
                e.end = pos_;
                return e;
            }
            if (starts("<!--")) {
                skip_until("-->", "comment");
            } else if (starts("<![CDATA[")) {
                pos_ += 9;
                auto close = s_.find("]]>", pos_);
                if (close == std::string::npos) fail("unterminated CDATA section");
                e.text.append(s_, pos_, close - pos_);
                pos_ = close + 3;
            } else if (starts("<?")) {
                skip_until("?>", "processing instruction");
            } else if (at('<')) {
                e.children.push_back(parse_element(depth + 1));
            } else if (at('&')) {
                decode_entity(e.text);
            } else {
                e.text += s_[pos_++];
            }
        }
    }

    const std::string& s_;
    const Document& doc_;
    std::size_t pos_ = 0;
};

}  // namespace

Document::Document(std::string source) : source_(std::move(source)) {
    // Skip a UTF-8 byte order mark.
    if (source_.rfind("\xEF\xBB\xBF", 0) == 0) source_.erase(0, 3);
    root_ = Parser(source_, *this).parse_document();
}

std::string_view Document::raw(const Element& e) const {
    return std::string_view(source_).substr(e.begin, e.end - e.begin);
}

Location Document::locate(std::size_t offset) const {
    offset = std::min(offset, source_.size());
    Location loc{1, 1};
    for (std::size_t i = 0; i < offset; ++i) {
        if (source_[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

std::string escape(std::string_view text, bool attribute) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += attribute ? "&quot;" : "\""; break;
            case '\'': out += attribute ? "&apos;" : "'"; break;
            case '\n': out += attribute ? "&#10;" : "\n"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += attribute ? "&#9;" : "\t"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace pmkit::xml
