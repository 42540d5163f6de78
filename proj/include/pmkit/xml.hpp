#pragma once

// Minimal non-validating XML reader for the XES and PNML subsets. Keeps the
// byte span of each element so unknown content can be written back verbatim.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmkit::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;  // decoded character data directly inside this element
    std::size_t begin = 0;  // offset of '<'
    std::size_t end = 0;    // one past the closing '>'

    const std::string* attribute(std::string_view key) const;
    const Element* child(std::string_view child_name) const;
};

struct Location {
    std::size_t line = 0;
    std::size_t column = 0;
};

class Document {
public:
    // Throws ParseError with line/column on malformed input.
    explicit Document(std::string source);

    const Element& root() const { return root_; }
    std::string_view raw(const Element& e) const;
    Location locate(std::size_t offset) const;

private:
    std::string source_;
    Element root_;
};

// Escapes &, <, > and (in attribute mode) quotes.
std::string escape(std::string_view text, bool attribute = true);

}  // namespace pmkit::xml
