#include "pmkit/net_io.hpp"

#include <charconv>

#include "pmkit/error.hpp"
#include "pmkit/xml.hpp"

namespace pmkit {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

const xml::Element* text_child(const xml::Element& e) { return e.child("text"); }

std::uint32_t token_count(const xml::Document& doc, const xml::Element& holder) {
    const xml::Element* text = text_child(holder);
    std::string value = text ? trim(text->text) : trim(holder.text);
    std::uint32_t n = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), n);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        auto loc = doc.locate(holder.begin);
        throw ParseError("invalid token count '" + value + "'", loc.line, loc.column);
    }
    return n;
}

// Net elements may sit directly under <net> or inside (nested) <page>s.
void collect(const xml::Document& doc, const xml::Element& container, PetriNet& net) {
    for (const auto& e : container.children) {
        const std::string* id = e.attribute("id");
        auto require_id = [&]() -> const std::string& {
            if (!id || id->empty()) {
                auto loc = doc.locate(e.begin);
                throw ParseError("<" + e.name + "> without id", loc.line, loc.column);
            }
            return *id;
        };
        if (e.name == "page") {
            collect(doc, e, net);
        } else if (e.name == "place") {
            net.places.push_back(require_id());
            if (const auto* im = e.child("initialMarking")) net.initial_marking.add(*id, token_count(doc, *im));
        } else if (e.name == "transition") {
            Transition t{require_id(), std::nullopt};
            if (const auto* name = e.child("name"); name && text_child(*name)) t.label = trim(text_child(*name)->text);
            for (const auto& c : e.children) {
                const std::string* activity = c.attribute("activity");
                if (c.name == "toolspecific" && activity && *activity == "$invisible$") t.label.reset();
            }
            net.transitions.push_back(std::move(t));
        } else if (e.name == "arc") {
            const std::string* src = e.attribute("source");
            const std::string* dst = e.attribute("target");
            if (!src || !dst) {
                auto loc = doc.locate(e.begin);
                throw ParseError("<arc> needs source and target", loc.line, loc.column);
            }
            net.arcs.push_back({*src, *dst});
        }
    }
}

}  // namespace

PetriNet parse_pnml(std::string_view text) {
    xml::Document doc{std::string(text)};
    const xml::Element& root = doc.root();
    const xml::Element* net_el = root.name == "net" ? &root : root.child("net");
    if (root.name != "pnml" && root.name != "net") throw ParseError("root element must be <pnml>", 1, 1);
    if (!net_el) throw ParseError("<pnml> contains no <net>", 1, 1);
    PetriNet net;
    if (const std::string* id = net_el->attribute("id")) net.name = *id;
    if (const auto* name = net_el->child("name"); name && text_child(*name)) net.name = trim(text_child(*name)->text);
    collect(doc, *net_el, net);
    if (const auto* fms = net_el->child("finalmarkings")) {
        if (const auto* marking = fms->child("marking")) {
            for (const auto& p : marking->children) {
                if (p.name != "place") continue;
                const std::string* ref = p.attribute("idref");
                if (!ref) {
                    auto loc = doc.locate(p.begin);
                    throw ParseError("final marking place without idref", loc.line, loc.column);
                }
                net.final_marking.add(*ref, token_count(doc, p));
            }
        }
    }
    return net;
}

std::string write_pnml(const PetriNet& net) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n";
    out += "  <net id=\"" + xml::escape(net.name.empty() ? "net" : net.name) +
           "\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n";
    out += "    <name><text>" + xml::escape(net.name, false) + "</text></name>\n";
    out += "    <page id=\"page1\">\n";
    for (const auto& p : net.places) {
        out += "      <place id=\"" + xml::escape(p) + "\">\n";
        out += "        <name><text>" + xml::escape(p, false) + "</text></name>\n";
        if (auto n = net.initial_marking[p]; n > 0)
            out += "        <initialMarking><text>" + std::to_string(n) + "</text></initialMarking>\n";
        out += "      </place>\n";
    }
    for (const auto& t : net.transitions) {
        out += "      <transition id=\"" + xml::escape(t.id) + "\">\n";
        if (t.label) {
            out += "        <name><text>" + xml::escape(*t.label, false) + "</text></name>\n";
        } else {
            out += "        <name><text>" + xml::escape(t.id, false) + "</text></name>\n";
            out += "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\"/>\n";
        }
        out += "      </transition>\n";
    }
    std::size_t arc_no = 0;
    for (const auto& a : net.arcs) {
        out += "      <arc id=\"a" + std::to_string(arc_no++) + "\" source=\"" + xml::escape(a.source) +
               "\" target=\"" + xml::escape(a.target) + "\"/>\n";
    }
    out += "    </page>\n";
    out += "    <finalmarkings>\n      <marking>\n";
    for (const auto& [p, n] : net.final_marking)
        out += "        <place idref=\"" + xml::escape(p) + "\"><text>" + std::to_string(n) + "</text></place>\n";
    out += "      </marking>\n    </finalmarkings>\n";
    out += "  </net>\n</pnml>\n";
    return out;
}

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string net_to_dot(const PetriNet& net) {
    std::string out = "digraph " + dot_quote(net.name.empty() ? "net" : net.name) + " {\n  rankdir=LR;\n";
    for (const auto& p : net.places) {
        std::string label;
        if (auto n = net.initial_marking[p]; n > 0) label = std::to_string(n) + "●";
        std::string extra;
        if (net.final_marking[p] > 0) extra = ", peripheries=2";
        out += "  " + dot_quote(p) + " [shape=circle, label=" + dot_quote(label) + ", xlabel=" + dot_quote(p) + extra +
               "];\n";
    }
    for (const auto& t : net.transitions) {
        if (t.silent())
            out += "  " + dot_quote(t.id) + " [shape=box, style=filled, fillcolor=black, label=\"\", width=0.2];\n";
        else
            out += "  " + dot_quote(t.id) + " [shape=box, label=" + dot_quote(*t.label) + "];\n";
    }
    for (const auto& a : net.arcs) out += "  " + dot_quote(a.source) + " -> " + dot_quote(a.target) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace pmkit
