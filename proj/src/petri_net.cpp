#include "pmkit/petri_net.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_set>

namespace pmkit {

Marking::Marking(std::initializer_list<std::pair<const std::string, std::uint32_t>> init) {
    for (const auto& [place, count] : init) add(place, count);
}

std::uint32_t Marking::operator[](std::string_view place) const {
    auto it = counts_.find(place);
    return it == counts_.end() ? 0 : it->second;
}

void Marking::set(std::string_view place, std::uint32_t count) {
    auto it = counts_.find(place);
    if (count == 0) {
        if (it != counts_.end()) counts_.erase(it);
    } else if (it == counts_.end()) {
        counts_.emplace(std::string(place), count);
    } else {
        it->second = count;
    }
}

void Marking::add(std::string_view place, std::uint32_t count) {
    if (count == 0) return;
    set(place, (*this)[place] + count);
}

std::uint64_t Marking::total() const {
    std::uint64_t n = 0;
    for (const auto& [_, c] : counts_) n += c;
    return n;
}

std::string Marking::to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [p, c] : counts_) {
        if (!first) out += ", ";
        first = false;
        out += p + ":" + std::to_string(c);
    }
    return out + "}";
}

bool PetriNet::has_place(std::string_view id) const {
    return std::find(places.begin(), places.end(), id) != places.end();
}

const Transition* PetriNet::transition(std::string_view id) const {
    for (const auto& t : transitions)
        if (t.id == id) return &t;
    return nullptr;
}

std::vector<std::string> PetriNet::preset(std::string_view transition_id) const {
    std::vector<std::string> out;
    for (const auto& a : arcs)
        if (a.target == transition_id && has_place(a.source)) out.push_back(a.source);
    return out;
}

std::vector<std::string> PetriNet::postset(std::string_view transition_id) const {
    std::vector<std::string> out;
    for (const auto& a : arcs)
        if (a.source == transition_id && has_place(a.target)) out.push_back(a.target);
    return out;
}

std::vector<Violation> validate(const PetriNet& net) {
    std::vector<Violation> out;
    auto error = [&](std::string msg) { out.push_back({Severity::Error, std::move(msg)}); };

    std::unordered_set<std::string_view> places, transitions;
    for (const auto& p : net.places) {
        if (p.empty()) error("place with empty id");
        if (!places.insert(p).second) error("duplicate place id '" + p + "'");
    }
    for (const auto& t : net.transitions) {
        if (t.id.empty()) error("transition with empty id");
        if (!transitions.insert(t.id).second) error("duplicate transition id '" + t.id + "'");
        if (places.count(t.id)) error("id '" + t.id + "' names both a place and a transition");
    }

    std::set<std::pair<std::string_view, std::string_view>> seen_arcs;
    for (const auto& a : net.arcs) {
        const std::string name = "arc " + a.source + " -> " + a.target;
        bool src_place = places.count(a.source) > 0, src_trans = transitions.count(a.source) > 0;
        bool dst_place = places.count(a.target) > 0, dst_trans = transitions.count(a.target) > 0;
        if (!src_place && !src_trans) error(name + ": unknown source node '" + a.source + "'");
        if (!dst_place && !dst_trans) error(name + ": unknown target node '" + a.target + "'");
        if ((src_place && dst_place) || (src_trans && dst_trans)) error(name + ": arc is not bipartite");
        if (!seen_arcs.emplace(a.source, a.target).second) error(name + ": duplicate arc");
    }

    auto check_marking = [&](const Marking& m, const char* which) {
        if (m.empty()) error(std::string(which) + " marking is empty");
        for (const auto& [p, _] : m)
            if (!places.count(p)) error(std::string(which) + " marking references unknown place '" + p + "'");
    };
    check_marking(net.initial_marking, "initial");
    check_marking(net.final_marking, "final");

    std::map<std::string_view, std::vector<std::string_view>> by_label;
    for (const auto& t : net.transitions)
        if (t.label) by_label[*t.label].push_back(t.id);
    for (const auto& [label, ids] : by_label) {
        if (ids.size() < 2) continue;
        std::string msg = "label '" + std::string(label) + "' is shared by transitions";
        for (auto id : ids) msg += " " + std::string(id);
        out.push_back({Severity::Warning, std::move(msg)});
    }
    return out;
}

bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::Error; });
}

NotEnabledError::NotEnabledError(std::string transition, std::vector<std::string> missing_places)
    : Error("transition '" + transition + "' is not enabled"),
      transition_(std::move(transition)),
      missing_(std::move(missing_places)) {}

IndexedNet::IndexedNet(const PetriNet& net) {
    auto violations = validate(net);
    if (has_errors(violations)) {
        std::string msg = "invalid Petri net";
        if (!net.name.empty()) msg += " '" + net.name + "'";
        for (const auto& v : violations)
            if (v.severity == Severity::Error) msg += "; " + v.message;
        throw StructuralError(msg);
    }
    place_ids_ = net.places;
    for (std::uint32_t i = 0; i < place_ids_.size(); ++i) place_index_.emplace(place_ids_[i], i);
    const std::size_t nt = net.transitions.size();
    inputs_.resize(nt);
    outputs_.resize(nt);
    for (std::uint32_t i = 0; i < nt; ++i) {
        const auto& t = net.transitions[i];
        transition_ids_.push_back(t.id);
        labels_.push_back(t.label);
        transition_index_.emplace(t.id, i);
    }
    for (const auto& a : net.arcs) {
        if (auto p = place_index(a.source)) inputs_[*transition_index(a.target)].push_back(*p);
        else outputs_[*transition_index(a.source)].push_back(*place_index(a.target));
    }
    by_id_order_.resize(nt);
    std::iota(by_id_order_.begin(), by_id_order_.end(), 0u);
    std::sort(by_id_order_.begin(), by_id_order_.end(),
              [&](std::uint32_t a, std::uint32_t b) { return transition_ids_[a] < transition_ids_[b]; });
    for (auto t : by_id_order_) {
        if (labels_[t]) by_label_[*labels_[t]].push_back(t);
        else silent_by_id_order_.push_back(t);
    }
    initial_ = to_dense(net.initial_marking);
    final_ = to_dense(net.final_marking);
}

const std::vector<std::uint32_t>& IndexedNet::with_label(std::string_view label) const {
    static const std::vector<std::uint32_t> none;
    auto it = by_label_.find(std::string(label));
    return it == by_label_.end() ? none : it->second;
}

std::optional<std::uint32_t> IndexedNet::place_index(std::string_view id) const {
    auto it = place_index_.find(std::string(id));
    if (it == place_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> IndexedNet::transition_index(std::string_view id) const {
    auto it = transition_index_.find(std::string(id));
    if (it == transition_index_.end()) return std::nullopt;
    return it->second;
}

DenseMarking IndexedNet::to_dense(const Marking& m) const {
    DenseMarking out(place_count(), 0);
    for (const auto& [p, c] : m) {
        auto idx = place_index(p);
        if (!idx) throw StructuralError("marking references unknown place '" + p + "'");
        out[*idx] = c;
    }
    return out;
}

Marking IndexedNet::to_marking(const DenseMarking& m) const {
    Marking out;
    for (std::size_t p = 0; p < m.size(); ++p) out.set(place_ids_[p], m[p]);
    return out;
}

bool IndexedNet::is_enabled(const DenseMarking& m, std::size_t t) const {
    for (auto p : inputs_[t])
        if (m[p] == 0) return false;
    return true;
}

void IndexedNet::fire(DenseMarking& m, std::size_t t) const {
    for (auto p : inputs_[t]) --m[p];
    for (auto p : outputs_[t]) ++m[p];
}

std::vector<std::string> enabled(const PetriNet& net, const Marking& m) {
    IndexedNet idx(net);
    DenseMarking dm = idx.to_dense(m);
    std::vector<std::string> out;
    for (auto t : idx.by_id_order())
        if (idx.is_enabled(dm, t)) out.push_back(idx.transition_id(t));
    return out;
}

Marking fire(const PetriNet& net, const Marking& m, std::string_view transition_id) {
    IndexedNet idx(net);
    auto t = idx.transition_index(transition_id);
    if (!t) throw InvalidArgument("unknown transition '" + std::string(transition_id) + "'");
    DenseMarking dm = idx.to_dense(m);
    std::vector<std::string> missing;
    for (auto p : idx.inputs(*t))
        if (dm[p] == 0) missing.push_back(idx.place_id(p));
    if (!missing.empty()) throw NotEnabledError(std::string(transition_id), std::move(missing));
    idx.fire(dm, *t);
    return idx.to_marking(dm);
}

Marking fire_sequence(const PetriNet& net, const std::vector<std::string>& transition_ids) {
    Marking m = net.initial_marking;
    for (const auto& t : transition_ids) m = fire(net, m, t);
    return m;
}

StateSpace explore(const PetriNet& net, const Marking& from, std::size_t max_states) {
    IndexedNet idx(net);
    StateSpace out;
    std::set<DenseMarking> seen;
    std::deque<DenseMarking> queue;
    DenseMarking start = idx.to_dense(from);
    seen.insert(start);
    queue.push_back(start);
    out.markings.push_back(idx.to_marking(start));
    while (!queue.empty()) {
        DenseMarking m = std::move(queue.front());
        queue.pop_front();
        for (auto t : idx.by_id_order()) {
            if (!idx.is_enabled(m, t)) continue;
            DenseMarking next = m;
            idx.fire(next, t);
            ++out.edge_count;
            if (seen.count(next)) continue;
            if (seen.size() >= max_states) {
                out.truncated = true;
                continue;
            }
            seen.insert(next);
            out.markings.push_back(idx.to_marking(next));
            queue.push_back(std::move(next));
        }
    }
    return out;
}

PetriNet covas_model() {
    PetriNet net;
    net.name = "covas";
    net.places = {"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "p9",
                  "p11", "p12", "p13", "p14", "p15", "p16", "p17", "p18", "p19"};

    struct Spec {
        const char* id;
        bool labeled;
        std::vector<const char*> in, out;
    };
    const std::vector<Spec> specs = {
        {"Start", true, {"p1"}, {"p2"}},
        {"startSymptoms", true, {"p2"}, {"p3"}},
        {"t0", false, {"p2"}, {"p3"}},
        {"Hospitalization", true, {"p3"}, {"p4", "p5", "p6"}},
        {"startOxygen", true, {"p4"}, {"p7"}},
        {"endOxygen", true, {"p7"}, {"p8"}},
        {"endSymptoms", true, {"p5"}, {"p9"}},
        {"t1", false, {"p5"}, {"p9"}},
        {"ICUadmission", true, {"p6"}, {"p11"}},
        {"startVentilation", true, {"p11"}, {"p12"}},
        {"startECMO", true, {"p12"}, {"p13"}},
        {"endECMO", true, {"p13"}, {"p14"}},
        {"endVentilation", true, {"p14"}, {"p15"}},
        {"ICUdischarge", true, {"p15"}, {"p16"}},
        {"t2", false, {"p11"}, {"p15"}},
        {"t3", false, {"p12"}, {"p14"}},
        {"t4", false, {"p6"}, {"p16"}},
        {"t5", false, {"p8", "p9", "p16"}, {"p17"}},
        {"DischDead", true, {"p17"}, {"p18"}},
        {"DischAlive", true, {"p17"}, {"p18"}},
        {"End", true, {"p18"}, {"p19"}},
    };
    for (const auto& s : specs) {
        Transition t{s.id, std::nullopt};
        if (s.labeled) t.label = s.id;
        net.transitions.push_back(std::move(t));
        for (const char* p : s.in) net.arcs.push_back({p, s.id});
        for (const char* p : s.out) net.arcs.push_back({s.id, p});
    }
    net.initial_marking = {{"p1", 1}};
    net.final_marking = {{"p19", 1}};
    return net;
}

}  // namespace pmkit
