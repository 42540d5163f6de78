#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmkit/error.hpp"

namespace pmkit {

// Multiset of tokens over place ids. Places holding zero tokens are never stored.
class Marking {
public:
    using Counts = std::map<std::string, std::uint32_t, std::less<>>;

    Marking() = default;
    Marking(std::initializer_list<std::pair<const std::string, std::uint32_t>> init);

    std::uint32_t operator[](std::string_view place) const;
    void set(std::string_view place, std::uint32_t count);
    void add(std::string_view place, std::uint32_t count = 1);

    std::uint64_t total() const;
    bool empty() const { return counts_.empty(); }
    const Counts& counts() const { return counts_; }
    auto begin() const { return counts_.begin(); }
    auto end() const { return counts_.end(); }

    // "{p1:1, p2:1}"
    std::string to_string() const;

    bool operator==(const Marking&) const = default;
    auto operator<=>(const Marking& other) const { return counts_ <=> other.counts_; }

private:
    Counts counts_;
};

struct Transition {
    std::string id;
    std::optional<std::string> label;  // absent for silent transitions

    bool silent() const { return !label.has_value(); }
    bool operator==(const Transition&) const = default;
};

struct Arc {
    std::string source;
    std::string target;

    bool operator==(const Arc&) const = default;
};

// Labeled place/transition net with ordinary (weight 1) arcs. A plain value:
// construction performs no checks, see validate().
struct PetriNet {
    std::string name;
    std::vector<std::string> places;
    std::vector<Transition> transitions;
    std::vector<Arc> arcs;
    Marking initial_marking;
    Marking final_marking;

    bool operator==(const PetriNet&) const = default;

    bool has_place(std::string_view id) const;
    const Transition* transition(std::string_view id) const;
    std::vector<std::string> preset(std::string_view transition_id) const;
    std::vector<std::string> postset(std::string_view transition_id) const;
};

enum class Severity { Error, Warning };

struct Violation {
    Severity severity;
    std::string message;
};

// Dangling or non-bipartite arcs, duplicate ids and arcs, empty or unknown-place
// markings are errors; duplicate transition labels are warnings.
std::vector<Violation> validate(const PetriNet& net);
bool has_errors(const std::vector<Violation>& violations);

class NotEnabledError : public Error {
public:
    NotEnabledError(std::string transition, std::vector<std::string> missing_places);

    const std::string& transition() const noexcept { return transition_; }
    // Input places lacking a token.
    const std::vector<std::string>& missing_places() const noexcept { return missing_; }

private:
    std::string transition_;
    std::vector<std::string> missing_;
};

// Transition ids enabled at m, sorted. Throws StructuralError if m marks an
// unknown place or the net is invalid.
std::vector<std::string> enabled(const PetriNet& net, const Marking& m);

// Throws NotEnabledError if t lacks input tokens, InvalidArgument if t is unknown.
Marking fire(const PetriNet& net, const Marking& m, std::string_view transition_id);

// Fires the sequence from net.initial_marking.
Marking fire_sequence(const PetriNet& net, const std::vector<std::string>& transition_ids);

using DenseMarking = std::vector<std::uint32_t>;

// Index-based view of a validated net for the hot loops of replay, simulation
// and state-space search. Transitions are numbered in declaration order;
// `by_id_order` lists them sorted by id, which is the tie-break order used
// everywhere determinism matters.
class IndexedNet {
public:
    // Throws StructuralError if validate() reports errors.
    explicit IndexedNet(const PetriNet& net);

    std::size_t place_count() const { return place_ids_.size(); }
    std::size_t transition_count() const { return transition_ids_.size(); }

    const std::string& place_id(std::size_t p) const { return place_ids_[p]; }
    const std::string& transition_id(std::size_t t) const { return transition_ids_[t]; }
    const std::optional<std::string>& label(std::size_t t) const { return labels_[t]; }
    bool silent(std::size_t t) const { return !labels_[t].has_value(); }
    const std::vector<std::uint32_t>& inputs(std::size_t t) const { return inputs_[t]; }
    const std::vector<std::uint32_t>& outputs(std::size_t t) const { return outputs_[t]; }
    const std::vector<std::uint32_t>& by_id_order() const { return by_id_order_; }
    const std::vector<std::uint32_t>& silent_by_id_order() const { return silent_by_id_order_; }
    // Transitions carrying `label`, sorted by id; empty if none.
    const std::vector<std::uint32_t>& with_label(std::string_view label) const;

    std::optional<std::uint32_t> place_index(std::string_view id) const;
    std::optional<std::uint32_t> transition_index(std::string_view id) const;

    const DenseMarking& initial() const { return initial_; }
    const DenseMarking& final() const { return final_; }

    DenseMarking to_dense(const Marking& m) const;
    Marking to_marking(const DenseMarking& m) const;

    bool is_enabled(const DenseMarking& m, std::size_t t) const;
    // Precondition: is_enabled(m, t).
    void fire(DenseMarking& m, std::size_t t) const;

private:
    std::vector<std::string> place_ids_;
    std::vector<std::string> transition_ids_;
    std::vector<std::optional<std::string>> labels_;
    std::vector<std::vector<std::uint32_t>> inputs_;
    std::vector<std::vector<std::uint32_t>> outputs_;
    std::vector<std::uint32_t> by_id_order_;
    std::vector<std::uint32_t> silent_by_id_order_;
    std::unordered_map<std::string, std::uint32_t> place_index_;
    std::unordered_map<std::string, std::uint32_t> transition_index_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_label_;
    DenseMarking initial_;
    DenseMarking final_;
};

struct StateSpace {
    std::vector<Marking> markings;  // breadth-first discovery order
    std::size_t edge_count = 0;
    bool truncated = false;  // true if max_states was hit
};

// Exhaustive breadth-first exploration of markings reachable from `from`.
StateSpace explore(const PetriNet& net, const Marking& from, std::size_t max_states = 100000);

// The normative COVID-19 ICU patient-flow net: 15 labeled transitions,
// silent t0..t5, 18 places p1..p9 and p11..p19, initial {p1:1}, final {p19:1}.
PetriNet covas_model();

}  // namespace pmkit
