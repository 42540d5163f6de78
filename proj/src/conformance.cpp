#include "pmkit/conformance.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <tuple>
#include <unordered_map>

namespace pmkit {

double token_fitness(std::uint64_t produced, std::uint64_t consumed, std::uint64_t missing, std::uint64_t remaining) {
    double missing_term = consumed == 0 ? 1.0 : 1.0 - static_cast<double>(missing) / static_cast<double>(consumed);
    double remaining_term =
        produced == 0 ? 1.0 : 1.0 - static_cast<double>(remaining) / static_cast<double>(produced);
    return std::clamp(0.5 * missing_term + 0.5 * remaining_term, 0.0, 1.0);
}

namespace {

// Lexicographic search cost. All components are additive along a path.
struct Cost {
    std::uint64_t missing = 0;
    std::uint64_t remaining = 0;
    std::uint64_t silent = 0;
    std::uint64_t produced = 0;

    auto operator<=>(const Cost&) const = default;
};

enum class Action { Start, Silent, Visible, Unmapped, Terminal };

struct Node {
    Cost cost;
    std::uint64_t consumed = 0;
    std::uint32_t event = 0;  // next event to replay
    std::uint32_t silent_used = 0;
    DenseMarking marking;
    std::int64_t parent = -1;
    Action action = Action::Start;
    std::uint32_t transition = 0;
    std::vector<std::uint32_t> forced;  // places whose token was created
};

struct StateHash {
    std::size_t operator()(const std::pair<std::uint32_t, DenseMarking>& k) const noexcept {
        std::size_t h = std::hash<std::uint32_t>{}(k.first) * 0x9E3779B97F4A7C15ull;
        for (auto v : k.second) h = (h ^ v) * 0x100000001B3ull;
        return h;
    }
};

std::uint64_t tokens(const DenseMarking& m) {
    std::uint64_t n = 0;
    for (auto v : m) n += v;
    return n;
}

}  // namespace

TraceReplayResult replay_trace(const PetriNet& net, const Trace& trace, const ReplayOptions& options) {
    if (net.initial_marking.empty() || net.final_marking.empty())
        throw ConfigError("replay needs a net with both an initial and a final marking");
    return replay_trace(IndexedNet(net), trace, options);
}

TraceReplayResult replay_trace(const IndexedNet& net, const Trace& trace, const ReplayOptions& options) {
    if (tokens(net.initial()) == 0 || tokens(net.final()) == 0)
        throw ConfigError("replay needs a net with both an initial and a final marking");

    const auto n = static_cast<std::uint32_t>(trace.events.size());
    const bool ignore_final = options.ignore_final_for_ongoing && !trace.is_complete();
    const std::size_t silent_budget = options.max_silent_firings != 0
                                          ? options.max_silent_firings
                                          : net.silent_by_id_order().size() * (static_cast<std::size_t>(n) + 1);

    std::vector<const std::vector<std::uint32_t>*> candidates(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::string& activity = trace.events[i].activity;
        auto mapped = options.label_map.find(activity);
        candidates[i] = &net.with_label(mapped == options.label_map.end() ? activity : mapped->second);
    }

    std::vector<Node> nodes;
    using QueueItem = std::pair<Cost, std::size_t>;
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
    auto push = [&](Node node) {
        nodes.push_back(std::move(node));
        queue.emplace(nodes.back().cost, nodes.size() - 1);
    };

    Node start;
    start.marking = net.initial();
    start.cost.produced = tokens(start.marking);
    push(std::move(start));

    // Smallest silent count with which (event, marking) has been expanded.
    std::unordered_map<std::pair<std::uint32_t, DenseMarking>, std::uint32_t, StateHash> expanded;
    std::size_t expansions = 0;
    std::size_t goal = 0;
    bool found = false;

    while (!queue.empty()) {
        const std::size_t idx = queue.top().second;
        queue.pop();
        if (nodes[idx].action == Action::Terminal) {
            goal = idx;
            found = true;
            break;
        }
        const std::uint32_t event = nodes[idx].event;
        const std::uint32_t used = nodes[idx].silent_used;
        auto [slot, fresh] = expanded.try_emplace({event, nodes[idx].marking}, used);
        if (!fresh) {
            if (slot->second <= used) continue;
            slot->second = used;
        }
        if (++expansions > options.max_states)
            throw Error("replay of case '" + trace.case_id + "' exceeded the search limit of " +
                        std::to_string(options.max_states) + " states");

        // Copy: push() may reallocate `nodes`.
        const Cost cost = nodes[idx].cost;
        const std::uint64_t consumed = nodes[idx].consumed;
        const DenseMarking marking = nodes[idx].marking;

        if (event < n) {
            const auto& cands = *candidates[event];
            Node next;
            next.event = event + 1;
            next.silent_used = used;
            next.parent = static_cast<std::int64_t>(idx);
            next.marking = marking;
            next.cost = cost;
            if (cands.empty()) {
                next.action = Action::Unmapped;
                next.cost.missing += 1;
                next.cost.remaining += 1;
                next.cost.produced += 1;
                next.consumed = consumed + 1;
            } else {
                std::uint32_t t = cands.front();
                for (auto c : cands) {
                    if (net.is_enabled(marking, c)) {
                        t = c;
                        break;
                    }
                }
                next.action = Action::Visible;
                next.transition = t;
                for (auto p : net.inputs(t)) {
                    if (next.marking[p] == 0) {
                        next.forced.push_back(p);
                        ++next.marking[p];
                    }
                }
                net.fire(next.marking, t);
                next.cost.missing += next.forced.size();
                next.cost.produced += net.outputs(t).size();
                next.consumed = consumed + net.inputs(t).size();
            }
            push(std::move(next));
        } else {
            Node term;
            term.action = Action::Terminal;
            term.event = n;
            term.silent_used = used;
            term.parent = static_cast<std::int64_t>(idx);
            term.marking = marking;
            term.cost = cost;
            term.consumed = consumed;
            if (!ignore_final) {
                const DenseMarking& fin = net.final();
                for (std::size_t p = 0; p < fin.size(); ++p) {
                    if (marking[p] < fin[p]) {
                        term.cost.missing += fin[p] - marking[p];
                        term.forced.push_back(static_cast<std::uint32_t>(p));
                    } else {
                        term.cost.remaining += marking[p] - fin[p];
                    }
                }
                term.consumed += tokens(fin);
            }
            push(std::move(term));
        }

        if (used < silent_budget) {
            for (auto t : net.silent_by_id_order()) {
                if (!net.is_enabled(marking, t)) continue;
                Node next;
                next.action = Action::Silent;
                next.transition = t;
                next.event = event;
                next.silent_used = used + 1;
                next.parent = static_cast<std::int64_t>(idx);
                next.marking = marking;
                net.fire(next.marking, t);
                next.cost = cost;
                next.cost.silent += 1;
                next.cost.produced += net.outputs(t).size();
                next.consumed = consumed + net.inputs(t).size();
                push(std::move(next));
            }
        }
    }
    // The terminal edge is always available from every event == n state, so the
    // search can only end without a goal through the state limit above.
    if (!found) throw Error("replay of case '" + trace.case_id + "' found no completion");

    const Node& g = nodes[goal];
    TraceReplayResult res;
    res.case_id = trace.case_id;
    res.produced = g.cost.produced;
    res.consumed = g.consumed;
    res.missing = g.cost.missing;
    res.remaining = g.cost.remaining;
    res.final_marking_ignored = ignore_final;
    if (!ignore_final) {
        const DenseMarking& fin = net.final();
        for (std::size_t p = 0; p < fin.size(); ++p) {
            if (g.marking[p] < fin[p]) res.missing_tokens.add(net.place_id(p), fin[p] - g.marking[p]);
            else if (g.marking[p] > fin[p]) res.remaining_tokens.add(net.place_id(p), g.marking[p] - fin[p]);
        }
    }

    std::vector<std::size_t> path;
    for (auto i = static_cast<std::int64_t>(goal); i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
        path.push_back(static_cast<std::size_t>(i));
    std::reverse(path.begin(), path.end());
    for (std::size_t i : path) {
        const Node& node = nodes[i];
        FiringStep step;
        switch (node.action) {
            case Action::Start:
            case Action::Terminal:
                continue;
            case Action::Unmapped:
                step.step = node.event - 1;
                step.activity = trace.events[step.step].activity;
                ++res.unmapped_events;
                break;
            case Action::Visible:
                step.step = node.event - 1;
                step.activity = trace.events[step.step].activity;
                step.transition = net.transition_id(node.transition);
                break;
            case Action::Silent:
                step.step = node.event;
                step.transition = net.transition_id(node.transition);
                step.silent = true;
                break;
        }
        for (auto p : node.forced) {
            step.forced_missing.push_back(net.place_id(p));
            res.missing_tokens.add(net.place_id(p));
        }
        res.firing_log.push_back(std::move(step));
    }
    res.fitness = token_fitness(res.produced, res.consumed, res.missing, res.remaining);
    return res;
}

LogReplayResult aggregate(std::vector<TraceReplayResult> per_trace) {
    LogReplayResult out;
    for (const auto& r : per_trace) {
        out.produced += r.produced;
        out.consumed += r.consumed;
        out.missing += r.missing;
        out.remaining += r.remaining;
    }
    out.log_fitness = token_fitness(out.produced, out.consumed, out.missing, out.remaining);
    out.per_trace = std::move(per_trace);
    return out;
}

LogReplayResult replay_log(const PetriNet& net, const EventLog& log, const ReplayOptions& options) {
    if (net.initial_marking.empty() || net.final_marking.empty())
        throw ConfigError("replay needs a net with both an initial and a final marking");
    IndexedNet indexed(net);
    std::vector<TraceReplayResult> results;
    results.reserve(log.traces.size());
    for (const auto& t : log.traces) results.push_back(replay_trace(indexed, t, options));
    return aggregate(std::move(results));
}

std::string replay_csv(const LogReplayResult& result) {
    std::string out = "case_id,p,c,m,r,fitness\n";
    char buf[128];
    for (const auto& r : result.per_trace) {
        bool quote = r.case_id.find_first_of(",\"\r\n") != std::string::npos;
        if (quote) {
            out += '"';
            for (char c : r.case_id) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += r.case_id;
        }
        std::snprintf(buf, sizeof buf, ",%llu,%llu,%llu,%llu,%.6f\n", static_cast<unsigned long long>(r.produced),
                      static_cast<unsigned long long>(r.consumed), static_cast<unsigned long long>(r.missing),
                      static_cast<unsigned long long>(r.remaining), r.fitness);
        out += buf;
    }
    return out;
}

std::string deviation_report(const LogReplayResult& result) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "log fitness %.4f (p=%llu c=%llu m=%llu r=%llu)\n", result.log_fitness,
                  static_cast<unsigned long long>(result.produced), static_cast<unsigned long long>(result.consumed),
                  static_cast<unsigned long long>(result.missing), static_cast<unsigned long long>(result.remaining));
    out += buf;
    std::size_t deviating = 0;
    std::map<std::string, std::uint64_t> missing_by_place;
    for (const auto& r : result.per_trace) {
        if (r.missing == 0 && r.remaining == 0) continue;
        ++deviating;
        std::snprintf(buf, sizeof buf, "case %s: fitness %.4f, missing %llu, remaining %llu\n", r.case_id.c_str(),
                      r.fitness, static_cast<unsigned long long>(r.missing),
                      static_cast<unsigned long long>(r.remaining));
        out += buf;
        for (const auto& step : r.firing_log) {
            if (step.forced_missing.empty() && !step.transition.empty()) continue;
            out += "  event " + std::to_string(step.step);
            if (step.transition.empty()) {
                out += " '" + step.activity + "' has no transition in the model\n";
                continue;
            }
            out += " " + std::string(step.silent ? "silent " : "") + step.transition + ": missing token in";
            for (const auto& p : step.forced_missing) out += " " + p;
            out += '\n';
        }
        for (const auto& [p, c] : r.missing_tokens) missing_by_place[p] += c;
        if (!r.remaining_tokens.empty()) out += "  remaining tokens " + r.remaining_tokens.to_string() + "\n";
    }
    out += std::to_string(deviating) + " of " + std::to_string(result.per_trace.size()) + " traces deviate\n";
    if (!missing_by_place.empty()) {
        out += "missing tokens by place:";
        for (const auto& [p, c] : missing_by_place) out += " " + p + "=" + std::to_string(c);
        out += '\n';
    }
    return out;
}

}  // namespace pmkit
