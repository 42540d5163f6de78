#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pmkit/event_log.hpp"
#include "pmkit/petri_net.hpp"

namespace pmkit {

struct ReplayOptions {
    // Ongoing traces (complete=false) skip final-marking consumption and
    // remaining-token counting.
    bool ignore_final_for_ongoing = true;
    // Upper bound on silent firings inserted into one trace; 0 selects
    // (number of silent transitions) x (events + 1).
    std::size_t max_silent_firings = 0;
    // Search states expanded per trace before giving up with an Error.
    std::size_t max_states = 2'000'000;
    // Optional activity -> transition label renaming; identity when absent.
    std::map<std::string, std::string, std::less<>> label_map;
};

struct FiringStep {
    std::size_t step = 0;     // event index this firing precedes or realises; events.size() for the closing phase
    std::string transition;   // transition id; empty for an unmapped event
    std::string activity;     // event label for visible firings and unmapped events
    bool silent = false;
    std::vector<std::string> forced_missing;  // input places whose token had to be created

    bool operator==(const FiringStep&) const = default;
};

struct TraceReplayResult {
    std::string case_id;
    std::uint64_t produced = 0;
    std::uint64_t consumed = 0;
    std::uint64_t missing = 0;
    std::uint64_t remaining = 0;
    double fitness = 1.0;
    std::vector<FiringStep> firing_log;
    Marking missing_tokens;    // per place, including final-marking deficits
    Marking remaining_tokens;  // per place, left after consuming the final marking
    std::size_t unmapped_events = 0;
    bool final_marking_ignored = false;
};

struct LogReplayResult {
    std::vector<TraceReplayResult> per_trace;
    std::uint64_t produced = 0;
    std::uint64_t consumed = 0;
    std::uint64_t missing = 0;
    std::uint64_t remaining = 0;
    double log_fitness = 1.0;
};

// 1/2 (1 - m/c) + 1/2 (1 - r/p); a term with a zero denominator counts as 1.
double token_fitness(std::uint64_t produced, std::uint64_t consumed, std::uint64_t missing, std::uint64_t remaining);

// Token-based replay. Visible events fire in trace order; when an event's
// transition lacks tokens the missing ones are created and counted. Silent
// transitions may be fired (only when enabled) before any event and before the
// final marking is consumed. Among all such interleavings the replay returns
// the one minimising (missing, remaining, silent firings, produced), breaking
// remaining ties by transition-id order. Events whose label has no transition
// cost one produced, consumed, missing and remaining token each. A label shared
// by several transitions resolves to the lowest-id enabled one, else the
// lowest id.
//
// Throws ConfigError if the net lacks an initial or final marking.
TraceReplayResult replay_trace(const PetriNet& net, const Trace& trace, const ReplayOptions& options = {});
TraceReplayResult replay_trace(const IndexedNet& net, const Trace& trace, const ReplayOptions& options = {});

LogReplayResult replay_log(const PetriNet& net, const EventLog& log, const ReplayOptions& options = {});

// Sums per-trace counters and recomputes log fitness. Associative and
// commutative over the per-trace results.
LogReplayResult aggregate(std::vector<TraceReplayResult> per_trace);

// "case_id,p,c,m,r,fitness" plus one row per trace.
std::string replay_csv(const LogReplayResult& result);

// Human-readable list of traces with missing or remaining tokens.
std::string deviation_report(const LogReplayResult& result);

}  // namespace pmkit
