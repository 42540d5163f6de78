#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmkit/event_log.hpp"
#include "pmkit/petri_net.hpp"

namespace pmkit {

struct DelaySpec {
    enum class Kind { Fixed, Uniform, Lognormal };
    Kind kind = Kind::Lognormal;
    // Hours. Fixed: a. Uniform: [a, b]. Lognormal: median a, log-sd b.
    double a = 24.0;
    double b = 1.0;

    bool operator==(const DelaySpec&) const = default;
};

struct WaveSpec {
    std::string name;
    Timestamp start{};  // admission window, inclusive
    Timestamp end{};
    double share = 1.0;
    // When set, delays of the wave are rescaled so its complete cases average
    // exactly this duration.
    std::optional<double> mean_duration_hours;
};

// Forces the occupancy of an activity pair (e.g. ventilation) to peak at
// `count` concurrent cases, first reached at `instant`.
struct PeakSpec {
    std::string start_activity = "startVentilation";
    std::string end_activity = "endVentilation";
    Timestamp instant{};
    std::size_t count = 0;
};

struct NoiseSpec {
    double event_drop_probability = 0.0;
    std::uint64_t seed = 0;
};

struct SimConfig {
    int config_version = 1;
    std::string log_name = "simulated";
    std::size_t case_count = 1;
    std::uint64_t seed = 0;
    std::vector<WaveSpec> waves;  // sorted by start; defaults to one 2020 wave
    // Relative weight per transition id. Among enabled transitions, one is
    // picked with probability proportional to its weight; missing ids weigh 1.
    std::map<std::string, double, std::less<>> branch_weights;
    std::map<std::string, DelaySpec, std::less<>> delays;  // by activity label
    DelaySpec default_delay;
    double ongoing_fraction = 0.0;
    double ards_probability = 0.0;
    std::optional<PeakSpec> peak;
    NoiseSpec noise;
};

// Flat `key = value` text with `#` comments; see data/covas_desk.config for
// the documented keys. Throws ConfigError naming the offending line.
SimConfig parse_sim_config(std::string_view text);

// Throws ConfigError on out-of-range probabilities, shares not summing to 1
// or non-positive delay parameters.
void validate(const SimConfig& config);

// Plays the token game once per case. Case i draws from its own substream
// seeded by (seed, i). The first labeled transition fires at the admission
// instant; each later one advances the case clock by a delay drawn for its
// label. Silent transitions emit nothing. The last ongoing_fraction of cases
// (by index, so the latest admissions) are cut to a uniform proper prefix and
// marked complete=false. Deterministic in (config, net).
//
// Throws ConfigError when the net deadlocks before its final marking or a
// duration/peak target cannot be met.
EventLog simulate(const SimConfig& config, const PetriNet& net);

// Drops each event other than the first and last of its trace with the given
// probability. Trace i draws from substream (seed, i).
EventLog inject_noise(const EventLog& log, const NoiseSpec& spec);

struct NoiseCalibration {
    double drop_probability = 0.0;
    double fitness = 1.0;
    int iterations = 0;
};

// Bisection over the drop probability so that replay_log fitness of the noisy
// log approaches target_fitness.
NoiseCalibration calibrate_drop_probability(const EventLog& clean, const PetriNet& net, double target_fitness,
                                            std::uint64_t noise_seed, int iterations = 30);

}  // namespace pmkit
