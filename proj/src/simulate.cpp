#include "pmkit/simulate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmkit/analytics.hpp"
#include "pmkit/conformance.hpp"
#include "pmkit/error.hpp"
#include "pmkit/random.hpp"
#include "pmkit/timeutil.hpp"

namespace pmkit {

namespace {

using std::chrono::seconds;

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view v, std::size_t line) {
    double out{};
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
        fail(line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

std::uint64_t to_unsigned(std::string_view v, std::size_t line) {
    std::uint64_t out{};
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        fail(line, "expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

Timestamp to_instant(std::string_view v, std::size_t line) {
    auto t = try_parse_iso8601(v);
    if (!t) fail(line, "expected an ISO-8601 instant, got '" + std::string(v) + "'");
    return *t;
}

DelaySpec to_delay(std::string_view v, std::size_t line) {
    std::istringstream in{std::string(v)};
    std::string kind;
    in >> kind;
    std::vector<double> params;
    std::string tok;
    while (in >> tok) params.push_back(to_double(tok, line));
    DelaySpec d;
    if (kind == "fixed" && params.size() == 1) {
        d.kind = DelaySpec::Kind::Fixed;
        d.a = params[0];
        d.b = 0;
    } else if (kind == "uniform" && params.size() == 2) {
        d.kind = DelaySpec::Kind::Uniform;
        d.a = params[0];
        d.b = params[1];
    } else if (kind == "lognormal" && params.size() == 2) {
        d.kind = DelaySpec::Kind::Lognormal;
        d.a = params[0];
        d.b = params[1];
    } else {
        fail(line, "expected 'fixed H', 'uniform LO HI' or 'lognormal MEDIAN SIGMA', got '" + std::string(v) + "'");
    }
    return d;
}

double draw_hours(const DelaySpec& d, Rng& rng) {
    switch (d.kind) {
        case DelaySpec::Kind::Fixed: return d.a;
        case DelaySpec::Kind::Uniform: return rng.uniform(d.a, d.b);
        case DelaySpec::Kind::Lognormal: return rng.lognormal(d.a, d.b);
    }
    return d.a;
}

void check_delay(const DelaySpec& d, const std::string& what) {
    bool ok = true;
    switch (d.kind) {
        case DelaySpec::Kind::Fixed: ok = d.a >= 0; break;
        case DelaySpec::Kind::Uniform: ok = d.a >= 0 && d.b >= d.a; break;
        case DelaySpec::Kind::Lognormal: ok = d.a > 0 && d.b >= 0; break;
    }
    if (!ok) throw ConfigError("invalid delay parameters for " + what);
}

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
}

std::vector<WaveSpec> default_waves() {
    return {WaveSpec{"all", parse_iso8601("2020-01-01T00:00:00Z"), parse_iso8601("2020-12-31T23:59:59Z"), 1.0, {}}};
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
    SimConfig cfg;
    std::map<std::string, WaveSpec, std::less<>> waves;
    std::vector<std::string> wave_order;
    std::map<std::string, std::size_t, std::less<>> seen;
    bool version_seen = false;

    auto wave = [&](const std::string& name) -> WaveSpec& {
        auto it = waves.find(name);
        if (it == waves.end()) {
            wave_order.push_back(name);
            it = waves.emplace(name, WaveSpec{name, {}, {}, 0.0, {}}).first;
        }
        return it->second;
    };
    auto ensure_peak = [&]() -> PeakSpec& {
        if (!cfg.peak) cfg.peak.emplace();
        return *cfg.peak;
    };

    std::map<std::string, std::array<bool, 3>, std::less<>> wave_fields;  // start, end, share

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
            fail(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");

        if (key == "config_version") {
            auto v = to_unsigned(value, line_no);
            if (v != 1) fail(line_no, "unsupported config_version " + std::to_string(v));
            version_seen = true;
        } else if (key == "log_name") {
            cfg.log_name = std::string(value);
        } else if (key == "case_count") {
            cfg.case_count = to_unsigned(value, line_no);
        } else if (key == "seed") {
            cfg.seed = to_unsigned(value, line_no);
        } else if (key == "ongoing_fraction") {
            cfg.ongoing_fraction = to_double(value, line_no);
        } else if (key == "ards_probability") {
            cfg.ards_probability = to_double(value, line_no);
        } else if (key == "noise.drop_probability") {
            cfg.noise.event_drop_probability = to_double(value, line_no);
        } else if (key == "noise.seed") {
            cfg.noise.seed = to_unsigned(value, line_no);
        } else if (key == "peak.start_activity") {
            ensure_peak().start_activity = std::string(value);
        } else if (key == "peak.end_activity") {
            ensure_peak().end_activity = std::string(value);
        } else if (key == "peak.instant") {
            ensure_peak().instant = to_instant(value, line_no);
        } else if (key == "peak.count") {
            ensure_peak().count = to_unsigned(value, line_no);
        } else if (key.starts_with("branch.") && key.size() > 7) {
            cfg.branch_weights[key.substr(7)] = to_double(value, line_no);
        } else if (key == "delay.default") {
            cfg.default_delay = to_delay(value, line_no);
        } else if (key.starts_with("delay.") && key.size() > 6) {
            cfg.delays[key.substr(6)] = to_delay(value, line_no);
        } else if (key.starts_with("wave.")) {
            auto dot = key.rfind('.');
            std::string name = key.substr(5, dot > 5 ? dot - 5 : 0);
            std::string field = key.substr(dot + 1);
            if (name.empty() || dot <= 5) fail(line_no, "unknown key '" + key + "'");
            WaveSpec& w = wave(name);
            auto& have = wave_fields[name];
            if (field == "start") {
                w.start = to_instant(value, line_no);
                have[0] = true;
            } else if (field == "end") {
                w.end = to_instant(value, line_no);
                have[1] = true;
            } else if (field == "share") {
                w.share = to_double(value, line_no);
                have[2] = true;
            } else if (field == "mean_duration_hours") {
                w.mean_duration_hours = to_double(value, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "'");
            }
        } else {
            fail(line_no, "unknown key '" + key + "'");
        }
    }
    if (!version_seen) throw ConfigError("config is missing config_version");

    for (const auto& name : wave_order) {
        const auto& have = wave_fields[name];
        if (!have[0] || !have[1] || !have[2])
            throw ConfigError("wave '" + name + "' needs start, end and share");
        cfg.waves.push_back(waves.at(name));
    }
    if (cfg.peak) {
        if (!seen.count("peak.instant") || !seen.count("peak.count"))
            throw ConfigError("peak needs peak.instant and peak.count");
    }
    std::stable_sort(cfg.waves.begin(), cfg.waves.end(),
                     [](const WaveSpec& a, const WaveSpec& b) { return a.start < b.start; });
    validate(cfg);
    return cfg;
}

void validate(const SimConfig& config) {
    if (config.config_version != 1) throw ConfigError("unsupported config_version");
    if (config.case_count == 0) throw ConfigError("case_count must be positive");
    check_probability(config.ongoing_fraction, "ongoing_fraction");
    check_probability(config.ards_probability, "ards_probability");
    check_probability(config.noise.event_drop_probability, "noise.drop_probability");
    double share_sum = 0;
    for (const auto& w : config.waves) {
        if (w.end < w.start) throw ConfigError("wave '" + w.name + "' ends before it starts");
        if (!(w.share >= 0)) throw ConfigError("wave '" + w.name + "' has a negative share");
        if (w.mean_duration_hours && !(*w.mean_duration_hours > 0))
            throw ConfigError("wave '" + w.name + "' needs a positive mean_duration_hours");
        share_sum += w.share;
    }
    if (!config.waves.empty() && std::abs(share_sum - 1.0) > 1e-4)
        throw ConfigError("wave shares sum to " + std::to_string(share_sum) + ", expected 1");
    for (const auto& [id, w] : config.branch_weights)
        if (!(w >= 0)) throw ConfigError("branch weight of '" + id + "' must be non-negative");
    check_delay(config.default_delay, "delay.default");
    for (const auto& [label, d] : config.delays) check_delay(d, "delay." + label);
    if (config.peak && config.peak->count == 0) throw ConfigError("peak.count must be positive");
}

namespace {

struct Step {
    std::string activity;
    double hours = 0;          // delay before this event; 0 for the first
    std::int64_t offset_s = 0;  // from admission, after scaling
};

struct Draft {
    std::size_t wave = 0;
    std::vector<Step> steps;
    bool ards = false;
    bool ongoing = false;
    std::size_t keep = 0;  // prefix length kept
    Timestamp admission{};
};

constexpr std::size_t kMaxSteps = 100000;
constexpr std::int64_t kMinDelaySeconds = 60;

std::vector<std::size_t> largest_remainder(const std::vector<WaveSpec>& waves, std::size_t n) {
    std::vector<std::size_t> counts(waves.size());
    std::vector<std::pair<double, std::size_t>> rest;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < waves.size(); ++i) {
        double exact = waves[i].share * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[i];
        rest.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n && k < rest.size(); ++k, ++assigned) ++counts[rest[k].second];
    return counts;
}

std::vector<Step> play(const IndexedNet& net, const SimConfig& cfg, Rng& rng, std::size_t case_index) {
    DenseMarking m = net.initial();
    std::vector<Step> steps;
    std::vector<double> weights(net.transition_count(), 1.0);
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
        auto it = cfg.branch_weights.find(net.transition_id(t));
        if (it != cfg.branch_weights.end()) weights[t] = it->second;
    }
    std::vector<std::uint32_t> enabled;
    for (std::size_t n = 0; m != net.final(); ++n) {
        if (n == kMaxSteps)
            throw ConfigError("case " + std::to_string(case_index) + " did not reach the final marking within " +
                              std::to_string(kMaxSteps) + " firings");
        enabled.clear();
        double total = 0;
        for (auto t : net.by_id_order())
            if (net.is_enabled(m, t)) {
                enabled.push_back(t);
                total += weights[t];
            }
        if (enabled.empty())
            throw ConfigError("simulation deadlocked at marking " + net.to_marking(m).to_string());
        std::uint32_t pick = enabled.back();
        if (total <= 0) {
            pick = enabled[rng.below(enabled.size())];
        } else {
            double u = rng.uniform() * total;
            for (auto t : enabled) {
                if (weights[t] <= 0) continue;
                if (u < weights[t]) {
                    pick = t;
                    break;
                }
                u -= weights[t];
                pick = t;
            }
        }
        net.fire(m, pick);
        if (const auto& label = net.label(pick)) {
            auto d = cfg.delays.find(*label);
            const DelaySpec& spec = d == cfg.delays.end() ? cfg.default_delay : d->second;
            double h = draw_hours(spec, rng);
            steps.push_back({*label, steps.empty() ? 0.0 : h, 0});
        }
    }
    return steps;
}

double raw_hours(const Draft& d) {
    double s = 0;
    for (const auto& st : d.steps) s += st.hours;
    return s;
}

void apply_offsets(Draft& d, double scale) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
        if (i > 0) acc += std::max(kMinDelaySeconds, static_cast<std::int64_t>(std::llround(d.steps[i].hours * scale * 3600.0)));
        d.steps[i].offset_s = acc;
    }
}

std::optional<std::pair<std::int64_t, std::int64_t>> activity_window(const Draft& d, const PeakSpec& peak) {
    std::optional<std::int64_t> s, e;
    for (const auto& st : d.steps) {
        if (!s && st.activity == peak.start_activity) s = st.offset_s;
        else if (s && !e && st.activity == peak.end_activity) e = st.offset_s;
    }
    if (!s || !e) return std::nullopt;
    return std::make_pair(*s, *e);
}

std::int64_t to_s(Timestamp t) { return std::chrono::duration_cast<seconds>(t.time_since_epoch()).count(); }
Timestamp from_s(std::int64_t s) { return Timestamp(seconds(s)); }

std::int64_t uniform_between(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo) + 1));
}

void place_uniform(std::vector<Draft>& drafts, const std::vector<std::size_t>& members, const WaveSpec& w, Rng& rng) {
    std::vector<std::int64_t> at;
    for (std::size_t k = 0; k < members.size(); ++k) at.push_back(uniform_between(rng, to_s(w.start), to_s(w.end)));
    std::sort(at.begin(), at.end());
    for (std::size_t k = 0; k < members.size(); ++k) drafts[members[k]].admission = from_s(at[k]);
}

void place_peak_wave(std::vector<Draft>& drafts, const std::vector<std::size_t>& members, const WaveSpec& w,
                     const PeakSpec& peak, Rng& rng) {
    const std::int64_t ws = to_s(w.start), we = to_s(w.end), target = to_s(peak.instant);
    std::vector<std::size_t> ventilated, plain;
    for (auto i : members) (activity_window(drafts[i], peak) ? ventilated : plain).push_back(i);
    if (ventilated.size() < peak.count)
        throw ConfigError("peak wave has " + std::to_string(ventilated.size()) + " cases with " +
                          peak.start_activity + ", fewer than peak.count " + std::to_string(peak.count));
    rng.shuffle(ventilated);
    // Cases whose ventilation can cover the peak instant go first.
    auto coverable = [&](std::size_t i) {
        auto [vs, ve] = *activity_window(drafts[i], peak);
        return std::max(target - ve + 1, ws) <= std::min(target - vs, we);
    };
    auto split = std::stable_partition(ventilated.begin(), ventilated.end(), coverable);
    if (static_cast<std::size_t>(split - ventilated.begin()) < peak.count)
        throw ConfigError("only " + std::to_string(split - ventilated.begin()) + " cases of the peak wave can be " +
                          peak.start_activity + " at peak.instant, fewer than peak.count " +
                          std::to_string(peak.count));

    std::int64_t s_min = target, e_max = target;
    for (std::size_t k = 0; k < peak.count; ++k) {
        Draft& d = drafts[ventilated[k]];
        auto [vs, ve] = *activity_window(d, peak);
        std::int64_t a;
        if (k == 0) {
            a = target - vs;
            if (a < ws || a > we) throw ConfigError("peak.instant cannot be reached inside its wave window");
        } else {
            // Interval [a + vs, a + ve) must contain the target instant.
            std::int64_t lo = std::max(target - ve + 1, ws);
            std::int64_t hi = std::min(target - vs, we);
            if (lo > hi) throw ConfigError("cannot place case " + std::to_string(ventilated[k]) + " over the peak");
            a = uniform_between(rng, lo, hi);
        }
        d.admission = from_s(a);
        s_min = std::min(s_min, a + vs);
        e_max = std::max(e_max, a + ve);
    }
    for (std::size_t k = peak.count; k < ventilated.size(); ++k) {
        Draft& d = drafts[ventilated[k]];
        auto [vs, ve] = *activity_window(d, peak);
        const std::int64_t before_hi = s_min - ve, after_lo = e_max - vs;
        const bool before = before_hi >= ws, after = after_lo <= we;
        std::int64_t a;
        if (before && after) {
            double span_b = static_cast<double>(before_hi - ws + 1), span_a = static_cast<double>(we - after_lo + 1);
            a = rng.uniform() * (span_b + span_a) < span_b ? uniform_between(rng, ws, before_hi)
                                                           : uniform_between(rng, after_lo, we);
        } else if (before) {
            a = uniform_between(rng, ws, before_hi);
        } else if (after) {
            a = uniform_between(rng, after_lo, we);
        } else {
            throw ConfigError("cannot keep case " + std::to_string(ventilated[k]) + " clear of the peak window");
        }
        d.admission = from_s(a);
    }
    for (auto i : plain) drafts[i].admission = from_s(uniform_between(rng, ws, we));
}

std::string case_name(std::size_t i, std::size_t n) {
    std::string digits = std::to_string(i + 1);
    std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
    return "case-" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

EventLog simulate(const SimConfig& config, const PetriNet& model) {
    validate(config);
    const IndexedNet net(model);
    const std::vector<WaveSpec> waves = config.waves.empty() ? default_waves() : config.waves;
    const std::size_t n = config.case_count;
    const auto counts = largest_remainder(waves, n);
    const auto ongoing = static_cast<std::size_t>(std::llround(config.ongoing_fraction * static_cast<double>(n)));

    std::optional<std::size_t> peak_wave;
    if (config.peak) {
        for (std::size_t w = 0; w < waves.size(); ++w)
            if (waves[w].start <= config.peak->instant && config.peak->instant <= waves[w].end) peak_wave = w;
        if (!peak_wave) throw ConfigError("peak.instant lies outside every wave window");
    }

    std::vector<Draft> drafts(n);
    std::vector<std::vector<std::size_t>> members(waves.size());
    {
        std::size_t i = 0;
        for (std::size_t w = 0; w < waves.size(); ++w)
            for (std::size_t k = 0; k < counts[w]; ++k, ++i) {
                drafts[i].wave = w;
                members[w].push_back(i);
            }
    }

    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(substream_seed(config.seed, i));
        Draft& d = drafts[i];
        d.steps = play(net, config, rng, i);
        d.ards = rng.bernoulli(config.ards_probability);
        d.ongoing = i >= n - ongoing;
        d.keep = d.steps.size();
        if (d.ongoing && d.steps.size() >= 2) d.keep = 1 + static_cast<std::size_t>(rng.below(d.steps.size() - 1));
        if (d.ongoing && peak_wave && d.wave == *peak_wave)
            throw ConfigError("ongoing cases fall into the peak wave; lower ongoing_fraction");
    }

    for (std::size_t w = 0; w < waves.size(); ++w) {
        double scale = 1.0;
        if (waves[w].mean_duration_hours) {
            double sum = 0;
            std::size_t complete = 0;
            for (auto i : members[w])
                if (!drafts[i].ongoing) {
                    sum += raw_hours(drafts[i]);
                    ++complete;
                }
            if (complete == 0 || sum <= 0)
                throw ConfigError("wave '" + waves[w].name + "' has no complete case to scale");
            scale = *waves[w].mean_duration_hours / (sum / static_cast<double>(complete));
        }
        for (auto i : members[w]) apply_offsets(drafts[i], scale);
    }

    for (std::size_t w = 0; w < waves.size(); ++w) {
        Rng rng(substream_seed(config.seed, (std::uint64_t{1} << 40) + w));
        if (peak_wave && w == *peak_wave)
            place_peak_wave(drafts, members[w], waves[w], *config.peak, rng);
        else
            place_uniform(drafts, members[w], waves[w], rng);
    }

    EventLog log;
    log.name = config.log_name;
    log.traces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Draft& d = drafts[i];
        Trace t;
        t.case_id = case_name(i, n);
        t.attributes.emplace(std::string(kCompleteKey), !d.ongoing);
        t.attributes.emplace(std::string(kArdsKey), d.ards);
        for (std::size_t k = 0; k < d.keep; ++k)
            t.events.push_back(Event{d.steps[k].activity, d.admission + seconds(d.steps[k].offset_s), {}, {}});
        log.traces.push_back(std::move(t));
    }

    if (config.peak) {
        const PeakSpec& peak = *config.peak;
        auto series = occupancy(log, peak.start_activity, peak.end_activity);
        if (!series.peak || series.peak->count != peak.count ||
            floor_day(series.peak->at) != floor_day(peak.instant)) {
            std::string got = series.peak ? std::to_string(series.peak->count) + " at " + format_iso8601(series.peak->at)
                                          : std::string("none");
            throw ConfigError("peak target " + std::to_string(peak.count) + " on " +
                              format_iso8601(floor_day(peak.instant)) + " not met (got " + got + ")");
        }
    }
    return log;
}

EventLog inject_noise(const EventLog& log, const NoiseSpec& spec) {
    check_probability(spec.event_drop_probability, "drop probability");
    EventLog out = log;
    for (std::size_t i = 0; i < out.traces.size(); ++i) {
        auto& events = out.traces[i].events;
        if (events.size() <= 2) continue;
        Rng rng(substream_seed(spec.seed, i));
        std::vector<Event> kept;
        kept.reserve(events.size());
        kept.push_back(std::move(events.front()));
        for (std::size_t k = 1; k + 1 < events.size(); ++k)
            if (!rng.bernoulli(spec.event_drop_probability)) kept.push_back(std::move(events[k]));
        kept.push_back(std::move(events.back()));
        events = std::move(kept);
    }
    return out;
}

NoiseCalibration calibrate_drop_probability(const EventLog& clean, const PetriNet& net, double target_fitness,
                                            std::uint64_t noise_seed, int iterations) {
    auto fitness_at = [&](double p) { return replay_log(net, inject_noise(clean, {p, noise_seed})).log_fitness; };
    NoiseCalibration best{0.0, fitness_at(0.0), 0};
    double lo = 0.0, hi = 1.0;
    for (int it = 1; it <= iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = fitness_at(mid);
        if (std::abs(f - target_fitness) < std::abs(best.fitness - target_fitness)) best = {mid, f, it};
        if (f > target_fitness) lo = mid;
        else hi = mid;
        best.iterations = it;
    }
    return best;
}

}  // namespace pmkit
