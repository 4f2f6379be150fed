// config.hpp - experiment configuration: schema, loading, validation
//
// Configs are JSON documents. Schema (all sections optional unless noted):
//
//   scenario                      string
//   waveform.N                    int >= 2                      (required)
//   waveform.c1, waveform.c2      number | "paper-default"      (-1/(2N))
//   waveform.subcarrier_spacing_hz number > 0; BW = N * spacing
//   frame.pilot.family            "single_chirp" | "gold_bpsk" | "zadoff_chu"
//   frame.pilot.length            M >= 1
//   frame.pilot.degree            Gold degree (gold_bpsk)
//   frame.pilot.seed              Gold shift / Zadoff-Chu root
//   frame.pilot_start, frame.guard_left, frame.guard_right   int >= 0
//   frame.pilot_power_boost       number >= 1
//   frame.data                    "none" | "fill" (QPSK on every free index)
//   channel.l_max, channel.q_max  int >= 0 (l_max is also the prefix length)
//   channel.range_mode            "bistatic" | "monostatic"
//   channel.targets[]             {delay_samples | delay_s | range_m, doppler_bins, gain_db, phase_deg}
//   channel.self_interference     {enabled, power_db}
//   channel.snr_db                number | null (null = noiseless)
//   subnyquist.O, subnyquist.phase_offset
//   monostatic.decimation, monostatic.dc_block_halfwidth
//   narrowband.pilot_degree, narrowband.pilot_seed
//   experiment.snr_grid_db[], experiment.trials, experiment.base_seed,
//   experiment.delay_interval_samples [lo, hi], experiment.miss_threshold,
//   experiment.threads (0 = hardware concurrency)
//   output                        directory for CSV artifacts

#pragma once

#include "afdm/bistatic_rx.hpp"
#include "afdm/channel.hpp"
#include "afdm/estimation.hpp"
#include "afdm/frame.hpp"
#include "afdm/mono_rx.hpp"
#include "afdm/sequences.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace afdm::harness {

using json = nlohmann::ordered_json;

struct PilotConfig {
    PilotFamily family = PilotFamily::single_chirp;
    std::size_t length = 1;
    int degree = 5;
    std::int64_t seed = 0;
};

struct TargetConfig {
    // Exactly one of these describes the delay.
    std::optional<double> delay_samples;
    std::optional<double> delay_s;
    std::optional<double> range_m;
    std::int64_t doppler_bins = 0;
    double gain_db = 0.0;
    double phase_deg = 0.0;
};

struct ExperimentConfig {
    std::string scenario = "unnamed";

    std::size_t N = 256;
    double c1 = 0.0;
    double c2 = 0.0;
    bool c1_paper_default = true;
    bool c2_paper_default = true;
    double subcarrier_spacing_hz = 30e3;

    PilotConfig pilot;
    std::size_t pilot_start = 0;
    std::size_t guard_left = 0;
    std::size_t guard_right = 0;
    double pilot_power_boost = 1.0;
    bool fill_data = false;

    std::int64_t l_max = 16;
    std::int64_t q_max = 0;
    RangeMode range_mode = RangeMode::bistatic;
    std::vector<TargetConfig> targets;
    bool si_enabled = false;
    double si_power_db = 60.0;
    std::optional<double> snr_db;

    std::size_t O = 4;
    std::size_t phase_offset = 0;

    std::size_t decimation = 1;
    std::size_t dc_block_halfwidth = 0;

    int narrowband_pilot_degree = 0;  // 0 = smallest degree covering N/O
    std::int64_t narrowband_pilot_seed = 1;

    std::vector<double> snr_grid_db{0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
    std::size_t trials = 2000;
    std::uint64_t base_seed = 1;
    double delay_lo_samples = 1.0;
    double delay_hi_samples = 32.0;
    double miss_threshold = 4.0;
    std::size_t threads = 0;

    std::string output = "out";

    double bandwidth_hz() const { return static_cast<double>(N) * subcarrier_spacing_hz; }

    DaftParams params() const {
        const double d = -1.0 / (2.0 * static_cast<double>(N));
        return DaftParams{N, c1_paper_default ? d : c1, c2_paper_default ? d : c2};
    }

    SubNyquistConfig subnyquist() const { return SubNyquistConfig{O, params(), phase_offset, l_max}; }
};

// ---------------------------------------------------------------------------
// Derived objects
// ---------------------------------------------------------------------------

inline PilotSequence make_pilot(const PilotConfig& p) {
    switch (p.family) {
        case PilotFamily::single_chirp:
            if (p.length != 1) throw ConfigError("frame.pilot: single_chirp requires length 1");
            return single_chirp_pilot();
        case PilotFamily::gold_bpsk: return gold_bpsk_pilot(p.degree, p.seed, p.length);
        case PilotFamily::zadoff_chu: return zadoff_chu(static_cast<std::int64_t>(p.length), p.seed);
    }
    throw ConfigError("frame.pilot: unknown family");
}

inline int narrowband_degree(const ExperimentConfig& c) {
    if (c.narrowband_pilot_degree != 0) return c.narrowband_pilot_degree;
    const std::size_t need = c.N / std::max<std::size_t>(c.O, 1);
    for (int d : {5, 6, 7, 10, 11}) {
        if ((std::size_t{1} << d) - 1 >= need) return d;
    }
    throw ConfigError("narrowband pilot: N/O = " + std::to_string(need) + " exceeds the longest Gold period (2047)");
}

inline PilotSequence make_narrowband_pilot(const ExperimentConfig& c) {
    return gold_bpsk_pilot(narrowband_degree(c), c.narrowband_pilot_seed, c.N / c.O);
}

/// Frame spec without data (the pilot-only frame used by bistatic sensing).
inline FrameSpec make_pilot_frame_spec(const ExperimentConfig& c) {
    FrameSpec s;
    s.params = c.params();
    s.pilot_start = c.pilot_start;
    s.pilot = make_pilot(c.pilot);
    s.guard_left = c.guard_left;
    s.guard_right = c.guard_right;
    s.pilot_power_boost = c.pilot_power_boost;
    s.l_max = c.l_max;
    s.q_max = c.q_max;
    return s;
}

inline FrameSpec make_frame_spec(const ExperimentConfig& c) {
    auto s = make_pilot_frame_spec(c);
    if (c.fill_data) s.data_indices = free_indices(s);
    return s;
}

inline std::int64_t target_delay_samples(const ExperimentConfig& c, const TargetConfig& t) {
    double d = 0.0;
    if (t.delay_samples) {
        d = *t.delay_samples;
    } else if (t.delay_s) {
        d = *t.delay_s * c.bandwidth_hz();
    } else if (t.range_m) {
        const double tau = c.range_mode == RangeMode::monostatic ? 2.0 * *t.range_m / kSpeedOfLight
                                                                 : *t.range_m / kSpeedOfLight;
        d = tau * c.bandwidth_hz();
    }
    return static_cast<std::int64_t>(std::llround(d));
}

/// Target paths on the sample grid (delays rounded to the nearest tap).
inline std::vector<Path> make_target_paths(const ExperimentConfig& c) {
    std::vector<Path> out;
    for (const auto& t : c.targets) {
        const double amp = std::pow(10.0, t.gain_db / 20.0);
        out.push_back(Path{target_delay_samples(c, t), t.doppler_bins, std::polar(amp, t.phase_deg * std::numbers::pi / 180.0)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate(const ExperimentConfig& c) {
    if (c.N < 2) throw ConfigError("waveform.N must be >= 2");
    if (!(c.subcarrier_spacing_hz > 0.0)) throw ConfigError("waveform.subcarrier_spacing_hz must be > 0");
    if (c.O == 0 || c.N % c.O != 0) {
        throw ConfigError("O must divide N (O = " + std::to_string(c.O) + ", N = " + std::to_string(c.N) + ")");
    }
    if (c.l_max < 0 || c.q_max < 0) throw ConfigError("channel.l_max and channel.q_max must be >= 0");
    if (static_cast<std::size_t>(c.l_max) >= c.N) throw ConfigError("channel.l_max must be < N (it is the prefix length)");
    try {
        validate(make_frame_spec(c));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    validate(c.subnyquist());
    for (const auto& t : c.targets) {
        const int given = static_cast<int>(t.delay_samples.has_value()) + static_cast<int>(t.delay_s.has_value()) +
                          static_cast<int>(t.range_m.has_value());
        if (given != 1) throw ConfigError("channel.targets[]: give exactly one of delay_samples, delay_s, range_m");
        const auto l = target_delay_samples(c, t);
        if (l < 0 || l > c.l_max) {
            throw ConfigError("channel.targets[]: delay " + std::to_string(l) + " samples outside [0, l_max = " +
                              std::to_string(c.l_max) + "]");
        }
        if (std::abs(t.doppler_bins) > c.q_max) {
            throw ConfigError("channel.targets[]: |doppler_bins| exceeds q_max = " + std::to_string(c.q_max));
        }
    }
    if (c.decimation == 0 || c.N % c.decimation != 0) throw ConfigError("monostatic.decimation must divide N");
    {
        // The retained composite band must survive decimation without folding onto itself.
        std::size_t width = 0;
        for (const auto& iv : composite_passband(c.params(), c.l_max, c.q_max, c.pilot.length)) {
            width += static_cast<std::size_t>(iv.hi - iv.lo + 1);
        }
        if (width > c.N / c.decimation) {
            throw ConfigError("monostatic: retained band of " + std::to_string(width) + " bins exceeds N/D = " +
                              std::to_string(c.N / c.decimation));
        }
    }
    (void)make_narrowband_pilot(c);
    if (c.trials < 1) throw ConfigError("experiment.trials must be >= 1");
    if (!(c.delay_lo_samples >= 0.0 && c.delay_hi_samples > c.delay_lo_samples)) {
        throw ConfigError("experiment.delay_interval_samples must satisfy 0 <= lo < hi");
    }
    const auto unamb = max_unambiguous_delay(SubNyquistConfig{c.O, c.params(), 0, 0});
    if (!unamb || std::ceil(c.delay_hi_samples) + 1 > static_cast<double>(*unamb)) {
        throw ConfigError("experiment.delay_interval_samples: upper end must leave the drawn delays inside the "
                          "unambiguous range 2N|c1|(l+1) < N/O");
    }
    if (c.miss_threshold <= 0.0) throw ConfigError("experiment.miss_threshold must be > 0");
}

// ---------------------------------------------------------------------------
// JSON <-> ExperimentConfig
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

inline void read_rate(const json& j, const char* key, double& value, bool& paper_default) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() != "paper-default") {
            throw ConfigError(std::string("waveform.") + key + ": expected a number or \"paper-default\"");
        }
        paper_default = true;
    } else {
        value = v.get<double>();
        paper_default = false;
    }
}

}  // namespace detail

inline ExperimentConfig from_json(const json& j) {
    ExperimentConfig c;
    try {
        detail::read_opt(j, "scenario", c.scenario);
        if (!j.contains("waveform") || !j.at("waveform").contains("N")) throw ConfigError("waveform.N is required");
        const auto& w = j.at("waveform");
        c.N = w.at("N").get<std::size_t>();
        detail::read_rate(w, "c1", c.c1, c.c1_paper_default);
        detail::read_rate(w, "c2", c.c2, c.c2_paper_default);
        detail::read_opt(w, "subcarrier_spacing_hz", c.subcarrier_spacing_hz);

        if (j.contains("frame")) {
            const auto& f = j.at("frame");
            if (f.contains("pilot")) {
                const auto& p = f.at("pilot");
                if (p.contains("family")) c.pilot.family = pilot_family_from_string(p.at("family").get<std::string>());
                detail::read_opt(p, "length", c.pilot.length);
                detail::read_opt(p, "degree", c.pilot.degree);
                detail::read_opt(p, "seed", c.pilot.seed);
            }
            detail::read_opt(f, "pilot_start", c.pilot_start);
            detail::read_opt(f, "guard_left", c.guard_left);
            detail::read_opt(f, "guard_right", c.guard_right);
            detail::read_opt(f, "pilot_power_boost", c.pilot_power_boost);
            if (f.contains("data")) {
                const auto d = f.at("data").get<std::string>();
                if (d != "none" && d != "fill") throw ConfigError("frame.data must be \"none\" or \"fill\"");
                c.fill_data = (d == "fill");
            }
        }
        if (j.contains("channel")) {
            const auto& ch = j.at("channel");
            detail::read_opt(ch, "l_max", c.l_max);
            detail::read_opt(ch, "q_max", c.q_max);
            if (ch.contains("range_mode")) {
                const auto m = ch.at("range_mode").get<std::string>();
                if (m != "bistatic" && m != "monostatic") throw ConfigError("channel.range_mode must be bistatic or monostatic");
                c.range_mode = m == "monostatic" ? RangeMode::monostatic : RangeMode::bistatic;
            }
            if (ch.contains("targets")) {
                for (const auto& t : ch.at("targets")) {
                    TargetConfig tc;
                    if (t.contains("delay_samples")) tc.delay_samples = t.at("delay_samples").get<double>();
                    if (t.contains("delay_s")) tc.delay_s = t.at("delay_s").get<double>();
                    if (t.contains("range_m")) tc.range_m = t.at("range_m").get<double>();
                    detail::read_opt(t, "doppler_bins", tc.doppler_bins);
                    detail::read_opt(t, "gain_db", tc.gain_db);
                    detail::read_opt(t, "phase_deg", tc.phase_deg);
                    c.targets.push_back(tc);
                }
            }
            if (ch.contains("self_interference")) {
                const auto& si = ch.at("self_interference");
                detail::read_opt(si, "enabled", c.si_enabled);
                detail::read_opt(si, "power_db", c.si_power_db);
            }
            if (ch.contains("snr_db") && !ch.at("snr_db").is_null()) c.snr_db = ch.at("snr_db").get<double>();
        }
        if (j.contains("subnyquist")) {
            detail::read_opt(j.at("subnyquist"), "O", c.O);
            detail::read_opt(j.at("subnyquist"), "phase_offset", c.phase_offset);
        }
        if (j.contains("monostatic")) {
            detail::read_opt(j.at("monostatic"), "decimation", c.decimation);
            detail::read_opt(j.at("monostatic"), "dc_block_halfwidth", c.dc_block_halfwidth);
        }
        if (j.contains("narrowband")) {
            detail::read_opt(j.at("narrowband"), "pilot_degree", c.narrowband_pilot_degree);
            detail::read_opt(j.at("narrowband"), "pilot_seed", c.narrowband_pilot_seed);
        }
        if (j.contains("experiment")) {
            const auto& e = j.at("experiment");
            detail::read_opt(e, "snr_grid_db", c.snr_grid_db);
            detail::read_opt(e, "trials", c.trials);
            detail::read_opt(e, "base_seed", c.base_seed);
            if (e.contains("delay_interval_samples")) {
                const auto iv = e.at("delay_interval_samples").get<std::vector<double>>();
                if (iv.size() != 2) throw ConfigError("experiment.delay_interval_samples must be [lo, hi]");
                c.delay_lo_samples = iv[0];
                c.delay_hi_samples = iv[1];
            }
            detail::read_opt(e, "miss_threshold", c.miss_threshold);
            detail::read_opt(e, "threads", c.threads);
        }
        detail::read_opt(j, "output", c.output);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return c;
}

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["waveform"] = {
        {"N", c.N},
        {"c1", c.c1_paper_default ? json("paper-default") : json(c.c1)},
        {"c2", c.c2_paper_default ? json("paper-default") : json(c.c2)},
        {"subcarrier_spacing_hz", c.subcarrier_spacing_hz},
    };
    j["frame"] = {
        {"pilot", {{"family", to_string(c.pilot.family)}, {"length", c.pilot.length}, {"degree", c.pilot.degree},
                   {"seed", c.pilot.seed}}},
        {"pilot_start", c.pilot_start},
        {"guard_left", c.guard_left},
        {"guard_right", c.guard_right},
        {"pilot_power_boost", c.pilot_power_boost},
        {"data", c.fill_data ? "fill" : "none"},
    };
    json targets = json::array();
    for (const auto& t : c.targets) {
        json tj;
        if (t.delay_samples) tj["delay_samples"] = *t.delay_samples;
        if (t.delay_s) tj["delay_s"] = *t.delay_s;
        if (t.range_m) tj["range_m"] = *t.range_m;
        tj["doppler_bins"] = t.doppler_bins;
        tj["gain_db"] = t.gain_db;
        tj["phase_deg"] = t.phase_deg;
        targets.push_back(tj);
    }
    j["channel"] = {
        {"l_max", c.l_max},
        {"q_max", c.q_max},
        {"range_mode", c.range_mode == RangeMode::monostatic ? "monostatic" : "bistatic"},
        {"targets", targets},
        {"self_interference", {{"enabled", c.si_enabled}, {"power_db", c.si_power_db}}},
        {"snr_db", c.snr_db ? json(*c.snr_db) : json(nullptr)},
    };
    j["subnyquist"] = {{"O", c.O}, {"phase_offset", c.phase_offset}};
    j["monostatic"] = {{"decimation", c.decimation}, {"dc_block_halfwidth", c.dc_block_halfwidth}};
    j["narrowband"] = {{"pilot_degree", c.narrowband_pilot_degree}, {"pilot_seed", c.narrowband_pilot_seed}};
    j["experiment"] = {
        {"snr_grid_db", c.snr_grid_db},
        {"trials", c.trials},
        {"base_seed", c.base_seed},
        {"delay_interval_samples", {c.delay_lo_samples, c.delay_hi_samples}},
        {"miss_threshold", c.miss_threshold},
        {"threads", c.threads},
    };
    j["output"] = c.output;
    return j;
}

inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    auto c = from_json(j);
    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Resolves a preset name (e.g. "desk-n256") to a file in `dir`.
inline std::filesystem::path preset_path(const std::string& name, const std::filesystem::path& dir) {
    auto p = dir / (name + ".json");
    if (!std::filesystem::exists(p)) throw ConfigError("unknown preset '" + name + "' (looked for " + p.string() + ")");
    return p;
}

}  // namespace afdm::harness
