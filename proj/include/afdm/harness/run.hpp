// run.hpp - the CLI subcommands as library calls, plus CSV and manifest output
//
// Every command is a pure function of (config, seed) returning a result
// struct; run_command turns results into CSV files. Output formatting is
// fixed ("%.12g"), so identical inputs give byte-identical files.

#pragma once

#include "afdm/harness/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace afdm::harness {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
};

inline void apply_overrides(ExperimentConfig& c, const RunOptions& o) {
    if (o.seed) c.base_seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (o.out) c.output = *o.out;
    if (o.threads) c.threads = *o.threads;
    validate(c);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// The config without run-environment fields (output path, thread count),
/// which do not affect results. This is what the manifest hash covers.
inline json identity_json(const ExperimentConfig& c) {
    auto j = to_json(c);
    j.erase("output");
    j["experiment"].erase("threads");
    return j;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Noise variance per full-rate sample for the configured SNR (0 if noiseless).
inline double noise_variance_for(const ExperimentConfig& c, const AfdmFrame& frame) {
    if (!c.snr_db) return 0.0;
    return snr_to_noise_variance(frame.time_signal.energy() / static_cast<double>(c.N), *c.snr_db);
}

// ---------------------------------------------------------------------------
// gen-frame
// ---------------------------------------------------------------------------

inline AfdmFrame make_frame(const ExperimentConfig& c, std::uint64_t seed) {
    const auto spec = make_frame_spec(c);
    std::mt19937_64 rng(derive_seed(seed, 10, 0));
    const auto data = random_qpsk(spec.data_indices.size(), rng);
    return build_frame(spec, data, c.bandwidth_hz());
}

inline std::vector<std::string> frame_regions(const FrameSpec& spec) {
    const auto map = afdm::detail::region_map(spec);
    std::vector<std::string> out;
    for (auto r : map) {
        switch (r) {
            case afdm::detail::Region::empty: out.emplace_back("empty"); break;
            case afdm::detail::Region::pilot: out.emplace_back("pilot"); break;
            case afdm::detail::Region::guard: out.emplace_back("guard"); break;
            case afdm::detail::Region::data: out.emplace_back("data"); break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// sic-demo
// ---------------------------------------------------------------------------

struct StageEnergy {
    std::string stage;
    double total = 0.0;
    double si = 0.0;
    double echo = 0.0;
};

struct SicDemoResult {
    std::vector<StageEnergy> stages;
    BeatProfile profile;
    DetectionResult detections;
    double si_suppression_db = 0.0;
};

inline SicDemoResult sic_demo(const ExperimentConfig& c, std::uint64_t seed) {
    const auto frame = make_frame(c, seed);
    const auto params = c.params();
    const auto tx = add_chirp_periodic_prefix(frame.time_signal, params, static_cast<std::size_t>(c.l_max));
    const auto echoes = make_target_paths(c);

    ChannelRealization ch;
    ch.paths = echoes;
    if (c.si_enabled) ch.si_path = self_interference_path(c.si_power_db);
    ch.noise_variance = noise_variance_for(c, frame);
    const auto rx = strip_prefix(apply_channel(tx, ch, derive_seed(seed, 11, 0)));

    std::vector<Path> si_only;
    if (ch.si_path) si_only.push_back(*ch.si_path);
    const auto rx_si = strip_prefix(apply_paths(tx, si_only));
    const auto rx_echo = strip_prefix(apply_paths(tx, echoes));

    const auto cfg = make_dechirp_config(frame, c.decimation, c.dc_block_halfwidth, c.l_max, c.q_max);
    const auto all = run_monostatic_chain(rx, cfg, params);
    const auto si = run_monostatic_chain(rx_si, cfg, params);
    const auto echo = run_monostatic_chain(rx_echo, cfg, params);

    SicDemoResult res;
    res.stages.push_back({"received", rx.energy(), rx_si.energy(), rx_echo.energy()});
    res.stages.push_back({"dechirped", all.dechirped.energy(), si.dechirped.energy(), echo.dechirped.energy()});
    res.stages.push_back({"after_sic", all.after_sic.energy(), si.after_sic.energy(), echo.after_sic.energy()});
    res.stages.push_back({"decimated", all.decimated.energy(), si.decimated.energy(), echo.decimated.energy()});
    const double before = si.dechirped.energy();
    const double after = std::max(si.after_sic.energy(), 1e-300);
    res.si_suppression_db = before > 0.0 ? 10.0 * std::log10(before / after) : 0.0;
    res.profile = all.profile;
    res.detections = detect_peaks(all.profile.to_delay_profile(c.bandwidth_hz()), std::max<std::size_t>(c.targets.size(), 1),
                                  0.3, 0.0, RangeMode::monostatic);
    return res;
}

// ---------------------------------------------------------------------------
// bistatic-detect and resolve-two-targets
// ---------------------------------------------------------------------------

/// Received pilot-only frame (prefix stripped) for the configured targets.
inline ComplexSignal bistatic_receive(const ExperimentConfig& c, const AfdmFrame& frame, std::uint64_t seed) {
    const auto tx = add_chirp_periodic_prefix(frame.time_signal, c.params(), static_cast<std::size_t>(c.l_max));
    ChannelRealization ch;
    ch.paths = make_target_paths(c);
    ch.noise_variance = noise_variance_for(c, frame);
    return strip_prefix(apply_channel(tx, ch, derive_seed(seed, 12, 0)));
}

struct BistaticResult {
    DelayProfile profile;
    DetectionResult detections;
};

inline BistaticResult bistatic_detect(const ExperimentConfig& c, std::uint64_t seed, double threshold_rel = 0.5) {
    const auto frame = build_frame(make_pilot_frame_spec(c), c.bandwidth_hz());
    const auto r = bistatic_receive(c, frame, seed);
    BistaticResult res;
    res.profile = subnyquist_profile(r, c.subnyquist(), frame, c.bandwidth_hz());
    res.detections = detect_peaks(res.profile, std::max<std::size_t>(c.targets.size(), 1), threshold_rel, 0.0, c.range_mode);
    return res;
}

struct ResolveResult {
    DelayProfile afdm;
    DelayProfile prs;
    DetectionResult afdm_peaks;
    DetectionResult prs_peaks;
};

/// AFDM sub-Nyquist profile and the narrowband OFDM pilot profile for the
/// same targets; a target pair is resolved when two peaks clear threshold_rel.
inline ResolveResult resolve_two_targets(const ExperimentConfig& c, std::uint64_t seed, double threshold_rel = 0.5) {
    const auto frame = build_frame(make_pilot_frame_spec(c), c.bandwidth_hz());
    const auto r = bistatic_receive(c, frame, seed);
    ResolveResult res;
    res.afdm = subnyquist_profile(r, c.subnyquist(), frame, c.bandwidth_hz());
    ChannelRealization ch;
    ch.paths = make_target_paths(c);
    ch.noise_variance = c.snr_db ? snr_to_noise_variance(1.0, *c.snr_db) : 0.0;
    res.prs = narrowband_ofdm_baseline(c.N / c.O, c.O, make_narrowband_pilot(c), ch, derive_seed(seed, 13, 0),
                                       c.bandwidth_hz());
    const std::size_t k = std::max<std::size_t>(c.targets.size(), 2);
    res.afdm_peaks = detect_peaks(res.afdm, k, threshold_rel, 0.0, c.range_mode);
    res.prs_peaks = detect_peaks(res.prs, k, threshold_rel, 0.0, c.range_mode);
    return res;
}

// ---------------------------------------------------------------------------
// sweep-rmse
// ---------------------------------------------------------------------------

inline RmseConfig make_rmse_config(const ExperimentConfig& c) {
    RmseConfig r;
    r.pilot_frame = make_pilot_frame_spec(c);
    r.O = c.O;
    r.bandwidth_hz = c.bandwidth_hz();
    r.snr_grid_db = c.snr_grid_db;
    r.delay_lo_samples = c.delay_lo_samples;
    r.delay_hi_samples = c.delay_hi_samples;
    r.narrowband_pilot = make_narrowband_pilot(c);
    r.miss_threshold = c.miss_threshold;
    r.threads = c.threads;
    r.mode = c.range_mode;
    return r;
}

inline RmseReport sweep_rmse(const ExperimentConfig& c) {
    return rmse_experiment(make_rmse_config(c), c.trials, c.base_seed);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << header << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... cells) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cell(cells)), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string cell(T v) {
        return std::to_string(v);
    }

    std::ofstream out_;
};

inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const ExperimentConfig& c,
                           const std::vector<std::string>& files) {
    std::ofstream out(dir / "manifest.txt");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << "command=" << command << '\n';
    out << "scenario=" << c.scenario << '\n';
    out << "config_hash=fnv1a64:" << hex64(fnv1a64(identity_json(c).dump())) << '\n';
    out << "seed=" << c.base_seed << '\n';
    out << "trials=" << c.trials << '\n';
    out << "N=" << c.N << '\n';
    out << "O=" << c.O << '\n';
    out << "bandwidth_hz=" << fmt(c.bandwidth_hz()) << '\n';
    out << "version=" << kVersion << '\n';
    out << "files=";
    for (std::size_t i = 0; i < files.size(); ++i) out << (i ? "," : "") << files[i];
    out << '\n';
}

/// Runs a subcommand, writing CSVs and manifest.txt (plus config.json) into
/// c.output. Returns a human-readable summary.
inline std::string run_command(const std::string& command, const ExperimentConfig& c) {
    const std::filesystem::path dir = c.output;
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    std::ostringstream summary;
    const auto seed = c.base_seed;

    if (command == "gen-frame") {
        const auto frame = make_frame(c, seed);
        const auto regions = frame_regions(frame.spec);
        {
            CsvFile f(dir / "frame_daft.csv", "index,region,re,im");
            for (std::size_t m = 0; m < c.N; ++m) {
                f.row(m, regions[m], frame.daft_symbols[m].real(), frame.daft_symbols[m].imag());
            }
        }
        {
            CsvFile f(dir / "frame_time.csv", "n,re,im");
            for (std::size_t n = 0; n < c.N; ++n) f.row(n, frame.time_signal[n].real(), frame.time_signal[n].imag());
        }
        files = {"frame_daft.csv", "frame_time.csv"};
        summary << "frame: N=" << c.N << " pilot M=" << frame.spec.M() << " data=" << frame.spec.data_indices.size()
                << " energy=" << fmt(frame.time_signal.energy()) << '\n';
    } else if (command == "sic-demo") {
        const auto res = sic_demo(c, seed);
        {
            CsvFile f(dir / "sic_stages.csv", "stage,total_energy,si_energy,echo_energy");
            for (const auto& s : res.stages) f.row(s.stage, s.total, s.si, s.echo);
        }
        {
            CsvFile f(dir / "beat_profile.csv", "bin,magnitude,is_blind");
            std::vector<bool> blind(res.profile.magnitudes.size(), false);
            for (auto b : res.profile.blind_bins) blind[b] = true;
            for (std::size_t b = 0; b < blind.size(); ++b) f.row(b, res.profile.magnitudes[b], blind[b] ? 1 : 0);
        }
        files = {"sic_stages.csv", "beat_profile.csv"};
        summary << "self-interference suppression: " << fmt(res.si_suppression_db) << " dB\n";
        for (const auto& p : res.detections.peaks) {
            summary << "peak bin=" << p.bin << " delay_s=" << fmt(p.delay_s) << " range_m=" << fmt(p.range_m)
                    << " magnitude=" << fmt(p.magnitude) << '\n';
        }
    } else if (command == "bistatic-detect") {
        const auto res = bistatic_detect(c, seed);
        {
            CsvFile f(dir / "bistatic_profile.csv", "bin,delay_s,magnitude");
            for (std::size_t b = 0; b < res.profile.size(); ++b) {
                f.row(b, res.profile.delay_s[b], res.profile.magnitude[b]);
            }
        }
        files = {"bistatic_profile.csv"};
        for (const auto& p : res.detections.peaks) {
            summary << "peak bin=" << p.bin << " delay_s=" << fmt(p.delay_s) << " range_m=" << fmt(p.range_m)
                    << " magnitude=" << fmt(p.magnitude) << '\n';
        }
    } else if (command == "resolve-two-targets") {
        const auto res = resolve_two_targets(c, seed);
        {
            CsvFile f(dir / "resolve_profiles.csv", "bin,delay_afdm_s,afdm_downsampled,delay_prs_s,narrowband_prs");
            for (std::size_t b = 0; b < res.afdm.size(); ++b) {
                f.row(b, res.afdm.delay_s[b], res.afdm.magnitude[b], res.prs.delay_s[b], res.prs.magnitude[b]);
            }
        }
        files = {"resolve_profiles.csv"};
        summary << "afdm_downsampled peaks: " << res.afdm_peaks.peaks.size() << '\n';
        summary << "narrowband_prs peaks: " << res.prs_peaks.peaks.size() << '\n';
    } else if (command == "sweep-rmse") {
        const auto rep = sweep_rmse(c);
        {
            CsvFile f(dir / "rmse.csv",
                      "snr_db,afdm_full_m,afdm_downsampled_m,narrowband_prs_m,misses_afdm_full,"
                      "misses_afdm_downsampled,misses_narrowband_prs");
            for (std::size_t i = 0; i < rep.snr_grid_db.size(); ++i) {
                f.row(rep.snr_grid_db[i], rep.waveforms[0].rmse_m[i], rep.waveforms[1].rmse_m[i],
                      rep.waveforms[2].rmse_m[i], rep.waveforms[0].misses[i], rep.waveforms[1].misses[i],
                      rep.waveforms[2].misses[i]);
            }
        }
        {
            CsvFile f(dir / "rmse_floors.csv", "waveform,predicted_floor_m,measured_floor_m,ratio");
            for (const auto& w : rep.waveforms) {
                const double measured = w.rmse_m.empty() ? std::nan("") : w.rmse_m.back();
                f.row(w.name, w.floor_m_predicted, measured, measured / w.floor_m_predicted);
            }
        }
        files = {"rmse.csv", "rmse_floors.csv"};
        for (const auto& w : rep.waveforms) {
            summary << w.name << " floor: measured " << fmt(w.rmse_m.back()) << " m, predicted "
                    << fmt(w.floor_m_predicted) << " m\n";
        }
    } else {
        throw ConfigError("unknown command: " + command);
    }

    {
        std::ofstream cfg(dir / "config.json");
        cfg << serialize(c);
    }
    files.push_back("config.json");
    write_manifest(dir, command, c, files);
    return summary.str();
}

}  // namespace afdm::harness
