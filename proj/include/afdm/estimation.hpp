// estimation.hpp - peak detection, range estimation, the narrowband OFDM
// pilot baseline and the Monte Carlo range-RMSE experiment

#pragma once

#include "afdm/bistatic_rx.hpp"
#include "afdm/channel.hpp"
#include "afdm/fft.hpp"
#include "afdm/frame.hpp"
#include "afdm/parallel.hpp"
#include "afdm/random.hpp"
#include "afdm/sequences.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace afdm {

/// Monostatic ranges are half the round-trip path; bistatic use the full path.
enum class RangeMode { monostatic, bistatic };

inline double delay_to_range(double delay_s, RangeMode mode, double c_light = kSpeedOfLight) {
    return mode == RangeMode::monostatic ? c_light * delay_s / 2.0 : c_light * delay_s;
}

struct Peak {
    std::size_t bin = 0;
    double delay_s = 0.0;
    double range_m = 0.0;
    double magnitude = 0.0;
};

struct DetectionResult {
    std::vector<Peak> peaks;  // strongest first
    double threshold = 0.0;
    DelayProfile profile;
};

/// Circular local maxima with magnitude >= threshold_rel * (largest non-blind
/// magnitude) and >= abs_threshold. A plateau reports its lowest bin; equal
/// peaks are ordered by bin. Blind bins never produce peaks.
inline DetectionResult detect_peaks(const DelayProfile& profile, std::size_t k_max, double threshold_rel,
                                    double abs_threshold = 0.0, RangeMode mode = RangeMode::bistatic) {
    const std::size_t L = profile.size();
    if (L == 0) throw std::invalid_argument("detect_peaks: empty profile");
    if (!(threshold_rel > 0.0 && threshold_rel <= 1.0)) {
        throw std::invalid_argument("detect_peaks: threshold_rel must be in (0, 1]");
    }
    const auto& m = profile.magnitude;
    auto is_blind = [&](std::size_t b) { return !profile.blind.empty() && profile.blind[b]; };
    double global = 0.0;
    for (std::size_t b = 0; b < L; ++b) {
        if (!is_blind(b)) global = std::max(global, m[b]);
    }
    DetectionResult res;
    res.threshold = std::max(threshold_rel * global, abs_threshold);
    res.profile = profile;
    if (global <= 0.0) return res;
    for (std::size_t b = 0; b < L; ++b) {
        if (is_blind(b) || m[b] < res.threshold || m[b] <= 0.0) continue;
        const double left = L > 1 ? m[(b + L - 1) % L] : 0.0;
        const double right = L > 1 ? m[(b + 1) % L] : 0.0;
        if (m[b] > left && m[b] >= right) {
            const double d = profile.delay_s.empty() ? 0.0 : profile.delay_s[b];
            res.peaks.push_back({b, d, delay_to_range(d, mode), m[b]});
        }
    }
    std::stable_sort(res.peaks.begin(), res.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
    if (res.peaks.size() > k_max) res.peaks.resize(k_max);
    return res;
}

/// Range of the strongest peak; nullopt is a missed detection.
inline std::optional<double> estimate_range(const DetectionResult& result, double c_light = kSpeedOfLight,
                                            RangeMode mode = RangeMode::bistatic) {
    if (result.peaks.empty()) return std::nullopt;
    return delay_to_range(result.peaks.front().delay_s, mode, c_light);
}

/// Centered subcarrier frequency index of subcarrier slot k in [0, n).
inline std::int64_t centered_subcarrier(std::size_t k, std::size_t n) {
    const auto half = static_cast<std::int64_t>(n / 2);
    return static_cast<std::int64_t>(k) - half;
}

/// Narrowband OFDM pilot baseline at bandwidth BW/O: N_nb = N/O subcarriers
/// on the same spacing BW/N, centered on DC, each carrying one pilot symbol.
/// Per subcarrier f_k = k BW/N the channel applies sum_p g_p exp(-i2pi k l_p / N)
/// (delays in full-rate samples); the receiver divides by the pilot and
/// inverse-transforms to a delay profile with bins of O/BW. Doppler and
/// self-interference are not modelled (single-symbol, bistatic use).
inline DelayProfile narrowband_ofdm_baseline(std::size_t N_nb, std::size_t O, const PilotSequence& pilot,
                                             const ChannelRealization& channel, std::uint64_t seed,
                                             double bandwidth_hz = 1.0) {
    if (pilot.length() != N_nb) {
        throw std::invalid_argument("narrowband_ofdm_baseline: pilot length " + std::to_string(pilot.length()) +
                                    " != N_nb " + std::to_string(N_nb));
    }
    if (N_nb == 0 || O == 0) throw std::invalid_argument("narrowband_ofdm_baseline: N_nb and O must be > 0");
    const double N = static_cast<double>(N_nb * O);
    const auto noise = complex_awgn(N_nb, channel.noise_variance, seed);
    std::vector<Complex> H_hat(N_nb);
    for (std::size_t k = 0; k < N_nb; ++k) {
        const double f = static_cast<double>(centered_subcarrier(k, N_nb));
        Complex H{0.0, 0.0};
        for (const auto& p : channel.paths) {
            H += p.gain * cis_turns(-f * static_cast<double>(p.delay_samples) / N);
        }
        const Complex Y = pilot.symbols[k] * H + noise[k];
        H_hat[k] = Y / pilot.symbols[k];
    }
    DelayProfile prof;
    prof.magnitude.resize(N_nb);
    prof.delay_s.resize(N_nb);
    prof.blind.assign(N_nb, false);
    // Centered subcarriers: shift to DFT order, then h[d] = (1/N_nb) sum_k H[k] e^{+i2pi k d / N_nb}.
    std::vector<Complex> ordered(N_nb);
    for (std::size_t k = 0; k < N_nb; ++k) {
        const auto f = centered_subcarrier(k, N_nb);
        ordered[static_cast<std::size_t>(mod_floor(f, static_cast<std::int64_t>(N_nb)))] = H_hat[k];
    }
    const auto h = idft(ordered);
    for (std::size_t d = 0; d < N_nb; ++d) {
        prof.magnitude[d] = std::abs(h[d]);
        prof.delay_s[d] = static_cast<double>(d * O) / bandwidth_hz;
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Range RMSE experiment
// ---------------------------------------------------------------------------

enum class Waveform : std::size_t { afdm_full = 0, afdm_downsampled = 1, narrowband_prs = 2 };
inline constexpr std::size_t kWaveformCount = 3;

inline const char* to_string(Waveform w) {
    switch (w) {
        case Waveform::afdm_full: return "afdm_full";
        case Waveform::afdm_downsampled: return "afdm_downsampled";
        case Waveform::narrowband_prs: return "narrowband_prs";
    }
    return "?";
}

struct RmseConfig {
    FrameSpec pilot_frame;          // pilot-only AFDM frame
    std::size_t O = 4;
    double bandwidth_hz = 1.0;
    std::vector<double> snr_grid_db;
    double delay_lo_samples = 1.0;  // true delay ~ U[lo, hi)
    double delay_hi_samples = 8.0;
    PilotSequence narrowband_pilot; // length N/O
    double miss_threshold = 4.0;    // strongest peak / RMS of the remaining bins
    std::size_t threads = 1;
    RangeMode mode = RangeMode::bistatic;
};

struct WaveformRmse {
    std::string name;
    std::vector<double> rmse_m;
    std::vector<double> rmse_samples;
    std::vector<std::size_t> misses;
    double floor_m_predicted = 0.0;
};

struct RmseReport {
    std::vector<double> snr_grid_db;
    std::size_t trials = 0;
    std::array<WaveformRmse, kWaveformCount> waveforms;

    const WaveformRmse& operator[](Waveform w) const { return waveforms[static_cast<std::size_t>(w)]; }
};

/// Delay of the strongest bin, or nullopt when it does not stand out of the
/// rest of the profile by `miss_threshold` (in RMS terms).
inline std::optional<double> argmax_delay(const DelayProfile& p, double miss_threshold) {
    const auto it = std::max_element(p.magnitude.begin(), p.magnitude.end());
    const auto best = static_cast<std::size_t>(it - p.magnitude.begin());
    double rest = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
        if (b != best) rest += p.magnitude[b] * p.magnitude[b];
    }
    const double rms = p.size() > 1 ? std::sqrt(rest / static_cast<double>(p.size() - 1)) : 0.0;
    if (*it <= 0.0 || *it < miss_threshold * rms) return std::nullopt;
    return p.delay_s[best];
}

/// Prefix length covering every delay the experiment can draw.
inline std::size_t rmse_prefix_length(const RmseConfig& cfg) {
    return static_cast<std::size_t>(std::ceil(cfg.delay_hi_samples)) + 1;
}

inline void validate(const RmseConfig& cfg) {
    const auto& params = cfg.pilot_frame.params;
    if (!(cfg.delay_lo_samples >= 0.0 && cfg.delay_hi_samples > cfg.delay_lo_samples)) {
        throw ConfigError("rmse: need 0 <= delay_lo < delay_hi");
    }
    if (cfg.bandwidth_hz <= 0.0) throw ConfigError("rmse: bandwidth must be > 0");
    if (cfg.O == 0 || params.N % cfg.O != 0) throw ConfigError("O must divide N");
    if (cfg.narrowband_pilot.length() != params.N / cfg.O) {
        throw ConfigError("rmse: narrowband pilot length must equal N/O");
    }
    validate(SubNyquistConfig{cfg.O, params, 0, static_cast<std::int64_t>(rmse_prefix_length(cfg))});
    if (!cfg.pilot_frame.data_indices.empty()) throw ConfigError("rmse: pilot frame must be pilot-only");
}

/// One Monte Carlo trial. Returns the delay error (samples) per waveform,
/// nullopt for a miss. Draws come from `seed` only.
inline std::array<std::optional<double>, kWaveformCount> rmse_trial(const RmseConfig& cfg, const AfdmFrame& frame,
                                                                    double snr_db, std::uint64_t seed) {
    const auto& params = frame.spec.params;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> delay_dist(cfg.delay_lo_samples, cfg.delay_hi_samples);
    std::uniform_real_distribution<double> phase_dist(0.0, 1.0);
    const double tau = delay_dist(rng);
    const Complex gain = cis_turns(phase_dist(rng));
    const auto l = static_cast<std::int64_t>(std::llround(tau));

    const std::size_t prefix = rmse_prefix_length(cfg);
    const double per_sample_power = frame.time_signal.energy() / static_cast<double>(params.N);

    ChannelRealization ch;
    ch.paths.push_back(Path{l, 0, gain});
    ch.noise_variance = snr_to_noise_variance(per_sample_power, snr_db);
    const auto tx = add_chirp_periodic_prefix(frame.time_signal, params, prefix);
    const auto r = strip_prefix(apply_channel(tx, ch, derive_seed(seed, 1, 0)));

    std::array<std::optional<double>, kWaveformCount> err;
    const auto bw = cfg.bandwidth_hz;
    auto score = [&](const DelayProfile& p) -> std::optional<double> {
        const auto d = argmax_delay(p, cfg.miss_threshold);
        if (!d) return std::nullopt;
        return *d * bw - tau;
    };
    const auto lmax = static_cast<std::int64_t>(prefix);
    err[0] = score(subnyquist_profile(r, SubNyquistConfig{1, params, 0, lmax}, frame, bw));
    err[1] = score(subnyquist_profile(r, SubNyquistConfig{cfg.O, params, 0, lmax}, frame, bw));

    ChannelRealization nb = ch;
    nb.noise_variance = snr_to_noise_variance(1.0, snr_db);
    err[2] = score(narrowband_ofdm_baseline(params.N / cfg.O, cfg.O, cfg.narrowband_pilot, nb,
                                            derive_seed(seed, 2, 0), bw));
    return err;
}

/// Per SNR point: draw a continuous true delay uniformly in
/// [delay_lo, delay_hi), realise the channel on the nearest integer tap,
/// estimate by argmax and score against the continuous truth. This yields
/// the uniform-quantisation floor (1/sqrt(12)) x bin spacing. Trials run in
/// parallel with seeds derive_seed(base_seed, snr_index, trial); reduction
/// is in trial order, so results do not depend on the thread count.
inline RmseReport rmse_experiment(const RmseConfig& cfg, std::size_t trials, std::uint64_t base_seed) {
    if (trials < 1) throw std::invalid_argument("rmse_experiment: trials must be >= 1");
    validate(cfg);
    const auto frame = build_frame(cfg.pilot_frame, cfg.bandwidth_hz);
    RmseReport rep;
    rep.snr_grid_db = cfg.snr_grid_db;
    rep.trials = trials;
    const double to_m = delay_to_range(1.0 / cfg.bandwidth_hz, cfg.mode);
    const double floor_samples = 1.0 / std::sqrt(12.0);
    for (std::size_t w = 0; w < kWaveformCount; ++w) {
        rep.waveforms[w].name = to_string(static_cast<Waveform>(w));
        const double spacing = (w == 2) ? static_cast<double>(cfg.O) : 1.0;
        rep.waveforms[w].floor_m_predicted = floor_samples * spacing * to_m;
    }
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        std::vector<std::array<std::optional<double>, kWaveformCount>> results(trials);
        parallel_for(trials, cfg.threads, [&](std::size_t t) {
            results[t] = rmse_trial(cfg, frame, cfg.snr_grid_db[i], derive_seed(base_seed, i, t));
        });
        for (std::size_t w = 0; w < kWaveformCount; ++w) {
            double sum_sq = 0.0;
            std::size_t hits = 0, misses = 0;
            for (const auto& r : results) {
                if (r[w]) {
                    sum_sq += (*r[w]) * (*r[w]);
                    ++hits;
                } else {
                    ++misses;
                }
            }
            const double rmse = hits ? std::sqrt(sum_sq / static_cast<double>(hits)) : std::nan("");
            rep.waveforms[w].rmse_samples.push_back(rmse);
            rep.waveforms[w].rmse_m.push_back(rmse * to_m);
            rep.waveforms[w].misses.push_back(misses);
        }
    }
    return rep;
}

}  // namespace afdm
