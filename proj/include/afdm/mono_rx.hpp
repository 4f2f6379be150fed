// mono_rx.hpp - monostatic receiver: dechirp, DC-block SIC, composite-band
// filtering, decimation and beat-frequency profiling
//
// The analog front end is modelled by its ideal digital equivalent at the
// full rate BW, followed by keeping every D-th sample:
//
//   rx --dechirp(ref)--> SIC (zero blind bins) --> brick-wall keep of the
//   two retained intervals --> decimate by D --> amplitude spectrum
//
// Dechirping against the first pilot chirp p turns a path (l, q) into tones
// at bins j + q - 2N c1 l (j = 0..M-1). The self-interference copy (l = q = 0)
// therefore lands on bins 0..M-1 and is removed by blanking them; for M = 1
// that is plain DC blocking.
//
// Spectra here are amplitude-normalised, B[b] = (1/L) sum_n x[n] e^{-i2pi bn/L},
// so a tone of amplitude A reads A at any decimation.

#pragma once

#include "afdm/daft.hpp"
#include "afdm/fft.hpp"
#include "afdm/frame.hpp"
#include "afdm/signature.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace afdm {

/// Inclusive interval of signed beat bins, e.g. [-3, -1].
struct BinInterval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

struct DechirpConfig {
    ComplexSignal reference;
    std::size_t decimation = 1;
    std::size_t dc_block_halfwidth_bins = 0;
    std::vector<BinInterval> passband;      // empty = all-pass
    std::vector<PilotEntry> pilot;          // boosted pilot symbols; front() is the reference chirp
    std::int64_t negative_span = 0;         // bins read as negative Doppler (red region)
};

struct BeatProfile {
    std::vector<double> magnitudes;
    std::vector<std::int64_t> delay_samples;
    std::vector<std::int64_t> doppler_bins;
    std::vector<std::size_t> blind_bins;

    DelayProfile to_delay_profile(double bandwidth_hz = 1.0) const {
        DelayProfile p;
        p.magnitude = magnitudes;
        p.delay_s.resize(magnitudes.size());
        for (std::size_t i = 0; i < magnitudes.size(); ++i) {
            p.delay_s[i] = static_cast<double>(delay_samples[i]) / bandwidth_hz;
        }
        p.blind.assign(magnitudes.size(), false);
        for (auto b : blind_bins) p.blind[b] = true;
        return p;
    }
};

inline ComplexSignal dechirp(const ComplexSignal& rx, const ComplexSignal& reference) {
    if (rx.size() != reference.size()) {
        throw std::invalid_argument("dechirp: length mismatch (" + std::to_string(rx.size()) + " vs " +
                                    std::to_string(reference.size()) + ")");
    }
    std::vector<Complex> out(rx.size());
    for (std::size_t n = 0; n < rx.size(); ++n) out[n] = rx[n] * std::conj(reference[n]);
    return ComplexSignal{std::move(out), rx.sample_rate()};
}

/// Zeroes the listed DFT bins (taken mod length) and transforms back.
inline ComplexSignal sic_block(const ComplexSignal& x, std::span<const std::size_t> bins) {
    auto X = dft(x.samples());
    for (auto b : bins) X[b % X.size()] = Complex{0.0, 0.0};
    return ComplexSignal{idft(X), x.sample_rate()};
}

/// Zeroes DFT bins [-halfwidth, +halfwidth] mod N.
inline ComplexSignal sic_dc_block(const ComplexSignal& x, std::size_t halfwidth_bins) {
    const auto N = static_cast<std::int64_t>(x.size());
    std::vector<std::size_t> bins;
    const auto h = std::min<std::int64_t>(static_cast<std::int64_t>(halfwidth_bins), N / 2);
    for (std::int64_t b = -h; b <= h; ++b) bins.push_back(static_cast<std::size_t>(mod_floor(b, N)));
    return sic_block(x, bins);
}

/// Beat bins occupied by the self-interference of an M-chirp pilot dechirped
/// against its first chirp, widened by the DC-block half-width:
/// signed bins [-halfwidth, M - 1 + halfwidth] mod N.
inline std::vector<std::size_t> blind_region(const DaftParams& params, std::size_t M, std::size_t dc_halfwidth) {
    if (M < 1) throw std::invalid_argument("blind_region: M must be >= 1");
    const auto N = static_cast<std::int64_t>(params.N);
    std::set<std::size_t> bins;
    const auto h = static_cast<std::int64_t>(dc_halfwidth);
    for (std::int64_t b = -h; b <= static_cast<std::int64_t>(M) - 1 + h; ++b) {
        bins.insert(static_cast<std::size_t>(mod_floor(b, N)));
    }
    return {bins.begin(), bins.end()};
}

/// Signed beat-bin intervals that can hold echoes of paths with
/// 0 <= l <= l_max, |q| <= q_max, split at zero into the negative (red) and
/// non-negative (blue) parts. Empty parts are omitted.
inline std::vector<BinInterval> composite_passband(const DaftParams& params, std::int64_t l_max, std::int64_t q_max,
                                                   std::size_t M = 1) {
    const auto k = params.integral_shift_per_delay();
    if (!k) throw ConfigError("composite_passband: 2N|c1| must be an integer");
    const auto span = *k * l_max;
    std::int64_t lo = -q_max;
    std::int64_t hi = static_cast<std::int64_t>(M) - 1 + q_max;
    if (params.delay_direction() > 0) {
        hi += span;
    } else {
        lo -= span;
    }
    std::vector<BinInterval> out;
    if (lo < 0) out.push_back({lo, -1});
    if (hi >= 0) out.push_back({0, hi});
    return out;
}

namespace detail {

inline std::vector<bool> passband_mask(std::size_t N, const std::vector<BinInterval>& passband) {
    std::vector<bool> keep(N, passband.empty());
    const auto n = static_cast<std::int64_t>(N);
    for (const auto& iv : passband) {
        if (iv.hi < iv.lo) throw std::invalid_argument("passband interval with hi < lo");
        if (iv.hi - iv.lo + 1 > n) throw ConfigError("passband interval wider than the frame");
        for (auto b = iv.lo; b <= iv.hi; ++b) keep[static_cast<std::size_t>(mod_floor(b, n))] = true;
    }
    return keep;
}

inline std::vector<double> amplitude_spectrum(const ComplexSignal& x) {
    const auto X = dft(x.samples());
    std::vector<double> out(X.size());
    const double inv = 1.0 / static_cast<double>(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = std::abs(X[i]) * inv;
    return out;
}

}  // namespace detail

inline ComplexSignal composite_band_filter_and_decimate(const ComplexSignal& x, const DechirpConfig& cfg) {
    const std::size_t N = x.size();
    const std::size_t D = cfg.decimation;
    if (D == 0 || N % D != 0) {
        throw std::invalid_argument("composite_band_filter_and_decimate: decimation " + std::to_string(D) +
                                    " does not divide " + std::to_string(N));
    }
    const auto keep = detail::passband_mask(N, cfg.passband);
    const std::size_t L = N / D;
    if (D > 1) {
        std::vector<int> fold(L, 0);
        for (std::size_t b = 0; b < N; ++b) {
            if (keep[b] && ++fold[b % L] > 1) {
                throw ConfigError("configured support exceeds post-decimation bandwidth: bin " + std::to_string(b) +
                                  " folds onto an occupied bin at N/D = " + std::to_string(L));
            }
        }
    }
    auto X = dft(x.samples());
    for (std::size_t b = 0; b < N; ++b) {
        if (!keep[b]) X[b] = Complex{0.0, 0.0};
    }
    const auto filtered = idft(X);
    std::vector<Complex> out(L);
    for (std::size_t j = 0; j < L; ++j) out[j] = filtered[j * D];
    return ComplexSignal{std::move(out), x.sample_rate() / static_cast<double>(D)};
}

/// Bin -> path attribution used by beat_profile.
inline PathHypothesis beat_hypothesis(const DaftParams& params, std::size_t L, std::size_t bin,
                                      std::int64_t negative_span) {
    return decompose_offset(static_cast<std::int64_t>(bin), static_cast<std::int64_t>(L),
                            params.integral_shift_per_delay().value_or(0), params.delay_direction(), negative_span);
}

inline BeatProfile beat_profile(const ComplexSignal& x_decimated, const DechirpConfig& cfg, const DaftParams& params) {
    const std::size_t L = x_decimated.size();
    if (L * cfg.decimation != params.N) throw std::invalid_argument("beat_profile: length != N / D");
    BeatProfile out;
    out.magnitudes.resize(L);
    out.delay_samples.resize(L);
    out.doppler_bins.resize(L);
    const auto B = detail::amplitude_spectrum(x_decimated);
    std::vector<Complex> Bc;
    if (cfg.pilot.size() > 1) {
        Bc = dft(x_decimated.samples());
        for (auto& v : Bc) v /= static_cast<double>(L);
    }
    for (std::size_t b = 0; b < L; ++b) {
        const auto h = beat_hypothesis(params, L, b, cfg.negative_span);
        out.delay_samples[b] = h.delay;
        out.doppler_bins[b] = h.doppler;
        if (cfg.pilot.size() > 1) {
            out.magnitudes[b] = matched_output(dechirp_signature(cfg.pilot, params, cfg.decimation, h), Bc);
        } else {
            out.magnitudes[b] = B[b];
        }
    }
    std::set<std::size_t> blind;
    for (auto b : blind_region(params, std::max<std::size_t>(cfg.pilot.size(), 1), cfg.dc_block_halfwidth_bins)) {
        blind.insert(b % L);
    }
    out.blind_bins.assign(blind.begin(), blind.end());
    return out;
}

/// Reference replica: the time signal of the first pilot chirp alone.
inline ComplexSignal pilot_reference(const AfdmFrame& frame) {
    std::vector<Complex> x(frame.spec.params.N, Complex{0.0, 0.0});
    const auto p = frame.spec.pilot_start;
    x[p] = frame.daft_symbols[p];
    return idaft(DaftSpectrum{std::move(x), frame.spec.params}, frame.time_signal.sample_rate());
}

inline DechirpConfig make_dechirp_config(const AfdmFrame& frame, std::size_t decimation, std::size_t dc_halfwidth,
                                         std::int64_t l_max, std::int64_t q_max) {
    DechirpConfig cfg{pilot_reference(frame), decimation, dc_halfwidth, {}, {}, 0};
    cfg.passband = composite_passband(frame.spec.params, l_max, q_max, frame.spec.M());
    for (std::size_t j = 0; j < frame.spec.M(); ++j) {
        const auto idx = (frame.spec.pilot_start + j) % frame.spec.params.N;
        cfg.pilot.push_back({static_cast<std::int64_t>(idx), frame.daft_symbols[idx]});
    }
    for (const auto& iv : cfg.passband) {
        if (iv.lo < 0) cfg.negative_span = -iv.lo;
    }
    return cfg;
}

/// Expected matched output of a unit-gain echo outside the blind region.
inline double full_echo_amplitude(const DechirpConfig& cfg, const DaftParams& params) {
    return norm(dechirp_signature(cfg.pilot, params, cfg.decimation, PathHypothesis{}));
}

/// Output of every stage of the monostatic chain.
struct MonostaticStages {
    ComplexSignal dechirped;
    ComplexSignal after_sic;
    ComplexSignal decimated;
    BeatProfile profile;
};

inline MonostaticStages run_monostatic_chain(const ComplexSignal& rx, const DechirpConfig& cfg,
                                             const DaftParams& params) {
    auto d = dechirp(rx, cfg.reference);
    const auto blind = blind_region(params, std::max<std::size_t>(cfg.pilot.size(), 1), cfg.dc_block_halfwidth_bins);
    auto s = sic_block(d, blind);
    auto dec = composite_band_filter_and_decimate(s, cfg);
    auto prof = beat_profile(dec, cfg, params);
    return MonostaticStages{std::move(d), std::move(s), std::move(dec), std::move(prof)};
}

}  // namespace afdm
