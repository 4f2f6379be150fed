// bistatic_rx.hpp - purely digital sub-Nyquist AFDM receiver
//
// Keeping every O-th sample of an N-sample chirp phi_m gives an (N/O)-sample
// chirp with rates (O^2 c1, c2) at frequency m mod N/O. The receiver therefore
// runs an N/O-point DAFT with (O^2 c1, c2) on the downsampled pilot frame.
//
// With s = 2N c1, a path (l, q) moves the pilot from bin p to p + q - s l
// (mod N/O): one delay tap is still |s| bins, so full-rate delay resolution
// survives; the price is an unambiguous range of 2N|c1| (l_max + 1) < N/O.

#pragma once

#include "afdm/daft.hpp"
#include "afdm/frame.hpp"
#include "afdm/signature.hpp"
#include "afdm/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace afdm {

struct SubNyquistConfig {
    std::size_t O = 1;
    DaftParams base;
    std::size_t phase_offset = 0;
    std::int64_t l_max = 0;

    std::size_t reduced_length() const { return base.N / O; }

    /// N' = N/O, c1' = O^2 c1, c2' = c2.
    DaftParams derived() const {
        const double o = static_cast<double>(O);
        return DaftParams{base.N / O, o * o * base.c1, base.c2};
    }
};

inline ComplexSignal downsample(const ComplexSignal& x, std::size_t O, std::size_t offset = 0) {
    if (O == 0 || x.size() % O != 0) {
        throw std::invalid_argument("downsample: O = " + std::to_string(O) + " does not divide length " +
                                    std::to_string(x.size()));
    }
    if (offset >= O) throw std::invalid_argument("downsample: offset must be < O");
    std::vector<Complex> out(x.size() / O);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[O * k + offset];
    return ComplexSignal{std::move(out), x.sample_rate() / static_cast<double>(O)};
}

/// Largest l with 2N|c1| (l + 1) < N/O, or nullopt when no delay qualifies.
inline std::optional<std::int64_t> max_unambiguous_delay(const SubNyquistConfig& cfg) {
    const double k = cfg.base.shift_per_delay();
    if (cfg.O == 0 || cfg.base.N % cfg.O != 0) return std::nullopt;
    const auto L = static_cast<double>(cfg.base.N / cfg.O);
    if (k <= 0.0) return std::nullopt;
    const auto k_int = cfg.base.integral_shift_per_delay();
    std::int64_t l;
    if (k_int) {
        // (l + 1) * k < L  <=>  l + 1 <= (L - 1) / k  (integers)
        l = (static_cast<std::int64_t>(L) - 1) / *k_int - 1;
    } else {
        l = static_cast<std::int64_t>(std::ceil(L / k)) - 2;
    }
    if (l < 0) return std::nullopt;
    return l;
}

/// Throws ConfigError naming the violated rule.
inline void validate(const SubNyquistConfig& cfg) {
    if (cfg.O == 0 || cfg.base.N % cfg.O != 0) {
        throw ConfigError("O must divide N (O = " + std::to_string(cfg.O) + ", N = " + std::to_string(cfg.base.N) +
                          ")");
    }
    if (cfg.phase_offset >= cfg.O) throw ConfigError("phase_offset must be < O");
    const auto k = cfg.base.integral_shift_per_delay();
    if (!k || *k < 1) {
        throw ConfigError("sub-Nyquist detection needs 2N|c1| to be a positive integer (got " +
                          std::to_string(cfg.base.shift_per_delay()) + ")");
    }
    const auto L = static_cast<std::int64_t>(cfg.reduced_length());
    if (*k * (cfg.l_max + 1) >= L) {
        throw ConfigError("unambiguous-delay constraint 2N|c1|(l_max+1) < N/O violated: " + std::to_string(*k) +
                          " * (" + std::to_string(cfg.l_max) + " + 1) >= " + std::to_string(L));
    }
}

inline std::vector<PilotEntry> pilot_entries(const AfdmFrame& frame) {
    std::vector<PilotEntry> out;
    const auto& spec = frame.spec;
    for (std::size_t j = 0; j < spec.M(); ++j) {
        const auto idx = (spec.pilot_start + j) % spec.params.N;
        out.push_back({static_cast<std::int64_t>(idx), frame.daft_symbols[idx]});
    }
    return out;
}

/// Bin -> path attribution used by subnyquist_profile.
inline PathHypothesis subnyquist_hypothesis(const SubNyquistConfig& cfg, std::size_t pilot_start, std::size_t bin) {
    const auto L = static_cast<std::int64_t>(cfg.reduced_length());
    const auto s = static_cast<std::int64_t>(std::llround(2.0 * static_cast<double>(cfg.base.N) * cfg.base.c1));
    const auto base_bin = static_cast<std::int64_t>(pilot_start) + s * static_cast<std::int64_t>(cfg.phase_offset);
    return decompose_offset(static_cast<std::int64_t>(bin) - base_bin, L,
                            cfg.base.integral_shift_per_delay().value_or(0), cfg.base.delay_direction());
}

/// y_down = DAFT_{N/O, (O^2 c1, c2)}(downsample(r, O, offset)).
inline DaftSpectrum subnyquist_spectrum(const ComplexSignal& r, const SubNyquistConfig& cfg) {
    return daft(downsample(r, cfg.O, cfg.phase_offset), cfg.derived());
}

/// Magnitude profile over the N/O detection bins of a pilot-only frame.
/// For M = 1 this is |y_down[b]|; for M > 1 each bin is the matched-filter
/// output against the pilot's response to that bin's path hypothesis (the
/// two coincide when M = 1). `bandwidth_hz` converts taps to seconds.
inline DelayProfile subnyquist_profile(const ComplexSignal& r, const SubNyquistConfig& cfg, const AfdmFrame& frame,
                                       double bandwidth_hz = 1.0) {
    validate(cfg);
    if (!frame.spec.data_indices.empty()) {
        throw std::invalid_argument("subnyquist_profile: expects a pilot-only frame");
    }
    if (frame.spec.params != cfg.base) throw std::invalid_argument("subnyquist_profile: frame/config DAFT mismatch");
    const auto y = subnyquist_spectrum(r, cfg);
    const auto pilot = pilot_entries(frame);
    const std::size_t L = cfg.reduced_length();
    DelayProfile prof;
    prof.magnitude.resize(L);
    prof.delay_s.resize(L);
    prof.blind.assign(L, false);
    for (std::size_t b = 0; b < L; ++b) {
        const auto h = subnyquist_hypothesis(cfg, frame.spec.pilot_start, b);
        if (pilot.size() == 1) {
            prof.magnitude[b] = std::abs(y[b]);
        } else {
            const auto sig = subnyquist_signature(pilot, cfg.base, cfg.O, static_cast<std::int64_t>(cfg.phase_offset), h);
            prof.magnitude[b] = matched_output(sig, y.coefficients);
        }
        prof.delay_s[b] = static_cast<double>(h.delay) / bandwidth_hz;
    }
    return prof;
}

}  // namespace afdm
