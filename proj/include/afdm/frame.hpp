// frame.hpp - DAFT-domain frame construction
//
// A frame places an M-symbol pilot block at [pilot_start, pilot_start + M),
// zeroed guards on both sides of it, and data symbols on a disjoint index set.
// All index arithmetic is circular mod N. M = 1 is the single-chirp pilot;
// an empty data set gives the pilot-only (bistatic) frames.
//
// A path with integer delay l and Doppler q moves DAFT index m to
//
//     m + q - 2N c1 l   (mod N)
//
// so with 2N|c1| integer the channel-induced shifts span 2N|c1| l_max + 2 q_max
// indices; that is the guard needed on each side of the pilot to keep data and
// pilot separable at the receiver.

#pragma once

#include "afdm/daft.hpp"
#include "afdm/sequences.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace afdm {

struct FrameSpec {
    DaftParams params;
    std::size_t pilot_start = 0;
    PilotSequence pilot = single_chirp_pilot();
    std::size_t guard_left = 0;
    std::size_t guard_right = 0;
    std::vector<std::size_t> data_indices;
    double pilot_power_boost = 1.0;
    // Channel bounds the guards are designed for.
    std::int64_t l_max = 0;
    std::int64_t q_max = 0;

    std::size_t M() const { return pilot.length(); }
};

struct AfdmFrame {
    FrameSpec spec;
    DaftSpectrum daft_symbols;
    ComplexSignal time_signal;
};

/// Guard indices needed on each side of the pilot: 2N|c1| l_max + 2 q_max.
inline std::int64_t required_guard(const DaftParams& params, std::int64_t l_max, std::int64_t q_max) {
    if (l_max < 0 || q_max < 0) throw std::invalid_argument("required_guard: l_max and q_max must be >= 0");
    const auto k = params.integral_shift_per_delay();
    if (!k) {
        throw ConfigError("required_guard: 2N|c1| = " + std::to_string(params.shift_per_delay()) +
                          " is not an integer");
    }
    return *k * l_max + 2 * q_max;
}

/// Signed DAFT-domain offsets [lo, hi] reachable by paths with 0 <= l <= l_max, |q| <= q_max.
inline std::pair<std::int64_t, std::int64_t> shift_range(const DaftParams& params, std::int64_t l_max,
                                                         std::int64_t q_max) {
    const auto k = params.integral_shift_per_delay().value_or(0);
    if (params.delay_direction() > 0) return {-q_max, k * l_max + q_max};
    return {-(k * l_max + q_max), q_max};
}

namespace detail {

enum class Region : std::uint8_t { empty, pilot, guard, data };

inline std::vector<Region> region_map(const FrameSpec& spec) {
    const std::size_t N = spec.params.N;
    const std::size_t M = spec.M();
    if (M == 0) throw std::invalid_argument("FrameSpec: pilot must have at least one symbol");
    if (spec.pilot_start >= N) throw std::invalid_argument("FrameSpec: pilot_start outside [0, N)");
    if (M + spec.guard_left + spec.guard_right > N) {
        throw std::invalid_argument("FrameSpec: pilot block plus guards exceed N");
    }
    std::vector<Region> map(N, Region::empty);
    for (std::size_t j = 0; j < M; ++j) map[(spec.pilot_start + j) % N] = Region::pilot;
    for (std::size_t j = 1; j <= spec.guard_left; ++j) map[(spec.pilot_start + N - j) % N] = Region::guard;
    for (std::size_t j = 0; j < spec.guard_right; ++j) map[(spec.pilot_start + M + j) % N] = Region::guard;
    for (auto d : spec.data_indices) {
        if (d >= N) throw std::invalid_argument("FrameSpec: data index " + std::to_string(d) + " outside [0, N)");
        if (map[d] != Region::empty) {
            throw std::invalid_argument("FrameSpec: data index " + std::to_string(d) +
                                        " overlaps the pilot, a guard, or another data index");
        }
        map[d] = Region::data;
    }
    return map;
}

}  // namespace detail

/// Checks every FrameSpec invariant; throws with the violated rule.
inline void validate(const FrameSpec& spec) {
    (void)detail::region_map(spec);
    if (!(spec.pilot_power_boost >= 1.0)) throw std::invalid_argument("FrameSpec: pilot_power_boost must be >= 1");
    for (const auto& s : spec.pilot.symbols) {
        if (std::abs(std::abs(s) - 1.0) > 1e-9) throw std::invalid_argument("FrameSpec: pilot symbols must be unit modulus");
    }
    if (!spec.data_indices.empty()) {
        const auto g = required_guard(spec.params, spec.l_max, spec.q_max);
        if (static_cast<std::int64_t>(spec.guard_left) < g || static_cast<std::int64_t>(spec.guard_right) < g) {
            throw ConfigError("FrameSpec: guards (" + std::to_string(spec.guard_left) + ", " +
                              std::to_string(spec.guard_right) + ") below required 2N|c1| l_max + 2 q_max = " +
                              std::to_string(g));
        }
    }
}

/// Every index outside the pilot block and guards.
inline std::vector<std::size_t> free_indices(const FrameSpec& spec) {
    FrameSpec probe = spec;
    probe.data_indices.clear();
    const auto map = detail::region_map(probe);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] == detail::Region::empty) out.push_back(i);
    }
    return out;
}

/// DAFT indices where the pilot can land after any in-bounds channel.
inline std::vector<std::size_t> pilot_observation_window(const FrameSpec& spec) {
    const auto [lo, hi] = shift_range(spec.params, spec.l_max, spec.q_max);
    const auto N = static_cast<std::int64_t>(spec.params.N);
    std::vector<std::size_t> out;
    const auto first = static_cast<std::int64_t>(spec.pilot_start) + lo;
    const auto last = static_cast<std::int64_t>(spec.pilot_start + spec.M()) - 1 + hi;
    for (auto i = first; i <= last && static_cast<std::int64_t>(out.size()) < N; ++i) {
        out.push_back(static_cast<std::size_t>(mod_floor(i, N)));
    }
    return out;
}

/// DAFT-domain pilot symbols only (scaled by sqrt(boost)), zero elsewhere.
inline DaftSpectrum pilot_spectrum(const FrameSpec& spec) {
    std::vector<Complex> x(spec.params.N, Complex{0.0, 0.0});
    const double a = std::sqrt(spec.pilot_power_boost);
    for (std::size_t j = 0; j < spec.M(); ++j) {
        x[(spec.pilot_start + j) % spec.params.N] = a * spec.pilot.symbols[j];
    }
    return DaftSpectrum{std::move(x), spec.params};
}

inline AfdmFrame build_frame(const FrameSpec& spec, std::span<const Complex> data_symbols,
                             double sample_rate = 1.0) {
    validate(spec);
    if (data_symbols.size() != spec.data_indices.size()) {
        throw std::invalid_argument("build_frame: " + std::to_string(data_symbols.size()) + " data symbols for " +
                                    std::to_string(spec.data_indices.size()) + " data indices");
    }
    auto x = pilot_spectrum(spec);
    for (std::size_t i = 0; i < data_symbols.size(); ++i) x.coefficients[spec.data_indices[i]] = data_symbols[i];
    auto time = idaft(x, sample_rate);
    return AfdmFrame{spec, std::move(x), std::move(time)};
}

inline AfdmFrame build_frame(const FrameSpec& spec, double sample_rate = 1.0) {
    return build_frame(spec, std::span<const Complex>{}, sample_rate);
}

/// Unit-energy QPSK symbols drawn from a deterministic bit stream.
template <typename Rng>
std::vector<Complex> random_qpsk(std::size_t count, Rng& rng) {
    std::vector<Complex> out(count);
    const double a = 1.0 / std::sqrt(2.0);
    for (auto& s : out) {
        const auto bits = rng();
        s = Complex{(bits & 1) ? -a : a, (bits & 2) ? -a : a};
    }
    return out;
}

/// A frame with its chirp-periodic prefix prepended.
struct PrefixedSignal {
    ComplexSignal signal;
    std::size_t prefix_len = 0;
    std::size_t frame_len = 0;
};

/// Prepends the chirp-periodic prefix
///     X[n] = X[N + n] exp(-i2pi c1 (N^2 + 2 N n)),  n = -len .. -1
/// so that integer delays up to `len` act circularly on the frame.
inline PrefixedSignal add_chirp_periodic_prefix(const ComplexSignal& x, const DaftParams& params,
                                                std::size_t len) {
    const std::size_t N = params.N;
    if (x.size() != N) throw std::invalid_argument("add_chirp_periodic_prefix: signal length != N");
    if (len > N) throw std::invalid_argument("add_chirp_periodic_prefix: prefix longer than the frame");
    std::vector<Complex> out(len + N);
    const double Nd = static_cast<double>(N);
    for (std::size_t j = 0; j < len; ++j) {
        const double n = -static_cast<double>(len - j);
        out[j] = x[N - (len - j)] * cis_turns(-params.c1 * (Nd * Nd + 2.0 * Nd * n));
    }
    std::copy(x.vec().begin(), x.vec().end(), out.begin() + static_cast<std::ptrdiff_t>(len));
    return PrefixedSignal{ComplexSignal{std::move(out), x.sample_rate()}, len, N};
}

inline ComplexSignal strip_prefix(const PrefixedSignal& x) {
    const auto& v = x.signal.vec();
    std::vector<Complex> out(v.begin() + static_cast<std::ptrdiff_t>(x.prefix_len), v.end());
    return ComplexSignal{std::move(out), x.signal.sample_rate()};
}

}  // namespace afdm
