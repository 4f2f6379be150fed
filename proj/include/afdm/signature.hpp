// signature.hpp - bin maps and noiseless detection signatures
//
// Both receivers detect against the exact noiseless response of the known
// pilot to a single unit-gain path (l, q). The responses are sparse: every
// pilot chirp lands in exactly one detection bin.
//
// Let s = 2N c1 (an integer here), x~_m the transmitted (boosted) pilot
// symbols, and L the detection length.
//
// Sub-Nyquist DAFT receiver, L = N/O, keeping samples O k + o:
//     bin(m)   = m + q + s (o - l)                        (mod L)
//     value(m) = x~_m / sqrt(O) * exp(i2pi(c1 u^2 + c2 m^2 + m u / N + q o / N - c2 bin^2)),
//                u = o - l
//   O = 1, o = 0 is the ordinary N-point DAFT receiver.
//
// Dechirp receiver (reference = first pilot chirp p), L = N/D:
//     bin(m)   = m - p + q - s l                          (mod L)
//     value(m) = x~_m conj(x~_p) / N * exp(i2pi(c1 l^2 + c2 (m^2 - p^2) - m l / N))
//
// Tests check both against explicit time-domain simulation.

#pragma once

#include "afdm/daft.hpp"
#include "afdm/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace afdm {

struct SignatureEntry {
    std::size_t bin;
    Complex value;
};

using Signature = std::vector<SignatureEntry>;

/// A (delay, Doppler) pair a detection bin is attributed to.
struct PathHypothesis {
    std::int64_t delay = 0;
    std::int64_t doppler = 0;
};

/// Attributes a bin offset (relative to the unshifted pilot position) to a
/// path. Offsets in the top `negative_span` bins are read as negative
/// Doppler at zero delay; otherwise the offset is split into whole delay
/// taps of 2N|c1| bins plus a non-negative Doppler remainder.
inline PathHypothesis decompose_offset(std::int64_t offset, std::int64_t L, std::int64_t shift_per_delay,
                                       int delay_direction, std::int64_t negative_span = 0) {
    const std::int64_t pos = mod_floor(offset, L);
    // Position measured along the direction delays move.
    const std::int64_t along = delay_direction > 0 ? pos : mod_floor(-pos, L);
    if (negative_span > 0 && along >= L - negative_span) {
        return PathHypothesis{0, delay_direction * (along - L)};
    }
    if (shift_per_delay <= 0) return PathHypothesis{0, delay_direction * along};
    return PathHypothesis{along / shift_per_delay, delay_direction * (along % shift_per_delay)};
}

/// Merges entries that fold onto the same bin.
inline Signature merge_bins(Signature s) {
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.bin < b.bin; });
    Signature out;
    for (const auto& e : s) {
        if (!out.empty() && out.back().bin == e.bin) {
            out.back().value += e.value;
        } else {
            out.push_back(e);
        }
    }
    return out;
}

inline double norm(const Signature& s) {
    double e = 0.0;
    for (const auto& v : s) e += std::norm(v.value);
    return std::sqrt(e);
}

/// |<signature, y>| / ||signature||; the matched-filter output for one hypothesis.
inline double matched_output(const Signature& s, std::span<const Complex> y) {
    Complex acc{0.0, 0.0};
    for (const auto& e : s) acc += std::conj(e.value) * y[e.bin];
    const double n = norm(s);
    return n > 0.0 ? std::abs(acc) / n : 0.0;
}

/// Pilot entries (index, boosted symbol) of a DAFT-domain pilot block.
struct PilotEntry {
    std::int64_t index;
    Complex symbol;
};

inline Signature subnyquist_signature(std::span<const PilotEntry> pilot, const DaftParams& base, std::size_t O,
                                      std::int64_t offset, PathHypothesis h) {
    const auto N = static_cast<std::int64_t>(base.N);
    const auto L = N / static_cast<std::int64_t>(O);
    const auto s = static_cast<std::int64_t>(std::llround(2.0 * static_cast<double>(N) * base.c1));
    const double Nd = static_cast<double>(N);
    const double u = static_cast<double>(offset - h.delay);
    const double q = static_cast<double>(h.doppler);
    const double gain = 1.0 / std::sqrt(static_cast<double>(O));
    Signature sig;
    sig.reserve(pilot.size());
    for (const auto& p : pilot) {
        const auto bin = mod_floor(p.index + h.doppler + s * (offset - h.delay), L);
        const double m = static_cast<double>(p.index);
        const double b = static_cast<double>(bin);
        const double turns = base.c1 * u * u + base.c2 * m * m + m * u / Nd + q * static_cast<double>(offset) / Nd -
                             base.c2 * b * b;
        sig.push_back({static_cast<std::size_t>(bin), gain * p.symbol * cis_turns(turns)});
    }
    return merge_bins(std::move(sig));
}

inline Signature dechirp_signature(std::span<const PilotEntry> pilot, const DaftParams& base, std::size_t D,
                                   PathHypothesis h) {
    const auto N = static_cast<std::int64_t>(base.N);
    const auto L = N / static_cast<std::int64_t>(D);
    const auto s = static_cast<std::int64_t>(std::llround(2.0 * static_cast<double>(N) * base.c1));
    const double Nd = static_cast<double>(N);
    const auto& ref = pilot.front();
    const double p = static_cast<double>(ref.index);
    const double l = static_cast<double>(h.delay);
    Signature sig;
    sig.reserve(pilot.size());
    for (const auto& e : pilot) {
        const auto bin = mod_floor(e.index - ref.index + h.doppler - s * h.delay, L);
        const double m = static_cast<double>(e.index);
        const double turns = base.c1 * l * l + base.c2 * (m * m - p * p) - m * l / Nd;
        sig.push_back({static_cast<std::size_t>(bin), e.symbol * std::conj(ref.symbol) / Nd * cis_turns(turns)});
    }
    return merge_bins(std::move(sig));
}

}  // namespace afdm
