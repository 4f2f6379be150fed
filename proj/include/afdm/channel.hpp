// channel.hpp - doubly-dispersive channel with AWGN and self-interference
//
//   r[n] = sum_p g_p exp(i2pi q_p n / N) x[n - l_p]  +  SI  +  w[n]
//
// n counts from the first post-prefix sample, delays are integer samples and
// Dopplers integer cycles per N-sample frame. w is circular complex Gaussian
// with the configured per-sample variance.

#pragma once

#include "afdm/frame.hpp"
#include "afdm/types.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace afdm {

struct Path {
    std::int64_t delay_samples = 0;
    std::int64_t doppler_bins = 0;
    Complex gain{1.0, 0.0};
};

struct ChannelRealization {
    std::vector<Path> paths;
    std::optional<Path> si_path;
    double noise_variance = 0.0;

    bool trivial() const { return paths.empty() && !si_path; }
};

/// Direct-leakage path at l = 0, q = 0 with `power_db` relative to unit gain.
inline Path self_interference_path(double power_db = 60.0) {
    return Path{0, 0, Complex{std::pow(10.0, power_db / 20.0), 0.0}};
}

inline double snr_to_noise_variance(double signal_power, double snr_db) {
    if (!(signal_power > 0.0)) throw std::invalid_argument("snr_to_noise_variance: signal_power must be > 0");
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

namespace detail {

inline void add_path(std::vector<Complex>& out, std::span<const Complex> x, std::size_t prefix_len,
                     std::size_t frame_len, const Path& p) {
    const auto l = static_cast<std::size_t>(p.delay_samples);
    const double N = static_cast<double>(frame_len);
    for (std::size_t n = l; n < x.size(); ++n) {
        const double t = static_cast<double>(n) - static_cast<double>(prefix_len);
        out[n] += p.gain * cis_turns(static_cast<double>(p.doppler_bins) * t / N) * x[n - l];
    }
}

}  // namespace detail

/// Noise-free echo paths only; the linear part of apply_channel.
inline PrefixedSignal apply_paths(const PrefixedSignal& x, std::span<const Path> paths) {
    std::vector<Complex> out(x.signal.size(), Complex{0.0, 0.0});
    for (const auto& p : paths) {
        if (p.delay_samples < 0) throw std::invalid_argument("apply_channel: negative delay");
        if (static_cast<std::size_t>(p.delay_samples) > x.prefix_len) {
            throw std::invalid_argument("apply_channel: delay " + std::to_string(p.delay_samples) +
                                        " exceeds prefix length " + std::to_string(x.prefix_len));
        }
        detail::add_path(out, x.signal.samples(), x.prefix_len, x.frame_len, p);
    }
    return PrefixedSignal{ComplexSignal{std::move(out), x.signal.sample_rate()}, x.prefix_len, x.frame_len};
}

/// Circular complex Gaussian noise, deterministic in `seed`.
inline std::vector<Complex> complex_awgn(std::size_t count, double variance, std::uint64_t seed) {
    std::vector<Complex> w(count, Complex{0.0, 0.0});
    if (variance <= 0.0) return w;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    for (auto& s : w) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s = Complex{re, im};
    }
    return w;
}

inline PrefixedSignal apply_channel(const PrefixedSignal& x, const ChannelRealization& ch, std::uint64_t seed) {
    std::vector<Path> all = ch.paths;
    if (ch.si_path) all.push_back(*ch.si_path);
    auto r = apply_paths(x, all);
    if (ch.noise_variance > 0.0) {
        const auto w = complex_awgn(r.signal.size(), ch.noise_variance, seed);
        for (std::size_t n = 0; n < w.size(); ++n) r.signal[n] += w[n];
    }
    return r;
}

}  // namespace afdm
