// types.hpp - shared value types for the AFDM ISAC toolkit
//
// Everything in this library is header-only. Signals are double-precision
// complex baseband sequences; all transforms are unitary.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace afdm {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Thrown when a configuration or cross-module constraint is violated.
/// The message names the violated rule.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// exp(i*2*pi*turns), reducing the argument to [0, 1) first so that large
/// quadratic phases keep their fractional precision.
inline Complex cis_turns(double turns) {
    const double frac = turns - std::floor(turns);
    return std::polar(1.0, kTwoPi * frac);
}

/// Non-negative remainder.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
    const std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

/// Uniformly sampled complex baseband sequence tagged with its sample rate.
class ComplexSignal {
public:
    ComplexSignal(std::vector<Complex> samples, double sample_rate)
        : samples_(std::move(samples)), sample_rate_(sample_rate) {
        if (samples_.empty()) {
            throw std::invalid_argument("ComplexSignal: length must be >= 1");
        }
        if (!(sample_rate_ > 0.0)) {
            throw std::invalid_argument("ComplexSignal: sample_rate must be > 0");
        }
    }

    std::size_t size() const { return samples_.size(); }
    double sample_rate() const { return sample_rate_; }

    Complex operator[](std::size_t n) const { return samples_[n]; }
    Complex& operator[](std::size_t n) { return samples_[n]; }

    std::span<const Complex> samples() const { return samples_; }
    std::span<Complex> samples() { return samples_; }
    const std::vector<Complex>& vec() const { return samples_; }

    double energy() const {
        double e = 0.0;
        for (const auto& s : samples_) e += std::norm(s);
        return e;
    }

private:
    std::vector<Complex> samples_;
    double sample_rate_;
};

inline double energy(std::span<const Complex> x) {
    double e = 0.0;
    for (const auto& s : x) e += std::norm(s);
    return e;
}

/// Magnitude profile over a detection domain with an explicit per-bin
/// delay map. Bins flagged `blind` are unusable for detection.
struct DelayProfile {
    std::vector<double> magnitude;
    std::vector<double> delay_s;
    std::vector<bool> blind;

    std::size_t size() const { return magnitude.size(); }
};

}  // namespace afdm
