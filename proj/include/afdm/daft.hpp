// daft.hpp - Discrete Affine Fourier Transform
//
// Chirp basis:  phi_m[n] = exp(i2pi(c1 n^2 + c2 m^2 + m n / N))
//
//   IDAFT: X[n] = (1/sqrt(N)) sum_m x_m phi_m[n]
//   DAFT:  y[m] = conj-chirp(c2) . DFT_unitary( conj-chirp(c1) . X )
//
// Both directions carry 1/sqrt(N), so the pair is unitary. Setting
// c1 = c2 = 0 recovers the unitary DFT. N may be any length >= 2.

#pragma once

#include "afdm/fft.hpp"
#include "afdm/types.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace afdm {

/// Transform size and chirp rates; the identity of an AFDM waveform.
struct DaftParams {
    std::size_t N = 0;
    double c1 = 0.0;  // time-domain chirp rate, per sample^2
    double c2 = 0.0;  // frequency-domain chirp rate

    DaftParams() = default;
    DaftParams(std::size_t n, double c1_, double c2_) : N(n), c1(c1_), c2(c2_) {
        if (N < 2) throw std::invalid_argument("DaftParams: N must be >= 2");
    }

    /// c1 = c2 = -1/(2N).
    static DaftParams paper_default(std::size_t n) {
        const double c = -1.0 / (2.0 * static_cast<double>(n));
        return DaftParams{n, c, c};
    }

    /// DAFT-domain index shift per sample of delay, 2N|c1|.
    double shift_per_delay() const { return 2.0 * static_cast<double>(N) * std::abs(c1); }

    /// 2N|c1| when it is (numerically) a non-negative integer.
    std::optional<std::int64_t> integral_shift_per_delay() const {
        const double k = shift_per_delay();
        const double r = std::round(k);
        if (std::abs(k - r) > 1e-9) return std::nullopt;
        return static_cast<std::int64_t>(r);
    }

    /// +1 when delays move DAFT-domain energy towards higher indices (c1 < 0).
    int delay_direction() const { return c1 < 0.0 ? +1 : -1; }

    bool operator==(const DaftParams&) const = default;
};

/// DAFT-domain coefficients tied to the parameters that produced them.
struct DaftSpectrum {
    std::vector<Complex> coefficients;
    DaftParams params;

    DaftSpectrum(std::vector<Complex> coeffs, DaftParams p)
        : coefficients(std::move(coeffs)), params(p) {
        if (coefficients.size() != params.N) {
            throw std::invalid_argument("DaftSpectrum: length " + std::to_string(coefficients.size()) +
                                        " != N " + std::to_string(params.N));
        }
    }

    std::size_t size() const { return coefficients.size(); }
    Complex operator[](std::size_t m) const { return coefficients[m]; }
};

/// Chirp basis evaluated at any integer time index, including negative ones
/// and n >= N. This is the chirp-periodic extension the prefix reproduces.
inline Complex chirp_value(const DaftParams& p, double m, double n) {
    const double N = static_cast<double>(p.N);
    return cis_turns(p.c1 * n * n + p.c2 * m * m + m * n / N);
}

inline ComplexSignal chirp_basis(const DaftParams& params, std::int64_t m, double sample_rate = 1.0) {
    if (m < 0 || m >= static_cast<std::int64_t>(params.N)) {
        throw std::out_of_range("chirp_basis: index " + std::to_string(m) + " outside [0, N)");
    }
    std::vector<Complex> out(params.N);
    for (std::size_t n = 0; n < params.N; ++n) {
        out[n] = chirp_value(params, static_cast<double>(m), static_cast<double>(n));
    }
    return ComplexSignal{std::move(out), sample_rate};
}

namespace detail {

inline std::vector<Complex> quadratic_chirp(std::size_t n, double rate, int sign) {
    std::vector<Complex> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(i);
        c[i] = cis_turns(sign * rate * d * d);
    }
    return c;
}

}  // namespace detail

inline ComplexSignal idaft(const DaftSpectrum& spectrum, double sample_rate = 1.0) {
    const auto& p = spectrum.params;
    const auto c2 = detail::quadratic_chirp(p.N, p.c2, +1);
    std::vector<Complex> buf(p.N);
    for (std::size_t m = 0; m < p.N; ++m) buf[m] = spectrum.coefficients[m] * c2[m];
    auto time = unitary_idft(buf);
    const auto c1 = detail::quadratic_chirp(p.N, p.c1, +1);
    for (std::size_t n = 0; n < p.N; ++n) time[n] *= c1[n];
    return ComplexSignal{std::move(time), sample_rate};
}

inline DaftSpectrum daft(std::span<const Complex> signal, const DaftParams& params) {
    if (signal.size() != params.N) {
        throw std::invalid_argument("daft: signal length " + std::to_string(signal.size()) +
                                    " != N " + std::to_string(params.N));
    }
    const auto c1 = detail::quadratic_chirp(params.N, params.c1, -1);
    std::vector<Complex> buf(params.N);
    for (std::size_t n = 0; n < params.N; ++n) buf[n] = signal[n] * c1[n];
    auto spec = unitary_dft(buf);
    const auto c2 = detail::quadratic_chirp(params.N, params.c2, -1);
    for (std::size_t m = 0; m < params.N; ++m) spec[m] *= c2[m];
    return DaftSpectrum{std::move(spec), params};
}

inline DaftSpectrum daft(const ComplexSignal& signal, const DaftParams& params) {
    return daft(signal.samples(), params);
}

}  // namespace afdm
