// fft.hpp - mixed-radix DFT for arbitrary lengths
//
// Recursive Cooley-Tukey over the prime factorisation of n. Prime factors
// are handled with a direct O(p^2) DFT, so any length works (3264 = 2^6*3*17
// costs roughly n*(sum of factors) operations).

#pragma once

#include "afdm/types.hpp"

#include <span>
#include <vector>

namespace afdm {
namespace detail {

inline std::size_t smallest_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t p = 3; p * p <= n; p += 2) {
        if (n % p == 0) return p;
    }
    return n;
}

// twiddle[j] = exp(sign*i*2*pi*j/n_top); a sub-transform of length n uses
// every (n_top/n)-th entry.
inline void fft_recursive(const Complex* in, std::size_t stride, Complex* out,
                          std::size_t n, const std::vector<Complex>& twiddle,
                          std::size_t tw_step) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t n_top = twiddle.size();
    const std::size_t p = smallest_factor(n);
    if (p == n) {
        for (std::size_t k = 0; k < n; ++k) {
            Complex acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                acc += in[j * stride] * twiddle[((j * k) % n) * tw_step % n_top];
            }
            out[k] = acc;
        }
        return;
    }
    const std::size_t m = n / p;
    for (std::size_t r = 0; r < p; ++r) {
        fft_recursive(in + r * stride, stride * p, out + r * m, m, twiddle, tw_step * p);
    }
    std::vector<Complex> tmp(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        const std::size_t km = k % m;
        for (std::size_t r = 0; r < p; ++r) {
            acc += out[r * m + km] * twiddle[((r * k) % n) * tw_step];
        }
        tmp[k] = acc;
    }
    std::copy(tmp.begin(), tmp.end(), out);
}

inline std::vector<Complex> dft_impl(std::span<const Complex> x, int sign, double scale) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    if (n == 0) return out;
    std::vector<Complex> twiddle(n);
    for (std::size_t j = 0; j < n; ++j) {
        twiddle[j] = std::polar(1.0, sign * kTwoPi * static_cast<double>(j) / static_cast<double>(n));
    }
    fft_recursive(x.data(), 1, out.data(), n, twiddle, 1);
    if (scale != 1.0) {
        for (auto& v : out) v *= scale;
    }
    return out;
}

}  // namespace detail

/// Unitary forward DFT: X[k] = (1/sqrt(n)) sum_j x[j] exp(-i2pi jk/n).
inline std::vector<Complex> unitary_dft(std::span<const Complex> x) {
    return detail::dft_impl(x, -1, 1.0 / std::sqrt(static_cast<double>(x.size())));
}

/// Unitary inverse DFT.
inline std::vector<Complex> unitary_idft(std::span<const Complex> X) {
    return detail::dft_impl(X, +1, 1.0 / std::sqrt(static_cast<double>(X.size())));
}

/// Unnormalised forward DFT.
inline std::vector<Complex> dft(std::span<const Complex> x) {
    return detail::dft_impl(x, -1, 1.0);
}

/// Inverse DFT with the conventional 1/n scaling.
inline std::vector<Complex> idft(std::span<const Complex> X) {
    return detail::dft_impl(X, +1, 1.0 / static_cast<double>(X.size()));
}

}  // namespace afdm
