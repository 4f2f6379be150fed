// sequences.hpp - Gold and Zadoff-Chu pilot sequences
//
// Gold families are built from one fixed preferred pair of m-sequences per
// supported degree. Each m-sequence obeys the linear recurrence of its
// feedback polynomial p(x) = x^k + sum_{i in T} x^i:
//
//     a[n+k] = XOR_{i in T} a[n+i]      with a[0] = 1, a[1..k-1] = 0
//
// Family member `shift` is  g[n] = a[n] XOR b[(n + shift) mod (2^k - 1)].
//
//   degree | polynomial a        | polynomial b
//   -------+---------------------+---------------------------
//      5   | x^5+x^2+1           | x^5+x^4+x^3+x^2+1
//      6   | x^6+x+1             | x^6+x^5+x^2+x+1
//      7   | x^7+x^3+1           | x^7+x^3+x^2+x+1
//     10   | x^10+x^3+1          | x^10+x^8+x^3+x^2+1
//     11   | x^11+x^2+1          | x^11+x^8+x^5+x^2+1
//
// Bits map to BPSK as b -> 1 - 2b.

#pragma once

#include "afdm/types.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace afdm {

struct BinarySequence {
    std::vector<std::uint8_t> bits;

    std::size_t length() const { return bits.size(); }
};

enum class PilotFamily { gold_bpsk, zadoff_chu, single_chirp };

inline const char* to_string(PilotFamily f) {
    switch (f) {
        case PilotFamily::gold_bpsk: return "gold_bpsk";
        case PilotFamily::zadoff_chu: return "zadoff_chu";
        case PilotFamily::single_chirp: return "single_chirp";
    }
    return "?";
}

inline PilotFamily pilot_family_from_string(const std::string& s) {
    if (s == "gold_bpsk") return PilotFamily::gold_bpsk;
    if (s == "zadoff_chu") return PilotFamily::zadoff_chu;
    if (s == "single_chirp") return PilotFamily::single_chirp;
    throw ConfigError("unknown pilot family '" + s + "' (expected gold_bpsk, zadoff_chu or single_chirp)");
}

/// Unit-modulus DAFT-domain pilot symbols. `seed` is the Gold shift or the
/// Zadoff-Chu root, depending on the family.
struct PilotSequence {
    std::vector<Complex> symbols;
    std::int64_t seed = 0;
    PilotFamily family = PilotFamily::single_chirp;

    std::size_t length() const { return symbols.size(); }
};

/// m-sequence from the recurrence described at the top of this file.
/// `taps` lists the exponents i < degree with a non-zero coefficient
/// (including 0 for the constant term).
inline BinarySequence m_sequence(int degree, const std::vector<int>& taps) {
    const std::size_t len = (std::size_t{1} << degree) - 1;
    std::vector<std::uint8_t> a(len + static_cast<std::size_t>(degree), 0);
    a[0] = 1;
    for (std::size_t n = 0; n + static_cast<std::size_t>(degree) < a.size(); ++n) {
        std::uint8_t v = 0;
        for (int t : taps) v ^= a[n + static_cast<std::size_t>(t)];
        a[n + static_cast<std::size_t>(degree)] = v;
    }
    a.resize(len);
    return BinarySequence{std::move(a)};
}

struct PreferredPair {
    std::vector<int> taps_a;
    std::vector<int> taps_b;
};

inline PreferredPair gold_preferred_pair(int degree) {
    switch (degree) {
        case 5: return {{2, 0}, {4, 3, 2, 0}};
        case 6: return {{1, 0}, {5, 2, 1, 0}};
        case 7: return {{3, 0}, {3, 2, 1, 0}};
        case 10: return {{3, 0}, {8, 3, 2, 0}};
        case 11: return {{2, 0}, {8, 5, 2, 0}};
        default:
            throw std::invalid_argument("gold_sequence: unsupported degree " + std::to_string(degree) +
                                        " (supported: 5, 6, 7, 10, 11)");
    }
}

/// Peak cross-correlation magnitude t(k) = 2^floor((k+2)/2) + 1 of a Gold family.
inline std::int64_t gold_correlation_bound(int degree) {
    return (std::int64_t{1} << ((degree + 2) / 2)) + 1;
}

inline BinarySequence gold_sequence(int degree, std::int64_t shift) {
    const auto pair = gold_preferred_pair(degree);
    const auto a = m_sequence(degree, pair.taps_a);
    const auto b = m_sequence(degree, pair.taps_b);
    const auto len = static_cast<std::int64_t>(a.length());
    if (shift < 0 || shift >= len) {
        throw std::out_of_range("gold_sequence: shift " + std::to_string(shift) + " outside [0, " +
                                std::to_string(len) + ")");
    }
    BinarySequence g;
    g.bits.resize(a.length());
    for (std::int64_t n = 0; n < len; ++n) {
        g.bits[static_cast<std::size_t>(n)] =
            a.bits[static_cast<std::size_t>(n)] ^ b.bits[static_cast<std::size_t>((n + shift) % len)];
    }
    return g;
}

inline std::vector<Complex> bpsk(const BinarySequence& s) {
    std::vector<Complex> out(s.length());
    std::transform(s.bits.begin(), s.bits.end(), out.begin(),
                   [](std::uint8_t b) { return Complex{1.0 - 2.0 * b, 0.0}; });
    return out;
}

/// First `length` BPSK symbols of a Gold family member (length 0 = full period).
inline PilotSequence gold_bpsk_pilot(int degree, std::int64_t shift, std::size_t length = 0) {
    auto symbols = bpsk(gold_sequence(degree, shift));
    if (length > symbols.size()) {
        throw std::invalid_argument("gold_bpsk_pilot: requested " + std::to_string(length) +
                                    " symbols from a period of " + std::to_string(symbols.size()));
    }
    if (length != 0) symbols.resize(length);
    return PilotSequence{std::move(symbols), shift, PilotFamily::gold_bpsk};
}

/// x[m] = exp(-i pi root m (m+1) / length), length odd, gcd(root, length) = 1.
inline PilotSequence zadoff_chu(std::int64_t length, std::int64_t root) {
    if (length <= 0 || length % 2 == 0) {
        throw std::invalid_argument("zadoff_chu: length must be odd and positive");
    }
    if (std::gcd(root, length) != 1) {
        throw std::invalid_argument("zadoff_chu: root " + std::to_string(root) + " not coprime to length " +
                                    std::to_string(length));
    }
    std::vector<Complex> x(static_cast<std::size_t>(length));
    for (std::int64_t m = 0; m < length; ++m) {
        // m(m+1) is even, so reduce the phase exactly in integers first.
        const std::int64_t num = mod_floor(root * ((m * (m + 1) / 2) % length), length);
        x[static_cast<std::size_t>(m)] = cis_turns(-static_cast<double>(num) / static_cast<double>(length));
    }
    return PilotSequence{std::move(x), root, PilotFamily::zadoff_chu};
}

inline PilotSequence single_chirp_pilot() {
    return PilotSequence{{Complex{1.0, 0.0}}, 0, PilotFamily::single_chirp};
}

/// Unnormalised periodic correlation sum_m a[m] conj(b[(m+lag) mod L]).
inline std::vector<Complex> periodic_correlation(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw std::invalid_argument("periodic_correlation: length mismatch");
    const std::size_t L = a.size();
    std::vector<Complex> c(L);
    for (std::size_t lag = 0; lag < L; ++lag) {
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m < L; ++m) acc += a[m] * std::conj(b[(m + lag) % L]);
        c[lag] = acc;
    }
    return c;
}

/// |periodic cross-correlation| / length at every lag.
inline std::vector<double> cross_correlation_profile(const PilotSequence& a, const PilotSequence& b) {
    if (a.length() != b.length()) {
        throw std::invalid_argument("cross_correlation_profile: length mismatch (" + std::to_string(a.length()) +
                                    " vs " + std::to_string(b.length()) + ")");
    }
    const auto c = periodic_correlation(a.symbols, b.symbols);
    std::vector<double> out(c.size());
    const double L = static_cast<double>(a.length());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::abs(c[i]) / L;
    return out;
}

}  // namespace afdm
