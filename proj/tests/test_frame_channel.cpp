#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace afdm;

namespace {

// 2N|c1| = 3 at N = 64.
DaftParams three_bin_params() { return DaftParams{64, -3.0 / 128.0, 0.0173}; }

std::vector<Path> all_paths(std::int64_t l_max, std::int64_t q_max) {
    std::vector<Path> out;
    for (std::int64_t l = 0; l <= l_max; ++l) {
        for (std::int64_t q = -q_max; q <= q_max; ++q) out.push_back(Path{l, q, Complex{1.0, 0.0}});
    }
    return out;
}

}  // namespace

TEST(Guard, RequiredGuardValues) {
    EXPECT_EQ(required_guard(three_bin_params(), 3, 1), 11);
    EXPECT_EQ(required_guard(DaftParams::paper_default(3264), 4, 0), 4);
    EXPECT_THROW(required_guard(DaftParams(64, 0.001, 0.0), 1, 0), ConfigError);
    EXPECT_THROW(required_guard(three_bin_params(), -1, 0), std::invalid_argument);
}

TEST(Guard, RequiredGuardEqualsBruteForceSpread) {
    const auto p = three_bin_params();
    const std::int64_t l_max = 3, q_max = 1, pilot = 20;
    std::vector<Complex> x(64, Complex{0.0, 0.0});
    x[pilot] = 1.0;
    std::set<std::int64_t> offsets;
    for (const auto& path : all_paths(l_max, q_max)) {
        const auto y = oracle::daft(oracle::channel(x, p.c1, p.c2, {path}), p.c1, p.c2);
        for (std::int64_t b = 0; b < 64; ++b) {
            if (std::abs(y[static_cast<std::size_t>(b)]) > 1e-6) {
                offsets.insert(mod_floor(b - pilot + 32, 64) - 32);
            }
        }
    }
    EXPECT_EQ(*offsets.rbegin() - *offsets.begin(), required_guard(p, l_max, q_max));
    const auto [lo, hi] = shift_range(p, l_max, q_max);
    EXPECT_EQ(*offsets.begin(), lo);
    EXPECT_EQ(*offsets.rbegin(), hi);
}

TEST(Frame, ValidationRules) {
    FrameSpec s;
    s.params = three_bin_params();
    s.pilot_start = 10;
    s.l_max = 3;
    s.q_max = 1;
    EXPECT_NO_THROW(validate(s));  // no data: guards are not needed
    s.data_indices = {40};
    EXPECT_THROW(validate(s), ConfigError);
    s.guard_left = s.guard_right = 11;
    EXPECT_NO_THROW(validate(s));
    s.data_indices = {12};
    EXPECT_THROW(validate(s), std::invalid_argument);  // overlaps a guard
    s.data_indices = {64};
    EXPECT_THROW(validate(s), std::invalid_argument);
    s.data_indices.clear();
    s.pilot_power_boost = 0.5;
    EXPECT_THROW(validate(s), std::invalid_argument);
    s.pilot_power_boost = 1.0;
    s.guard_left = s.guard_right = 40;
    EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(Frame, GuardsKeepDataOutOfPilotWindow) {
    FrameSpec s;
    s.params = three_bin_params();
    s.pilot_start = 30;
    s.pilot = gold_bpsk_pilot(5, 2, 4);
    s.l_max = 3;
    s.q_max = 1;
    s.guard_left = s.guard_right = static_cast<std::size_t>(required_guard(s.params, 3, 1));
    s.data_indices = free_indices(s);
    ASSERT_EQ(s.data_indices.size(), 64u - 4u - 22u);
    std::mt19937_64 rng(5);
    const auto data = random_qpsk(s.data_indices.size(), rng);
    const auto frame = build_frame(s, data);
    // Data symbols alone, through every in-bounds path at once.
    std::vector<Complex> data_only(64, Complex{0.0, 0.0});
    for (auto d : s.data_indices) data_only[d] = frame.daft_symbols[d];
    const auto y = oracle::daft(oracle::channel(data_only, s.params.c1, s.params.c2, all_paths(3, 1)), s.params.c1,
                                s.params.c2);
    for (auto b : pilot_observation_window(s)) EXPECT_LT(std::abs(y[b]), 1e-9) << "bin " << b;
}

TEST(Frame, BuildPlacesBoostedPilotAndData) {
    FrameSpec s;
    s.params = DaftParams::paper_default(32);
    s.pilot_start = 31;
    s.pilot = gold_bpsk_pilot(5, 0, 2);
    s.pilot_power_boost = 4.0;
    s.guard_left = s.guard_right = 2;
    s.l_max = 2;
    s.data_indices = {10, 11};
    const std::vector<Complex> data{{1, 0}, {0, 1}};
    const auto f = build_frame(s, data, 5.0);
    EXPECT_EQ(f.daft_symbols[31], 2.0 * s.pilot.symbols[0]);
    EXPECT_EQ(f.daft_symbols[0], 2.0 * s.pilot.symbols[1]);  // wraps
    EXPECT_EQ(f.daft_symbols[11], Complex(0, 1));
    EXPECT_DOUBLE_EQ(f.time_signal.sample_rate(), 5.0);
    EXPECT_THROW(build_frame(s, std::vector<Complex>{{1, 0}}), std::invalid_argument);
}

TEST(Prefix, ChirpPeriodicPrefixIsTheFormulaExtension) {
    const auto p = DaftParams{64, -3.0 / 128.0, 0.0173};
    const auto x = oracle::random_vector(64, 9);
    const auto X = idaft(DaftSpectrum{x, p});
    const auto pre = add_chirp_periodic_prefix(X, p, 12);
    ASSERT_EQ(pre.signal.size(), 76u);
    for (long long n = -12; n < 64; ++n) {
        const auto expect = oracle::to_c(oracle::idaft_at(x, p.c1, p.c2, n));
        ASSERT_LT(std::abs(pre.signal[static_cast<std::size_t>(n + 12)] - expect), 1e-10) << n;
    }
    EXPECT_EQ(strip_prefix(pre).vec(), X.vec());
    EXPECT_THROW(add_chirp_periodic_prefix(X, p, 65), std::invalid_argument);
}

TEST(Channel, MatchesTimeDomainOracle) {
    const auto p = DaftParams::paper_default(64);
    const auto x = oracle::random_vector(64, 11);
    const auto X = idaft(DaftSpectrum{x, p});
    const std::vector<Path> paths{{0, 0, {0.5, 0.1}}, {3, 2, {-0.2, 0.7}}, {7, -1, {0.1, -0.3}}};
    const auto r = strip_prefix(apply_paths(add_chirp_periodic_prefix(X, p, 7), paths));
    EXPECT_LT(oracle::rel_err(r.vec(), oracle::channel(x, p.c1, p.c2, paths)), 1e-11);
}

TEST(Channel, RejectsDelaysBeyondPrefix) {
    const auto p = DaftParams::paper_default(16);
    const auto tx = add_chirp_periodic_prefix(idaft(DaftSpectrum{oracle::random_vector(16, 1), p}), p, 2);
    EXPECT_THROW(apply_paths(tx, std::vector<Path>{{3, 0, {1, 0}}}), std::invalid_argument);
    EXPECT_THROW(apply_paths(tx, std::vector<Path>{{-1, 0, {1, 0}}}), std::invalid_argument);
}

TEST(Channel, SelfInterferencePathAndNoiseVariance) {
    const auto si = self_interference_path(60.0);
    EXPECT_EQ(si.delay_samples, 0);
    EXPECT_NEAR(std::norm(si.gain), 1e6, 1e-6);
    EXPECT_NEAR(snr_to_noise_variance(2.0, 10.0), 0.2, 1e-15);
    EXPECT_THROW(snr_to_noise_variance(0.0, 10.0), std::invalid_argument);

    const auto w = complex_awgn(200000, 0.25, 77);
    EXPECT_NEAR(energy(w) / 200000.0, 0.25, 0.25 * 0.02);
    double re = 0.0, im = 0.0;
    for (const auto& s : w) {
        re += s.real() * s.real();
        im += s.imag() * s.imag();
    }
    EXPECT_NEAR(re / im, 1.0, 0.02);  // circular
    EXPECT_EQ(w, complex_awgn(200000, 0.25, 77));
    EXPECT_NE(w, complex_awgn(200000, 0.25, 78));
}

TEST(Channel, ApplyChannelAddsSiAndSeededNoise) {
    const auto p = DaftParams::paper_default(32);
    const auto tx = add_chirp_periodic_prefix(idaft(DaftSpectrum{oracle::random_vector(32, 2), p}), p, 4);
    ChannelRealization ch;
    ch.paths = {{2, 0, {1, 0}}};
    ch.si_path = self_interference_path(20.0);
    ch.noise_variance = 0.01;
    const auto a = apply_channel(tx, ch, 5);
    const auto b = apply_channel(tx, ch, 5);
    EXPECT_EQ(a.signal.vec(), b.signal.vec());
    const auto clean = apply_paths(tx, std::vector<Path>{{2, 0, {1, 0}}, *ch.si_path});
    std::vector<Complex> diff(a.signal.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.signal[i] - clean.signal[i];
    EXPECT_LT(oracle::max_abs_diff(diff, complex_awgn(diff.size(), 0.01, 5)), 1e-9);
}

TEST(Seeds, DeriveSeedIsDeterministicAndSpread) {
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(derive_seed(42, s, t));
    }
    EXPECT_EQ(seen.size(), 4000u);
}
