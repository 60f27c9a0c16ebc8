#include "sgnn/neuron.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sgnn;
using neuron::LifLongResetConfig;

namespace {

LifLongResetConfig leak_off(std::int32_t refractory = 0)
{
    LifLongResetConfig c;
    c.vth = 1;
    c.refractory = refractory;
    c.reset_interval = 1000;
    return c;
}

} // namespace

TEST(Neuron, NewCluster)
{
    for (std::size_t n : {1u, 7u, 2428u}) {
        const auto s = neuron::new_cluster(n, leak_off());
        EXPECT_EQ(s.size(), n);
        EXPECT_EQ(s.t, 0);
        EXPECT_TRUE(neuron::is_quiescent(s));
    }
    EXPECT_THROW(neuron::new_cluster(0, leak_off()), std::invalid_argument);
}

TEST(Neuron, ConfigValidation)
{
    auto c = leak_off();
    c.vth = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = leak_off();
    c.reset_interval = 4;
    c.reset_length = 4;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Neuron, ResetWindow)
{
    LifLongResetConfig c;
    c.reset_interval = 10;
    c.reset_length = 4;
    for (int t = 0; t < 28; ++t) {
        const bool expect = (t >= 10 && t <= 13) || (t >= 24 && t <= 27);
        EXPECT_EQ(neuron::in_reset_window(t, c), expect) << t;
    }
    c.reset_length = 0;
    for (int t = 0; t < 50; ++t) EXPECT_FALSE(neuron::in_reset_window(t, c));
    c.reset_interval = 14;
    c.reset_length = 7;
    EXPECT_TRUE(neuron::in_reset_window(14, c));
    EXPECT_FALSE(neuron::in_reset_window(21, c));
}

TEST(Neuron, LeakOffNeuronKeepsFiring)
{
    const auto c = leak_off();
    auto s = neuron::new_cluster(1, c);
    const std::int32_t kick = 100, none = 0;
    EXPECT_EQ(neuron::step(s, std::span(&kick, 1), c)[0], 1);
    EXPECT_EQ(s.v[0], 0);
    EXPECT_EQ(s.u[0], 100);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(neuron::step(s, std::span(&none, 1), c)[0], 1);
}

TEST(Neuron, SilentNeuronNeverFires)
{
    const auto c = leak_off();
    auto s = neuron::new_cluster(3, c);
    const std::vector<std::int32_t> zero(3, 0);
    for (int i = 0; i < 50; ++i) {
        const auto spikes = neuron::step(s, zero, c);
        EXPECT_EQ(std::count(spikes.begin(), spikes.end(), 1), 0);
    }
}

TEST(Neuron, RefractoryLongerThanWindowFiresOnce)
{
    const auto c = leak_off(20);
    auto s = neuron::new_cluster(1, c);
    int spikes = 0;
    for (int t = 0; t < 14; ++t) {
        const std::int32_t in = t == 0 ? 100 : 0;
        spikes += neuron::step(s, std::span(&in, 1), c)[0];
    }
    EXPECT_EQ(spikes, 1);
}

TEST(Neuron, RefractoryWindowHoldsAtMostOneSpike)
{
    std::mt19937 g(5);
    std::uniform_int_distribution<std::int32_t> in(-50, 400);
    for (int r : {1, 3, 6}) {
        const auto c = leak_off(r);
        auto s = neuron::new_cluster(1, c);
        std::vector<int> fired;
        for (int t = 0; t < 300; ++t) {
            const auto x = in(g);
            fired.push_back(neuron::step(s, std::span(&x, 1), c)[0]);
        }
        for (std::size_t t = 0; t + r <= fired.size(); ++t) {
            EXPECT_LE(std::accumulate(fired.begin() + t, fired.begin() + t + r, 0), 1);
        }
    }
}

TEST(Neuron, ApplyReset)
{
    auto c = leak_off(5);
    auto s = neuron::new_cluster(2, c);
    const std::vector<std::int32_t> kick{100, 7};
    neuron::step(s, kick, c);
    ASSERT_GT(s.refrac_remaining[0], 0);
    const auto t = s.t;
    neuron::apply_reset(s);
    EXPECT_TRUE(neuron::is_quiescent(s));
    EXPECT_EQ(s.t, t);
    const auto once = s;
    neuron::apply_reset(s);
    EXPECT_EQ(s.u, once.u);
    EXPECT_EQ(s.v, once.v);
    // The refractory counter is gone, so the neuron can fire right away.
    EXPECT_EQ(neuron::step(s, kick, c)[0], 1);
}

TEST(Neuron, LeakOffIntegratesExactly)
{
    auto c = leak_off();
    c.vth = 1 << 22;
    auto s = neuron::new_cluster(1, c);
    std::mt19937 g(6);
    std::uniform_int_distribution<std::int32_t> in(-100, 100);
    std::int64_t sum = 0;
    for (int t = 0; t < 500; ++t) {
        const auto x = in(g);
        sum += x;
        neuron::step(s, std::span(&x, 1), c);
        ASSERT_EQ(s.u[0], sum);
    }
}

TEST(Neuron, NeverFiresInsideResetWindow)
{
    std::mt19937 g(7);
    std::uniform_int_distribution<std::int32_t> in(-300, 3000);
    LifLongResetConfig c;
    c.du = fxp::Q12Decay(1000);
    c.vth = 50;
    c.reset_interval = 6;
    c.reset_length = 3;
    auto s = neuron::new_cluster(16, c);
    for (int t = 0; t < 400; ++t) {
        std::vector<std::int32_t> x(16);
        for (auto& v : x) v = in(g);
        const bool resetting = neuron::in_reset_window(s.t, c);
        const auto spikes = neuron::step(s, x, c);
        if (resetting) {
            EXPECT_EQ(std::count(spikes.begin(), spikes.end(), 1), 0);
            EXPECT_TRUE(neuron::is_quiescent(s));
        }
    }
}

TEST(Neuron, LengthMismatchRejected)
{
    auto c = leak_off();
    auto s = neuron::new_cluster(3, c);
    const std::vector<std::int32_t> x(2, 0);
    EXPECT_THROW(neuron::step(s, x, c), std::invalid_argument);
}

TEST(Neuron, MatchesOracleAndIsDeterministic)
{
    std::mt19937 g(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> n_d(1, 8), raw(0, 4096), small(0, 5);
        LifLongResetConfig c;
        c.du = fxp::Q12Decay(raw(g));
        c.dv = fxp::Q12Decay(raw(g));
        c.vth = 1 + raw(g);
        c.refractory = small(g);
        c.reset_interval = 3 + small(g);
        c.reset_length = small(g) % c.reset_interval;
        c.bias = small(g) - 2;
        const auto n = static_cast<std::size_t>(n_d(g));
        auto s = neuron::new_cluster(n, c);
        auto twin = s;
        oracle::Lif oc{c.du.raw(), c.dv.raw(), c.vth, c.refractory, c.reset_interval, c.reset_length, c.bias};
        oracle::LifState os{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0),
                            std::vector<std::int64_t>(n, 0), 0};
        std::uniform_int_distribution<std::int32_t> in(-2000, 6000);
        for (int t = 0; t < 100; ++t) {
            std::vector<std::int32_t> x(n);
            std::vector<std::int64_t> xo(n);
            for (std::size_t i = 0; i < n; ++i) xo[i] = x[i] = in(g);
            const auto a = neuron::step(s, x, c);
            const auto b = neuron::step(twin, x, c);
            const auto o = oracle::lif_step(os, xo, oc);
            ASSERT_EQ(a, b);
            for (std::size_t i = 0; i < n; ++i) {
                ASSERT_EQ(a[i], o[i]);
                ASSERT_EQ(s.u[i], os.u[i]);
                ASSERT_EQ(s.v[i], os.v[i]);
                ASSERT_EQ(s.refrac_remaining[i], os.ref[i]);
            }
        }
    }
}
