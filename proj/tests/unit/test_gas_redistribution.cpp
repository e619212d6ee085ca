#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qcollapse/gas_redistribution.hpp"

using namespace qcollapse;

TEST(InitUniform, RangeAndMean) {
    Rng rng(51);
    const auto ens = init_uniform(100000, 100.0, rng);
    EXPECT_NEAR(ens.mean(), 50.0, 0.5);
    for (double e : ens.energies) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 100.0);
    }
    EXPECT_THROW(init_uniform(1, 100.0, rng), ValidationError);
    EXPECT_THROW(init_uniform(10, 0.0, rng), ValidationError);
}

TEST(InitUniform, StepDensity) {
    Rng rng(52);
    const auto ens = init_uniform(100000, 100.0, rng);
    const auto h = histogram(ens, 2.0);
    ASSERT_EQ(h.counts.size(), 50u);
    const auto d = h.density();
    for (double x : d) EXPECT_NEAR(x, 0.01, 0.0015);
}

TEST(ExchangePair, MidpointAndExactSum) {
    auto ens = make_ensemble({3.0, 5.0, 1.0});
    exchange_pair(ens, 0, 1, 0.5);
    EXPECT_EQ(ens.energies[0], 4.0);
    EXPECT_EQ(ens.energies[1], 4.0);
    Rng rng(53);
    for (int i = 0; i < 100000; ++i) {
        auto e = make_ensemble({100 * uniform01(rng), 100 * uniform01(rng)});
        const double s = e.energies[0] + e.energies[1];
        exchange_pair(e, 0, 1, uniform01(rng));
        EXPECT_EQ(e.energies[0] + e.energies[1], s);
        EXPECT_GE(e.energies[0], 0.0);
        EXPECT_GE(e.energies[1], 0.0);
    }
}

TEST(RedistributionStep, PureAndConserving) {
    Rng rng(54);
    const auto ens = init_uniform(10, 100.0, rng);
    const auto next = redistribution_step(ens, rng);
    int changed = 0;
    for (std::size_t i = 0; i < ens.size(); ++i) changed += ens.energies[i] != next.energies[i];
    EXPECT_LE(changed, 2);
    EXPECT_EQ(next.total, ens.total);
    EXPECT_NEAR(next.current_total(), ens.total, 1e-12 * ens.total);
}

TEST(Redistribute, PairsAreDistinctAndUniform) {
    // Track which indices move on a 4-particle system with distinct energies.
    Rng rng(55);
    std::vector<int> touched(4, 0);
    for (int trial = 0; trial < 40000; ++trial) {
        auto ens = make_ensemble({1.0, 2.0, 4.0, 8.0});
        const auto before = ens.energies;
        redistribute(ens, rng);
        int moved = 0;
        for (int k = 0; k < 4; ++k)
            if (ens.energies[k] != before[k]) {
                ++touched[k];
                ++moved;
            }
        EXPECT_LE(moved, 2);
    }
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(touched[k] / 40000.0, 0.5, 0.02);
}

TEST(Redistribute, PositivityAndConservationAudit) {
    Rng rng(56);
    auto ens = init_uniform(100000, 100.0, rng);
    const double total = ens.total;
    for (int block = 0; block < 10; ++block) {
        for (int s = 0; s < 1000000; ++s) redistribute(ens, rng);
        EXPECT_GE(*std::min_element(ens.energies.begin(), ens.energies.end()), 0.0);
        EXPECT_LT(std::abs(ens.current_total() - total) / total, 1e-9);
    }
}

TEST(RunToEquilibrium, ZeroIterationsIsInitial) {
    Rng rng(57);
    auto ens = init_uniform(1000, 100.0, rng);
    const auto initial = histogram(ens, 2.0);
    const auto run = run_to_equilibrium(ens, 0, 10, 2.0, rng);
    ASSERT_EQ(run.histograms.size(), 1u);
    EXPECT_EQ(run.histograms[0].counts, initial.counts);
}

TEST(RunToEquilibrium, ExponentialWithConservedMean) {
    Rng rng(58);
    auto ens = init_uniform(100000, 100.0, rng);
    const double mean = ens.mean();
    const auto run = run_to_equilibrium(ens, 5000000, 500000, 2.0, rng);
    const double kl = kl_from_exponential(run.histograms.back(), mean);
    EXPECT_LT(kl, 0.01);
    EXPECT_LT(std::abs(ens.current_total() - ens.total) / ens.total, 1e-9);
    // Fit improves: early checkpoints are worse than the last one.
    EXPECT_GT(kl_from_exponential(run.histograms[0], mean), kl);
    const double noise = 1.0 / std::sqrt(100000.0);
    for (std::size_t k = 1; k < run.histograms.size(); ++k)
        EXPECT_LE(kl_from_exponential(run.histograms[k], mean), kl_from_exponential(run.histograms[k - 1], mean) + noise);
    // The equilibrium histogram carries more entropy than the initial step.
    EXPECT_GT(shannon_entropy_of_histogram(run.histograms.back()), shannon_entropy_of_histogram(run.histograms[0]));
}

TEST(RunToEquilibrium, LateHistogramsAreStationary) {
    Rng rng(59);
    auto ens = init_uniform(100000, 100.0, rng);
    run_to_equilibrium(ens, 2000000, 2000000, 2.0, rng);
    const auto late = run_to_equilibrium(ens, 1000, 1000, 2.0, rng);
    EXPECT_TRUE(is_stationary(late, 0.005));
    EXPECT_FALSE(is_stationary(late, 0.0));
}

TEST(RunToEquilibrium, TwoParticleMarginalIsUniform) {
    Rng rng(60);
    auto ens = make_ensemble({30.0, 70.0});
    std::vector<double> frac;
    for (int s = 0; s < 100000; ++s) {
        redistribute(ens, rng);
        frac.push_back(ens.energies[0] / ens.total);
    }
    std::sort(frac.begin(), frac.end());
    const double n = static_cast<double>(frac.size());
    double d = 0;
    for (std::size_t i = 0; i < frac.size(); ++i) d = std::max({d, std::abs(frac[i] - i / n), std::abs(frac[i] - (i + 1) / n)});
    EXPECT_LT(d, 1.949 / std::sqrt(n));
}

TEST(Boltzmann, Values) {
    EXPECT_EQ(boltzmann_pdf(0.0, 50.0), 1.0 / 50.0);
    EXPECT_NEAR(boltzmann_pdf(50.0, 50.0), std::exp(-1.0) / 50.0, 1e-18);
    EXPECT_NEAR(boltzmann_cdf(150.0, 50.0), 0.9502, 1e-4);
    EXPECT_THROW(boltzmann_pdf(1.0, 0.0), ValidationError);
    EXPECT_THROW(boltzmann_pdf(-1.0, 1.0), ValidationError);
}

TEST(Boltzmann, IntegratesToOne) {
    const double mean = 50.0, h = 0.01;
    CompensatedSum s;
    // Simpson on [0, 40 mean]; the tail beyond is e^{-40}.
    const int n = static_cast<int>(40 * mean / h);
    for (int k = 0; k <= n; ++k) {
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s.add(w * boltzmann_pdf(k * h, mean));
    }
    EXPECT_NEAR(s.value() * h / 3.0, 1.0, 1e-6);
}

TEST(HistogramEntropy, Values) {
    EnergyHistogram single{1.0, {0, 10, 0}, 10};
    EXPECT_EQ(shannon_entropy_of_histogram(single), 0.0);
    EnergyHistogram flat{1.0, {5, 5, 5, 5}, 20};
    EXPECT_NEAR(shannon_entropy_of_histogram(flat), std::log(4.0), 1e-15);
    EnergyHistogram empty{1.0, {}, 0};
    EXPECT_THROW(shannon_entropy_of_histogram(empty), ValidationError);
}

TEST(RunToEquilibrium, BitReproducible) {
    Rng a(61), b(61);
    auto ea = init_uniform(1000, 100.0, a);
    auto eb = init_uniform(1000, 100.0, b);
    run_to_equilibrium(ea, 100000, 1000, 2.0, a);
    run_to_equilibrium(eb, 100000, 1000, 2.0, b);
    EXPECT_EQ(ea.energies, eb.energies);
}
