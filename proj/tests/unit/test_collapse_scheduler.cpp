#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qcollapse/collapse_scheduler.hpp"
#include "../common/support.hpp"

using namespace qcollapse;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

/// Lindblad oracle for Poisson projective measurements at rate lambda:
/// d rho/dt = -i[H, rho] + lambda (sum_k P_k rho P_k - rho), integrated by RK4.
CMatrix measured_master_equation(const CMatrix& h, CMatrix rho, double lambda, double total_time, int steps) {
    auto rhs = [&](const CMatrix& r) {
        CMatrix d = complex(0, -1) * (h * r - r * h);
        CMatrix diag = CMatrix::Zero(r.rows(), r.cols());
        for (Eigen::Index i = 0; i < r.rows(); ++i) diag(i, i) = r(i, i);
        return CMatrix(d + lambda * (diag - r));
    };
    const double dt = total_time / steps;
    for (int s = 0; s < steps; ++s) {
        const CMatrix k1 = rhs(rho);
        const CMatrix k2 = rhs(rho + 0.5 * dt * k1);
        const CMatrix k3 = rhs(rho + 0.5 * dt * k2);
        const CMatrix k4 = rhs(rho + dt * k3);
        rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

}  // namespace

TEST(PoissonPmf, Values) {
    EXPECT_NEAR(poisson_pmf(0, 1.0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(poisson_pmf(2, 1.0), std::exp(-1.0) / 2, 1e-15);
    EXPECT_EQ(poisson_pmf(0, 0.0), 1.0);
    EXPECT_EQ(poisson_pmf(3, 0.0), 0.0);
    EXPECT_THROW(poisson_pmf(-1, 1.0), ValidationError);
    EXPECT_THROW(poisson_pmf(1, -1.0), ValidationError);
}

TEST(PoissonPmf, NormalizedWithMeanLambda) {
    for (double lam : {0.3, 1.0, 4.5, 25.0, 300.0}) {
        const auto kmax = static_cast<long long>(lam + 40 * std::sqrt(lam) + 40);
        CompensatedSum total, first;
        for (long long k = 0; k <= kmax; ++k) {
            const double p = poisson_pmf(k, lam);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            total.add(p);
            first.add(static_cast<double>(k) * p);
        }
        EXPECT_NEAR(total.value(), 1.0, 1e-9) << lam;
        EXPECT_NEAR(first.value(), lam, 1e-9 * std::max(1.0, lam)) << lam;
    }
}

TEST(WaitingTime, Means) {
    Rng rng(21);
    for (double lam : {1.0, 10.0}) {
        const PoissonClock clock(lam);
        double s = 0;
        for (int i = 0; i < 100000; ++i) {
            const double t = sample_waiting_time(clock, rng);
            ASSERT_GE(t, 0.0);
            s += t;
        }
        EXPECT_NEAR(s / 1e5 * lam, 1.0, 0.02);
    }
    EXPECT_THROW(PoissonClock(0.0), ValidationError);
}

TEST(WaitingTime, KolmogorovSmirnov) {
    Rng rng(22);
    const double lam = 2.5;
    const PoissonClock clock(lam);
    std::vector<double> t(100000);
    for (auto& x : t) x = sample_waiting_time(clock, rng);
    std::sort(t.begin(), t.end());
    double d = 0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double f = -std::expm1(-lam * t[i]);
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    EXPECT_LT(d, 0.01);
    EXPECT_LT(d, 1.949 / std::sqrt(n));
}

TEST(GrwRate, Composition) {
    EXPECT_EQ(grw_rate(1, 1e-16), 1e-16);
    EXPECT_EQ(grw_rate(2, 1e-16), 2 * grw_rate(1, 1e-16));
    // 1e23 and 1e-16 are not representable; the product lands within one ulp of 1e7.
    const double macro = grw_rate(1e23, 1e-16);
    EXPECT_LE(std::abs(macro - 1e7), std::nextafter(1e7, 2e7) - 1e7);
    EXPECT_THROW(grw_rate(0, 1e-16), ValidationError);
}

TEST(GrwRate, LinearInConstituentCount) {
    Rng rng(23);
    // Dyadic rate: every product is exact, so additivity holds bit for bit.
    const double dyadic = std::ldexp(1.0, -53);
    for (int i = 0; i < 1000; ++i) {
        const double a = std::floor(1 + 1e6 * uniform01(rng)), b = std::floor(1 + 1e6 * uniform01(rng));
        EXPECT_EQ(grw_rate(a + b, dyadic), grw_rate(a, dyadic) + grw_rate(b, dyadic));
        const double lam = 1e-16 * (1 + uniform01(rng));
        const double lhs = grw_rate(a + b, lam), rhs = grw_rate(a, lam) + grw_rate(b, lam);
        EXPECT_LE(std::abs(lhs - rhs), 2 * std::numeric_limits<double>::epsilon() * lhs);
    }
}

TEST(PenroseTime, InverseEnergy) {
    EXPECT_EQ(penrose_time(1.0), 1.0);
    EXPECT_EQ(penrose_time(2.0), 0.5);
    Rng rng(24);
    for (int i = 0; i < 100; ++i) {
        const double e = 0.01 + 100 * uniform01(rng);
        EXPECT_EQ(penrose_time(2 * e), 0.5 * penrose_time(e));
    }
    EXPECT_THROW(penrose_time(0.0), ValidationError);
}

TEST(CslStep, NoNoiseIsUnitaryToSecondOrder) {
    Rng rng(25);
    const auto h = qtest::random_hamiltonian(3, rng);
    const auto a = HermitianOperator::diagonal({1.0, 0.0, -1.0});
    const auto psi = qtest::random_state(3, rng);
    const double dt = 1e-3;
    const auto out = csl_step(psi, h, a, 0.0, dt, rng);
    const auto exact = evolve_unitary(psi, h, dt);
    EXPECT_LT((out.amplitudes() - exact.amplitudes()).norm(), 10 * dt * dt);
}

TEST(CslStep, EigenvectorIsFixedPoint) {
    Rng rng(26);
    const auto a = HermitianOperator::diagonal({1.0, -1.0});
    auto psi = StateVector::basis(2, 0);
    for (int s = 0; s < 1000; ++s) psi = csl_step(psi, HermitianOperator::zero(2), a, 1.0, 0.01, rng);
    EXPECT_NEAR(std::norm(psi[0]), 1.0, 1e-12);
}

TEST(CslStep, BornStatistics) {
    const auto a = HermitianOperator::diagonal({1.0, -1.0});
    const auto h = HermitianOperator::zero(2);
    const StateVector start({1 / kSqrt2, 1 / kSqrt2});
    int ups = 0;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        Rng rng = stream_for(27, static_cast<std::uint64_t>(r));
        auto psi = start;
        for (int s = 0; s < 400; ++s) psi = csl_step(psi, h, a, 1.0, 0.01, rng);
        ups += std::norm(psi[0]) > 0.5;
    }
    EXPECT_NEAR(static_cast<double>(ups) / runs, 0.5, 0.02);
}

TEST(CslStep, BiasedSuperpositionFollowsBorn) {
    const auto a = HermitianOperator::diagonal({1.0, -1.0});
    const auto h = HermitianOperator::zero(2);
    const StateVector start({std::sqrt(0.8), std::sqrt(0.2)});
    int ups = 0;
    const int runs = 4000;
    for (int r = 0; r < runs; ++r) {
        Rng rng = stream_for(28, static_cast<std::uint64_t>(r));
        auto psi = start;
        for (int s = 0; s < 400; ++s) psi = csl_step(psi, h, a, 1.0, 0.01, rng);
        ups += std::norm(psi[0]) > 0.5;
    }
    EXPECT_NEAR(static_cast<double>(ups) / runs, 0.8, 0.025);
}

TEST(CslStep, RejectsLargeStep) {
    Rng rng(29);
    EXPECT_THROW(csl_step(StateVector::basis(2, 0), HermitianOperator::zero(2), HermitianOperator::identity(2), 1.0,
                          0.2, rng),
                 ValidationError);
}

TEST(RunAlternating, NoEventsIsPureUnitary) {
    Rng rng(30);
    const auto h = qtest::random_hamiltonian(3, rng);
    const auto psi = qtest::random_state(3, rng);
    const auto basis = computational_basis(3);
    const auto traj = run_alternating(psi, h, PoissonClock(1e-12), basis, 5.0, 0.5, rng);
    EXPECT_TRUE(traj.events.empty());
    ASSERT_EQ(traj.samples.size(), 11u);
    for (const auto& s : traj.samples) {
        const auto expected = evolve_unitary(psi, h, s.time);
        EXPECT_LT((s.state.amplitudes() - expected.amplitudes()).norm(), 1e-9);
    }
}

TEST(RunAlternating, MeanEventCount) {
    const auto h = HermitianOperator(CMatrix::Identity(2, 2) * 0.0 + CMatrix::Ones(2, 2) * 0.3);
    const auto basis = computational_basis(2);
    const PoissonClock clock(2.5);
    double total = 0;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        Rng rng = stream_for(31, static_cast<std::uint64_t>(r));
        total += static_cast<double>(run_alternating(basis[0], h, clock, basis, 2.0, 1.0, rng).events.size());
    }
    EXPECT_NEAR(total / runs, 5.0, 0.1);
}

TEST(RunAlternating, EventInvariants) {
    Rng rng(32);
    const auto h = qtest::random_hamiltonian(4, rng);
    const auto basis = computational_basis(4);
    const auto traj = run_alternating(qtest::random_state(4, rng), h, PoissonClock(3.0), basis, 20.0, 0.1, rng);
    ASSERT_GT(traj.events.size(), 20u);
    for (std::size_t i = 0; i < traj.events.size(); ++i) {
        const auto& e = traj.events[i];
        if (i > 0) {
            EXPECT_GT(e.time, traj.events[i - 1].time);
        }
        const double overlap = std::abs(inner_product(e.post_state, e.pre_state));
        EXPECT_NEAR(e.info_change, -2 * std::log(overlap), 1e-9);
        EXPECT_EQ(std::norm(e.post_state[e.chosen_index]), 1.0);
    }
    for (const auto& s : traj.samples) EXPECT_NEAR(s.state.amplitudes().norm(), 1.0, 1e-10);
}

TEST(RunAlternating, InterEventGapsAreExponential) {
    Rng rng(33);
    const double lam = 4.0;
    const auto basis = computational_basis(2);
    const auto traj =
        run_alternating(basis[0], HermitianOperator::diagonal({0.0, 1.0}), PoissonClock(lam), basis, 5000.0, 50.0, rng);
    std::vector<double> gaps;
    double prev = 0;
    for (const auto& e : traj.events) {
        gaps.push_back(e.time - prev);
        prev = e.time;
    }
    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double f = -std::expm1(-lam * gaps[i]);
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    EXPECT_LT(d, 1.949 / std::sqrt(n));
}

TEST(RunAlternating, BitReproducible) {
    Rng seed_a(34), seed_b(34);
    Rng tmp(99);
    const auto h = qtest::random_hamiltonian(3, tmp);
    const auto psi = qtest::random_state(3, tmp);
    const auto basis = computational_basis(3);
    const auto a = run_alternating(psi, h, PoissonClock(2.0), basis, 10.0, 0.25, seed_a);
    const auto b = run_alternating(psi, h, PoissonClock(2.0), basis, 10.0, 0.25, seed_b);
    std::ostringstream ca, cb;
    write_trajectory_csv(ca, a);
    write_trajectory_csv(cb, b);
    EXPECT_EQ(ca.str(), cb.str());
    EXPECT_NE(ca.str().find("t,re_0,im_0"), std::string::npos);
}

TEST(RunAlternating, RateHookControlsEvents) {
    Rng rng(35);
    const auto basis = computational_basis(2);
    const auto h = HermitianOperator(CMatrix::Ones(2, 2) * 0.5);
    // A hook returning zero switches collapse off entirely.
    const auto off = run_alternating(basis[0], h, PoissonClock(100.0), basis, 10.0, 1.0, rng,
                                     [](const StateVector&, double) { return 0.0; });
    EXPECT_TRUE(off.events.empty());
    // Rate that vanishes after t = 1.
    const auto gated = run_alternating(basis[0], h, PoissonClock(1.0), basis, 10.0, 1.0, rng,
                                       [](const StateVector&, double t) { return t < 1.0 ? 50.0 : 0.0; });
    ASSERT_FALSE(gated.events.empty());
    EXPECT_LT(gated.events.back().time, 1.5);
}

TEST(RunAlternating, MatchesMasterEquationAndZenoOrdering) {
    const double g = 0.5;
    CMatrix hm(2, 2);
    hm << 0.0, g, g, 0.0;
    const HermitianOperator h(hm);
    const auto basis = computational_basis(2);
    const double total = 2.0;
    double previous_oracle = 1.0;
    for (double lam : {4.0, 8.0, 16.0, 32.0}) {
        CMatrix rho0 = CMatrix::Zero(2, 2);
        rho0(0, 0) = 1.0;
        const double oracle = measured_master_equation(hm, rho0, lam, total, 20000)(1, 1).real();
        EXPECT_LT(oracle, previous_oracle);
        previous_oracle = oracle;
        const int runs = 20000;
        double excited = 0;
        for (int r = 0; r < runs; ++r) {
            Rng rng = stream_for(36, static_cast<std::uint64_t>(r));
            const auto traj = run_alternating(basis[0], h, PoissonClock(lam), basis, total, total, rng);
            excited += std::norm(traj.samples.back().state[1]);
        }
        const double estimate = excited / runs;
        EXPECT_NEAR(estimate, oracle, 4 * std::sqrt(oracle * (1 - oracle) / runs) + 1e-3) << "lambda " << lam;
    }
}
