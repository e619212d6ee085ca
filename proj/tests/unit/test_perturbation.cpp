#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qcollapse/perturbation.hpp"
#include "../common/support.hpp"

using namespace qcollapse;

namespace {

HermitianOperator two_level_coupling(complex w01) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = w01;
    m(1, 0) = std::conj(w01);
    return HermitianOperator(m);
}

/// Direct quadrature of a_f = (1/i) int_0^dt W_fi e^{i omega_fi t} 2 cos(omega t) dt (Simpson).
complex first_order_quadrature(double w_fi, double omega_fi, double omega, double dt, int n = 20000) {
    auto f = [&](double t) { return w_fi * std::polar(1.0, omega_fi * t) * 2.0 * std::cos(omega * t); };
    const double h = dt / n;
    complex s = f(0) + f(dt);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return s * h / 3.0 / complex(0, 1);
}

}  // namespace

TEST(DiscreteSpectrum, Validation) {
    EXPECT_THROW(DiscreteSpectrum({1.0}), ValidationError);
    EXPECT_THROW(DiscreteSpectrum({1.0, 0.0}), ValidationError);
    EXPECT_EQ(DiscreteSpectrum({0.0, 1.5}).bohr_frequency(1, 0), 1.5);
}

TEST(FirstOrder, NoCouplingGivesKroneckerDelta) {
    const DiscreteSpectrum s({0.0, 1.0, 3.0});
    const HarmonicPerturbation p(HermitianOperator::zero(3), 0.7);
    EXPECT_EQ(first_order_amplitude(s, p, 0, 1, 5.0).amplitude, complex(0.0));
    EXPECT_EQ(first_order_amplitude(s, p, 2, 2, 5.0).amplitude, complex(1.0));
    EXPECT_THROW(first_order_amplitude(s, p, 0, 3, 1.0), ValidationError);
}

TEST(FirstOrder, ResonantMagnitude) {
    const DiscreteSpectrum s({0.0, 2.0});
    const HarmonicPerturbation p(two_level_coupling(0.01), 2.0);
    const auto r = first_order_amplitude(s, p, 0, 1, 3.0);
    EXPECT_NEAR(std::abs(r.amplitude), 3.0 * 0.01, 1e-15);
    EXPECT_TRUE(r.weak_coupling);
}

TEST(FirstOrder, DetunedDecaysLikeInverseTheta) {
    const DiscreteSpectrum s({0.0, 2.0});
    const double dt = 10.0;
    for (double detune : {4.0, 8.0, 16.0}) {
        const HarmonicPerturbation p(two_level_coupling(0.01), 2.0 + detune);
        const double theta = detune * dt / 2;
        const double bound = dt * 0.01 / theta;
        EXPECT_LE(std::abs(first_order_amplitude(s, p, 0, 1, dt).amplitude), bound * (1 + 1e-12));
    }
}

TEST(FirstOrder, StrongCouplingFlagged) {
    const DiscreteSpectrum s({0.0, 1.0});
    const HarmonicPerturbation p(two_level_coupling(0.5), 1.0);
    EXPECT_FALSE(first_order_amplitude(s, p, 0, 1, 1.0).weak_coupling);
}

TEST(FirstOrderFull, MatchesQuadrature) {
    const DiscreteSpectrum s({0.0, 1.3});
    const auto w = two_level_coupling(0.02);
    for (double omega : {-2.0, -1.3, 0.0, 0.4, 1.3, 3.1}) {
        for (double dt : {0.5, 4.0, 17.0}) {
            const complex a = first_order_amplitude_full(s, w, omega, 0, 1, dt);
            const complex q = first_order_quadrature(0.02, 1.3, omega, dt);
            EXPECT_LT(std::abs(a - q), 1e-10) << omega << " " << dt;
        }
    }
}

TEST(ResonanceCurve, EvenAndPeakedAtBohrFrequency) {
    const DiscreteSpectrum s({0.0, 1.5});
    const auto w = two_level_coupling(complex(0.01, 0.004));
    std::vector<double> grid;
    const double step = 0.01;
    for (int k = -400; k <= 400; ++k) grid.push_back(k * step);
    const auto curve = resonance_curve(s, w, 0, 1, 40.0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(curve[k].probability, curve[grid.size() - 1 - k].probability);
    double best = -1, where = 0;
    for (const auto& pt : curve)
        if (pt.omega > 0 && pt.probability > best) {
            best = pt.probability;
            where = pt.omega;
        }
    EXPECT_NEAR(where, 1.5, step + 1e-12);
    EXPECT_THROW(resonance_curve(s, w, 0, 1, 1.0, std::vector<double>{}), ValidationError);
}

TEST(ResonanceCurve, LobeWidthScalesInverselyWithTime) {
    const DiscreteSpectrum s({0.0, 5.0});
    const HermitianOperator w = two_level_coupling(0.01);
    // First zero of the sinc form sits at detuning 2 pi / dt.
    auto first_zero = [&](double dt) {
        double last = std::norm(first_order_amplitude(s, HarmonicPerturbation(w, 5.0), 0, 1, dt).amplitude);
        for (double d = 1e-4;; d += 1e-4) {
            const double v = std::norm(first_order_amplitude(s, HarmonicPerturbation(w, 5.0 + d), 0, 1, dt).amplitude);
            if (v > last) return d;
            last = v;
        }
    };
    const double z1 = first_zero(10.0), z2 = first_zero(20.0);
    EXPECT_NEAR(z1, 2 * std::numbers::pi / 10.0, 2e-4);
    EXPECT_NEAR(z2 / z1, 0.5, 2e-3);
}

TEST(ResonanceCurve, PeakGrowsQuadratically) {
    const DiscreteSpectrum s({0.0, 1.0});
    const HarmonicPerturbation p(two_level_coupling(0.001), 1.0);
    const double p1 = std::norm(first_order_amplitude(s, p, 0, 1, 5.0).amplitude);
    const double p2 = std::norm(first_order_amplitude(s, p, 0, 1, 10.0).amplitude);
    EXPECT_NEAR(p2 / p1, 4.0, 1e-12);
}

TEST(Integrator, NoCouplingStaysPut) {
    const DiscreteSpectrum s({0.0, 1.0, 2.5});
    const HarmonicPerturbation p(HermitianOperator::zero(3), 1.0);
    const auto run = integrate_interaction_picture(s, p, 1, 10.0, 2000);
    EXPECT_EQ(run.amplitudes[0], complex(0.0));
    EXPECT_EQ(run.amplitudes[1], complex(1.0));
}

TEST(Integrator, RejectsCoarseStep) {
    const DiscreteSpectrum s({0.0, 1.0});
    const HarmonicPerturbation p(two_level_coupling(0.01), 1.0);
    EXPECT_THROW(integrate_interaction_picture(s, p, 0, 10.0, 100), ValidationError);
}

TEST(Integrator, NormConserved) {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteSpectrum s({0.0, 0.7, 1.9, 2.2});
        const HarmonicPerturbation p(qtest::random_hamiltonian(4, rng, 0.1), 1.2);
        const auto run = integrate_interaction_picture(s, p, 0, 30.0, 4000, 100);
        for (const auto& row : run.series) {
            double total = 0;
            for (double x : row.second) total += x;
            EXPECT_NEAR(total, 1.0, 1e-6);
        }
    }
}

TEST(Integrator, AgreesWithFirstOrderInWeakRegime) {
    const DiscreteSpectrum s({0.0, 1.0});
    const auto w = two_level_coupling(0.01);
    const HarmonicPerturbation p(w, 1.0);
    const auto run = integrate_interaction_picture(s, p, 0, 22.0, 2200, 10);
    for (const auto& [t, pops] : run.series) {
        if (t == 0.0) continue;
        ASSERT_LT(pops[1], 0.05);
        const double first = std::norm(first_order_amplitude_full(s, w, 1.0, 0, 1, t));
        EXPECT_LT(std::abs(pops[1] - first) / first, 0.1) << t;
    }
}

TEST(Integrator, RotatingWaveFormAgreesAtLargeBohrFrequency) {
    const DiscreteSpectrum s({0.0, 20.0});
    const HarmonicPerturbation p(two_level_coupling(0.01), 20.0);
    const auto run = integrate_interaction_picture(s, p, 0, 20.0, 60000);
    const double first = std::norm(first_order_amplitude(s, p, 0, 1, 20.0).amplitude);
    EXPECT_LT(std::abs(std::norm(run.amplitudes[1]) - first) / first, 0.1);
}

TEST(Integrator, RabiOscillationReachesFullTransfer) {
    const DiscreteSpectrum s({0.0, 10.0});
    const HarmonicPerturbation p(two_level_coupling(0.05), 10.0);
    // Rotating-wave Rabi period 2 pi / (2 |W|) with the 2 cos drive.
    const double half_period = std::numbers::pi / (2 * 0.05);
    const auto run = integrate_interaction_picture(s, p, 0, half_period, 40000, 100);
    double peak = 0;
    for (const auto& row : run.series) peak = std::max(peak, row.second[1]);
    EXPECT_GT(peak, 0.98);
}

TEST(FermiGoldenRule, Values) {
    EXPECT_EQ(fermi_golden_rule_rate(0.0, 3.0), 0.0);
    EXPECT_NEAR(fermi_golden_rule_rate(0.1, 10.0), 2 * std::numbers::pi * 0.01 * 10, 1e-15);
    EXPECT_NEAR(fermi_golden_rule_rate(0.3, 2.0) / fermi_golden_rule_rate(0.1, 2.0), 9.0, 1e-12);
    EXPECT_EQ(fermi_golden_rule_rate(complex(0.3, 0.4), 1.0), fermi_golden_rule_rate(0.5, 1.0));
    EXPECT_THROW(fermi_golden_rule_rate(0.1, -1.0), ValidationError);
}

TEST(ThermalDensity, Limits) {
    const auto hot = two_level_thermal_density(1.0, 2.0, 1e9);
    EXPECT_NEAR(hot.matrix()(0, 0).real(), 0.5, 1e-8);
    const auto unit = two_level_thermal_density(0.5, 1.5, 1.0);
    EXPECT_NEAR(unit.matrix()(1, 1).real() / unit.matrix()(0, 0).real(), std::exp(-1.0), 1e-9);
    const auto cold = two_level_thermal_density(0.0, 1.0, 1e-3);
    EXPECT_NEAR(cold.matrix()(0, 0).real(), 1.0, 1e-12);
    EXPECT_EQ(std::abs(unit.matrix()(0, 1)), 0.0);
    EXPECT_THROW(two_level_thermal_density(0.0, 1.0, 0.0), ValidationError);
}

TEST(EinsteinBalance, AbsorptionEqualsEmission) {
    const DiscreteSpectrum s({0.0, 1.0});
    for (complex w : {complex(0.02, 0.0), complex(0.01, -0.03)}) {
        for (double dt : {0.1, 1.0, 3.3, 10.0, 57.0}) {
            for (double omega : {0.5, 1.0, 2.0}) {
                const auto b = einstein_balance_check(s, HarmonicPerturbation(two_level_coupling(w), omega), dt);
                EXPECT_NEAR(b.absorption, b.emission, 1e-12);
                EXPECT_GT(b.absorption, 0.0);
            }
        }
    }
}
