#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qcollapse/csv.hpp"
#include "qcollapse/numerics.hpp"

using namespace qcollapse;

TEST(CompensatedSum, RecoversCancelledTerms) {
    std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(compensated_sum(xs), 2.0);
}

TEST(ShannonEntropy, ZeroTermsContributeNothing) {
    std::vector<double> p{0.5, 0.0, 0.5};
    EXPECT_NEAR(shannon_entropy(p), std::log(2.0), 1e-15);
}

TEST(ShannonEntropy, ExactUnderPermutation) {
    Rng rng(3);
    std::vector<double> p(37);
    for (auto& x : p) x = uniform01(rng);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    const double h = shannon_entropy(p);
    for (int trial = 0; trial < 50; ++trial) {
        std::shuffle(p.begin(), p.end(), rng);
        EXPECT_EQ(shannon_entropy(p), h);
    }
}

TEST(FitLine, ExactLine) {
    std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(TotalVariation, PadsShorterInput) {
    std::vector<double> p{0.5, 0.5}, q{0.5, 0.25, 0.25};
    EXPECT_NEAR(total_variation(p, q), 0.25, 1e-15);
}

TEST(StreamFor, SeedPlusIndex) {
    Rng a = stream_for(10, 5), b(15);
    EXPECT_EQ(a(), b());
}

TEST(Csv, SeventeenDigitsRoundTrip) {
    const double values[] = {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0};
    for (double v : values) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(std::nan("")), "nan");
}
