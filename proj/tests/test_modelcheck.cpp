#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hdtest/datagen.hpp"
#include "hdtest/modelcheck.hpp"

using namespace hdtest;

namespace {

Sample gaussian(Index p, Index n, std::uint64_t seed, double lam1 = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Matrix x(p, n);
    for (Index l = 0; l < n; ++l)
        for (Index i = 0; i < p; ++i) x(i, l) = z(rng);
    x.row(0) *= std::sqrt(lam1);
    return Sample(x);
}

}  // namespace

TEST(Kappa, PrintedValues) {
    EXPECT_NEAR(kappa(47), 0.286, 5e-4);
    EXPECT_NEAR(kappa(25), 0.359, 5e-4);
    EXPECT_NEAR(kappa(3), std::sqrt(std::log(3.0) / 3.0), 1e-15);
    EXPECT_NEAR(kappa(3), 0.605, 5e-4);
    EXPECT_THROW(kappa(1), Error);
}

TEST(Kappa, PowerAlternative) {
    const KappaFn k = kappa_power(0.25);
    EXPECT_NEAR(k(16), 0.5, 1e-15);
    EXPECT_THROW(kappa_power(0.5), Error);
    EXPECT_THROW(kappa_power(0.0), Error);
}

TEST(SseCheck, OneFactorDominantIsStronglySpiked) {
    int hits = 0;
    for (int r = 0; r < 200; ++r) {
        const Sample s1 = gaussian(1000, 50, 10 + 2 * r, 1000.0);
        const Sample s2 = gaussian(1000, 50, 11 + 2 * r, 1000.0);
        hits += sse_check(s1, s2).sse;
    }
    EXPECT_GE(hits, 190);
}

TEST(SseCheck, IdentityIsNotStronglySpiked) {
    int hits = 0;
    for (int r = 0; r < 200; ++r) {
        const Sample s1 = gaussian(1000, 50, 1000 + 2 * r);
        const Sample s2 = gaussian(1000, 50, 1001 + 2 * r);
        hits += !sse_check(s1, s2).sse;
    }
    EXPECT_GE(hits, 190);
}

TEST(SseCheck, ZeroNrEigenvalueForcesZeroW) {
    // lam_tilde_1 = 0 only when all n - 1 dual eigenvalues coincide (a scaled
    // regular simplex), and then W vanishes as well.
    const Index n = 6;
    const Matrix x = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    const EtaResult e = eta_hat(summarize(Sample(x)));
    EXPECT_LE(e.lam_tilde1, 1e-12);
    EXPECT_LE(std::abs(e.w), 1e-12);
}

TEST(SseCheck, EtaIsSquaredNrEigenvalueOverW) {
    const Sample x = gaussian(80, 15, 6, 20.0);
    const SampleSummary s = summarize(x);
    const EtaResult e = eta_hat(s);
    const double lt = nr_eigenvalues(s)(0);
    const double w = w_stat(x, PsdMatrix::identity(80)).value;
    ASSERT_GT(w, 0.0);
    EXPECT_NEAR(e.eta, lt * lt / w, 1e-10 * e.eta);
}

TEST(SseCheck, NonPositiveWMapsToInfinity) {
    // Constant sample: W = 0.
    Matrix x(3, 5);
    x.colwise() = Vector::Ones(3);
    const EtaResult e = eta_hat(summarize(Sample(x)));
    EXPECT_TRUE(e.nonpositive_w);
    EXPECT_TRUE(std::isinf(e.eta));
    const ModelDiagnosis d = sse_check(Sample(x), gaussian(3, 5, 1));
    EXPECT_TRUE(d.sse);
    EXPECT_TRUE(d.eta_infinite[0]);
}

TEST(SseCheck, VerdictRule) {
    const Sample a = gaussian(200, 20, 3);
    const Sample b = gaussian(200, 30, 4);
    const ModelDiagnosis d = sse_check(a, b);
    EXPECT_DOUBLE_EQ(d.kappa[0], kappa(20));
    EXPECT_DOUBLE_EQ(d.kappa[1], kappa(30));
    EXPECT_EQ(d.sse, d.eta[0] >= d.kappa[0] || d.eta[1] >= d.kappa[1]);
    EXPECT_GE(d.eta[0], 0.0);
    EXPECT_THROW(sse_check(gaussian(10, 3, 1), b), Error);
    EXPECT_THROW(sse_check(gaussian(10, 8, 1), b), Error);
}

TEST(SelectK, IdentityGivesZero) {
    int zero = 0;
    for (int r = 0; r < 200; ++r) zero += select_k(gaussian(500, 60, 2000 + r)).k_hat == 0;
    EXPECT_GE(zero, 180);
}

TEST(SelectK, TwoPlantedSpikes) {
    DistSpec spec;
    spec.cov = CovSpec::spiked({2.0 / 3.0, 0.5}, 0.3, 1.0);
    Population pop(spec, 1024);
    int two = 0;
    for (int r = 0; r < 200; ++r) {
        Rng rng = seeded_stream(31, r);
        two += select_k(pop.draw(96, rng)).k_hat == 2;
    }
    EXPECT_GE(two, 180);
}

TEST(SelectK, CapAtSmallSecondHalf) {
    // n = 6: n_(2) = 3, cap = 1.
    for (int r = 0; r < 50; ++r) {
        const SpikeSelection s = select_k(gaussian(40, 6, 3000 + r, 400.0));
        EXPECT_EQ(s.cap, 1);
        EXPECT_LE(s.k_hat, 1);
    }
}

TEST(SelectK, ZeroTailReturnsCap) {
    Matrix x(5, 10);
    x.colwise() = Vector::Ones(5);
    const SpikeSelection s = select_k(Sample(x));
    EXPECT_EQ(s.k_hat, s.cap);
    EXPECT_EQ(s.cap, 3);
}

TEST(SelectK, ScaleInvariantAndRatiosInUnitInterval) {
    for (int r = 0; r < 20; ++r) {
        const Sample s = gaussian(300, 30, 4000 + r, 100.0);
        const Sample scaled(Matrix(7.5 * s.data()));
        EXPECT_EQ(select_k(s).k_hat, select_k(scaled).k_hat);
        const CdmEstimate c = cdm_estimates(s);
        for (Index j = 0; j + 1 < c.psi.size(); ++j) {
            if (c.singular_values(j) > 0) {
                const double tau = c.psi(j + 1) / c.psi(j);
                EXPECT_GE(tau, 0.0);
                EXPECT_LT(tau, 1.0);
            }
        }
    }
}

TEST(SelectK, TraceRecordsScaledRatios) {
    const Sample s = gaussian(300, 30, 5, 300.0);
    const CdmEstimate c = cdm_estimates(s);
    const SpikeSelection sel = select_k(c, 30);
    ASSERT_EQ(static_cast<Index>(sel.tau_tilde.size()), sel.k_hat + 1);
    for (std::size_t j = 0; j < sel.tau_tilde.size(); ++j) {
        const double expected = c.psi(j + 1) / c.psi(j) * (1.0 + (j + 1) * kappa(30));
        EXPECT_DOUBLE_EQ(sel.tau_tilde[j], expected);
        EXPECT_EQ(sel.tau_tilde[j] > 1.0, j + 1 == sel.tau_tilde.size());
    }
}

TEST(SelectK, NeedsSixObservations) { EXPECT_THROW(select_k(gaussian(20, 5, 1)), Error); }

TEST(Diagnose, FillsEveryField) {
    DistSpec spec;
    spec.cov = CovSpec::spiked({2.0 / 3.0, 0.5}, 0.3, 1.0);
    const Sample a = draw_sample(spec, 1024, 96, 8);
    const Sample b = draw_sample(spec, 1024, 96, 9);
    const ModelDiagnosis d = diagnose(a, b);
    EXPECT_TRUE(d.sse);
    EXPECT_EQ(d.k_hat[0], 2);
    EXPECT_EQ(d.k_hat[1], 2);
    EXPECT_EQ(d.tau_trace[0].size(), 3u);
    EXPECT_THROW(diagnose(gaussian(10, 5, 1), gaussian(10, 8, 2)), Error);
}
