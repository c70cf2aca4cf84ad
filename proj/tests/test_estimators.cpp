#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hdtest/datagen.hpp"
#include "hdtest/estimators.hpp"

using namespace hdtest;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(shift, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
    return m;
}

// Literal three-term U-statistic over distinct index tuples.
double w_oracle(const Matrix& x, const Matrix& a) {
    const Index n = x.cols();
    Matrix b(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) b(i, j) = x.col(i).dot(a * x.col(j));
    const double nn = static_cast<double>(n);
    const double p2 = nn * (nn - 1);
    const double p3 = p2 * (nn - 2);
    const double p4 = p3 * (nn - 3);
    double t2 = 0, t3 = 0, t4 = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            t2 += b(i, j) * b(i, j);
            for (Index s = 0; s < n; ++s) {
                if (s == i || s == j) continue;
                t3 += b(i, j) * b(j, s);
                for (Index t = 0; t < n; ++t) {
                    if (t == i || t == j || t == s) continue;
                    t4 += b(i, j) * b(s, t);
                }
            }
        }
    return t2 / p2 - 2.0 * t3 / p3 + t4 / p4;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Sample spiked_sample(Index p, Index n, double lam1, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Matrix x(p, n);
    for (Index l = 0; l < n; ++l)
        for (Index i = 0; i < p; ++i) x(i, l) = z(rng);
    x.row(0) *= std::sqrt(lam1);
    return Sample(x);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST(WStat, MatchesLiteralQuadrupleSum) {
    std::uint64_t seed = 1;
    for (Index n = 4; n <= 8; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            const Index p = 3 + rep;
            const Matrix x = random_matrix(p, n, seed++, 0.7);
            const Matrix g = random_matrix(p, p, seed++);
            const Matrix dense = g * g.transpose();
            const Vector d = random_matrix(p, 1, seed++).cwiseAbs();
            for (const PsdMatrix& a : {PsdMatrix::identity(p), PsdMatrix::diagonal(d), PsdMatrix::dense(dense)}) {
                const double fast = w_stat(Sample(x), a).value;
                const double slow = w_oracle(x, a.to_dense());
                EXPECT_LE(rel_err(fast, slow), 1e-9) << "n=" << n << " p=" << p;
            }
        }
    }
}

TEST(WStat, AxisPairsExample) {
    Matrix x(2, 4);
    x << 1, -1, 0, 0, 0, 0, 1, -1;
    const double fast = w_stat(Sample(x), PsdMatrix::identity(2)).value;
    EXPECT_LE(rel_err(fast, w_oracle(x, Matrix::Identity(2, 2))), 1e-9);
}

TEST(WStat, IdenticalObservationsGiveZero) {
    Matrix x(3, 6);
    x.colwise() = Vector::LinSpaced(3, -1.0, 4.0);
    EXPECT_EQ(w_stat(Sample(x), PsdMatrix::identity(3)).value, 0.0);
    EXPECT_NEAR(w_oracle(x, Matrix::Identity(3, 3)), 0.0, 1e-9);
}

TEST(WStat, NeedsFourObservations) {
    EXPECT_THROW(w_stat(Sample(random_matrix(3, 3, 9)), PsdMatrix::identity(3)), Error);
}

TEST(WStat, IdentityShortcutAgrees) {
    const Sample s(random_matrix(20, 9, 3, 2.0));
    EXPECT_LE(rel_err(w_identity(summarize(s)), w_stat(s, PsdMatrix::identity(20)).value), 1e-10);
}

TEST(WStat, UnbiasedForTraceOfSquare) {
    DistSpec spec;
    Population pop(spec, 10);
    const int reps = 4000;
    double sum = 0, sum2 = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = seeded_stream(77, r);
        const double w = w_stat(pop.draw(20, rng), PsdMatrix::identity(10)).value;
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    EXPECT_LE(std::abs(mean - 10.0), 3.0 * se);
}

TEST(K1Hat, ConstantSamplesAndZeroWeight) {
    Matrix c(4, 5);
    c.colwise() = Vector::LinSpaced(4, 1.0, 2.0);
    EXPECT_EQ(k1_hat(Sample(c), Sample(c), PsdMatrix::identity(4)), 0.0);
    const Sample a(random_matrix(4, 6, 4));
    const Sample b(random_matrix(4, 7, 5));
    EXPECT_EQ(k1_hat(a, b, PsdMatrix::zero(4)), 0.0);
}

TEST(K1Hat, CrossTraceMatchesDenseProduct) {
    const Sample a(random_matrix(6, 7, 6, 1.0));
    const Sample b(random_matrix(6, 5, 7, -1.0));
    const Matrix g = random_matrix(6, 6, 8);
    const PsdMatrix w = PsdMatrix::dense(g * g.transpose());
    const SampleSummary sa = summarize(a), sb = summarize(b);
    const Matrix wd = w.to_dense();
    const double dense = (sa.cov() * wd * sb.cov() * wd).trace();
    EXPECT_LE(rel_err(cross_trace(sa, sb, w, w), dense), 1e-10);
}

TEST(K1Hat, UnbiasedUnderIdentityCovariance) {
    DistSpec spec;
    Population pop(spec, 10);
    const double truth = 2.0 * (10.0 / (20.0 * 19.0) * 2.0) + 40.0 / 400.0;
    const int reps = 3000;
    double sum = 0, sum2 = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = seeded_stream(78, r);
        const Sample s1 = pop.draw(20, rng);
        const Sample s2 = pop.draw(20, rng);
        const double k = k1_hat(s1, s2, PsdMatrix::identity(10));
        sum += k;
        sum2 += k * k;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    EXPECT_LE(std::abs(mean - truth), 3.0 * se);
}

TEST(NrEigenvalues, HandComputedCase) {
    // Dual eigenvalues (3, 1) with n = 3.
    Matrix x(2, 3);
    x << std::sqrt(3.0), -std::sqrt(3.0), 0, 1 / std::sqrt(3.0), 1 / std::sqrt(3.0), -2 / std::sqrt(3.0);
    const SampleSummary s = summarize(Sample(x));
    const DualEigen e = dual_eigen(s);
    EXPECT_NEAR(e.values(0), 3.0, 1e-12);
    EXPECT_NEAR(e.values(1), 1.0, 1e-12);
    const Vector lt = nr_eigenvalues(s, e);
    ASSERT_EQ(lt.size(), 1);
    EXPECT_NEAR(lt(0), 2.0, 1e-12);
}

TEST(NrEigenvalues, ZeroDualCovariance) {
    Matrix x(5, 6);
    x.colwise() = Vector::Ones(5);
    const Vector lt = nr_eigenvalues(summarize(Sample(x)));
    EXPECT_EQ(lt.size(), 4);
    EXPECT_EQ(lt.cwiseAbs().maxCoeff(), 0.0);
}

TEST(NrEigenvalues, NeverExceedSampleEigenvalues) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SampleSummary s = summarize(Sample(random_matrix(30, 10, 200 + seed)));
        const DualEigen e = dual_eigen(s);
        const Vector lt = nr_eigenvalues(s, e);
        for (Index j = 0; j < lt.size(); ++j) {
            EXPECT_GE(lt(j), 0.0);
            EXPECT_LE(lt(j), e.values(j));
        }
    }
}

TEST(NrEigenvectors, NormIdentity) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SampleSummary s = summarize(Sample(random_matrix(40, 12, 300 + seed)));
        const DualEigen e = dual_eigen(s);
        const Vector lt = nr_eigenvalues(s, e);
        const Matrix h = nr_eigenvectors(s, e, lt, 5);
        for (Index j = 0; j < 5; ++j) EXPECT_LE(rel_err(h.col(j).squaredNorm() * lt(j), e.values(j)), 1e-8);
    }
}

TEST(NrEigenvectors, NoiselessFactor) {
    const Vector dir = Vector::LinSpaced(50, 1.0, 2.0).normalized();
    const Vector f = random_matrix(1, 15, 9).row(0).transpose();
    const Matrix x = dir * f.transpose();
    const Matrix h = nr_eigenvectors(summarize(Sample(x)), 1);
    // lam_tilde_1 = lam_hat_1 when the residual trace is zero, so h is the unit direction.
    EXPECT_NEAR(std::abs(h.col(0).dot(dir)), 1.0, 1e-10);
}

TEST(NrEigenvectors, ZeroEigenvalueRejected) {
    Matrix x(5, 6);
    x.colwise() = Vector::Ones(5);
    EXPECT_THROW(nr_eigenvectors(summarize(Sample(x)), 1), Error);
}

TEST(ScoreVectors, LiteralLeaveOneOutConstruction) {
    const Sample sample(random_matrix(25, 9, 10, 0.5));
    const SampleSummary s = summarize(sample);
    const DualEigen e = dual_eigen(s);
    const Vector lt = nr_eigenvalues(s, e);
    const Index k = 3;
    const ScoreVectors sv = score_vectors(s, sample, e, lt, k);
    const double n = 9.0;
    const double cn = std::sqrt(n - 1) / (n - 2);
    for (Index j = 0; j < k; ++j) {
        for (Index l = 0; l < 9; ++l) {
            Vector u = e.vectors.col(j);
            u(l) = -u(l) / (n - 1);
            const Vector h = cn / std::sqrt(lt(j)) * (s.centered * u);
            EXPECT_LE((h - sv.vectors[j].col(l)).norm(), 1e-10 * h.norm());
            EXPECT_NEAR(sv.scores(j, l), h.dot(sample.observation(l)), 1e-9 * std::max(1.0, std::abs(sv.scores(j, l))));
        }
    }
    EXPECT_LE((scores_via_gram(s, sample, e, lt, k) - sv.scores).cwiseAbs().maxCoeff(),
              1e-9 * sv.scores.cwiseAbs().maxCoeff());
}

TEST(ScoreVectors, MeanOfLeaveOneOutVectorsIsNrVector) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Sample sample(random_matrix(30, 11, 400 + seed, -1.0));
        const SampleSummary s = summarize(sample);
        const DualEigen e = dual_eigen(s);
        const Vector lt = nr_eigenvalues(s, e);
        const ScoreVectors sv = score_vectors(s, sample, e, lt, 4);
        const Matrix h = nr_eigenvectors(s, e, lt, 4);
        for (Index j = 0; j < 4; ++j) {
            const Vector mean = sv.vectors[j].rowwise().mean();
            EXPECT_LE((mean - h.col(j)).norm(), 1e-8 * h.col(j).norm());
        }
    }
}

TEST(ScoreVectors, NoiselessFactorScores) {
    // x_l = f_l d: the score equals f_l (n-1)/(n-2) {1 - n (f_l - fbar)^2 / ((n-1) |f - fbar|^2)},
    // which tends to the true score f_l = d^T x_l as n grows.
    const Index n = 400;
    const Vector dir = Vector::LinSpaced(40, -1.0, 3.0).normalized();
    const Vector f = random_matrix(1, n, 11).row(0).transpose();
    const Sample sample(Matrix(dir * f.transpose()));
    const Vector sc = score_vectors(summarize(sample), sample, 1).scores.row(0).transpose();
    const double sign = sc.dot(f) > 0 ? 1.0 : -1.0;
    const Vector fc = f.array() - f.mean();
    const double nn = static_cast<double>(n);
    double worst = 0.0;
    for (Index l = 0; l < n; ++l) {
        const double exact = f(l) * (nn - 1) / (nn - 2) * (1.0 - nn * fc(l) * fc(l) / ((nn - 1) * fc.squaredNorm()));
        EXPECT_NEAR(sign * sc(l), exact, 1e-9 * std::max(1.0, std::abs(exact)));
        worst = std::max(worst, std::abs(sign * sc(l) - f(l)));
    }
    EXPECT_LE(worst, 0.05 * f.cwiseAbs().maxCoeff());
}

TEST(ScoreVectors, ScoresTrackTrueComponent) {
    const Index p = 2000, n = 60;
    const double lam1 = 0.1 * p;
    int good = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const Sample sample = spiked_sample(p, n, lam1, 500 + r);
        const Matrix sc = score_vectors(summarize(sample), sample, 1).scores;
        const Vector truth = sample.data().row(0).transpose();
        const Vector est = sc.row(0).transpose();
        const Vector a = truth.array() - truth.mean();
        const Vector b = est.array() - est.mean();
        const double corr = std::abs(a.dot(b)) / (a.norm() * b.norm());
        good += corr > 0.9;
    }
    EXPECT_GE(good, 90);
}

TEST(NrEigenvalues, NoiseReductionBeatsSampleEigenvalue) {
    const Index p = 2000, n = 60;
    const double lam1 = 0.1 * p;  // alpha_1 = 1 spike
    const double delta1 = (p - 1.0) / ((n - 1.0) * lam1);
    std::vector<double> tilde, hat, align;
    int aligned = 0;
    for (int r = 0; r < 200; ++r) {
        const Sample sample = spiked_sample(p, n, lam1, 1000 + r);
        const SampleSummary s = summarize(sample);
        const DualEigen e = dual_eigen(s);
        const Vector lt = nr_eigenvalues(s, e);
        tilde.push_back(lt(0) / lam1);
        hat.push_back(e.values(0) / lam1);
        const Matrix h = nr_eigenvectors(s, e, lt, 1);
        aligned += h(0, 0) * h(0, 0) >= 0.8;
    }
    const double mt = median(tilde);
    EXPECT_GE(mt, 0.8);
    EXPECT_LE(mt, 1.2);
    EXPECT_GT(median(hat), 1.0 + delta1 / 2.0);
    EXPECT_GE(aligned, 180);
}

TEST(Cdm, ConstantSample) {
    Matrix x(4, 8);
    x.colwise() = Vector::Constant(4, 2.5);
    const CdmEstimate c = cdm_estimates(Sample(x));
    EXPECT_EQ(c.singular_values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(c.psi.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cdm, SplitTelescopingAndMonotonicity) {
    for (Index n = 6; n <= 13; ++n) {
        const Sample sample(random_matrix(30, n, 600 + n, 1.0));
        const CdmEstimate c = cdm_estimates(sample);
        EXPECT_EQ(c.n_first, (n + 1) / 2);
        EXPECT_EQ(c.n_second, n - (n + 1) / 2);
        ASSERT_EQ(c.psi.size(), c.n_second);
        EXPECT_EQ(c.psi(c.n_second - 1), 0.0);
        for (Index j = 0; j + 1 < c.psi.size(); ++j) {
            EXPECT_NEAR(c.psi(j) - c.psi(j + 1), c.singular_values(j) * c.singular_values(j), 1e-12 * c.psi(0));
            EXPECT_GE(c.psi(j + 1), 0.0);
            EXPECT_LE(c.psi(j + 1), c.psi(j));
        }
        // Psi_(1) is the squared Frobenius norm of the scaled cross matrix.
        const Index n1 = c.n_first, n2 = c.n_second;
        const Matrix x1 = sample.data().leftCols(n1).colwise() - sample.data().leftCols(n1).rowwise().mean();
        const Matrix x2 = sample.data().rightCols(n2).colwise() - sample.data().rightCols(n2).rowwise().mean();
        const double frob = (x1.transpose() * x2).squaredNorm() / ((n1 - 1.0) * (n2 - 1.0));
        EXPECT_LE(rel_err(c.psi(0), frob), 1e-10);
    }
}

TEST(Cdm, NeedsSixObservations) { EXPECT_THROW(cdm_estimates(Sample(random_matrix(5, 5, 1))), Error); }

TEST(Cdm, DependsOnOrderButNotInExpectation) {
    const Sample sample(random_matrix(15, 12, 700));
    Matrix permuted = sample.data();
    std::swap_ranges(permuted.col(0).data(), permuted.col(0).data() + 15, permuted.col(11).data());
    EXPECT_NE(cdm_estimates(sample).psi(0), cdm_estimates(Sample(permuted)).psi(0));

    DistSpec spec;
    Population pop(spec, 10);
    const int reps = 3000;
    double s_fwd = 0, s2_fwd = 0, s_rev = 0, s2_rev = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = seeded_stream(79, r);
        const Sample x = pop.draw(20, rng);
        const double a = cdm_estimates(x).psi(0);
        const double b = cdm_estimates(Sample(Matrix(x.data().rowwise().reverse()))).psi(0);
        s_fwd += a;
        s2_fwd += a * a;
        s_rev += b;
        s2_rev += b * b;
    }
    for (auto [s, s2] : {std::pair{s_fwd, s2_fwd}, std::pair{s_rev, s2_rev}}) {
        const double mean = s / reps;
        const double se = std::sqrt((s2 / reps - mean * mean) / reps);
        EXPECT_LE(std::abs(mean - 10.0), 3.0 * se);
    }
}

TEST(SpectralEstimate, BundlesConsistentPieces) {
    const Sample sample = spiked_sample(100, 20, 50.0, 800);
    const SpectralEstimate e = spectral_estimate(sample, 2);
    EXPECT_EQ(e.k, 2);
    EXPECT_EQ(e.h_hat.cols(), 2);
    EXPECT_EQ(e.h_tilde.cols(), 2);
    EXPECT_EQ(e.scores.rows(), 2);
    EXPECT_EQ(e.scores.cols(), 20);
    EXPECT_DOUBLE_EQ(e.c_n, std::sqrt(19.0) / 18.0);
    EXPECT_EQ(e.lam_tilde.size(), 18);
    EXPECT_LE((e.h_hat.transpose() * e.h_hat - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}
