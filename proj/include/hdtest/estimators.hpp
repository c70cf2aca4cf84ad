#pragma once

// U-statistic and spectral estimators: the unbiased trace-square estimator
// W_n(A), the variance estimate K1_hat(A), noise-reduced (NR) eigenvalues and
// eigenvectors, bias-reduced leave-one-out score vectors and the
// cross-data-matrix (CDM) tail-energy estimates.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "hdtest/matcore.hpp"

namespace hdtest {

struct TraceSquareEstimate {
    double value = 0.0;  // unbiased for tr(Sigma_A^2)
    Index n_used = 0;
};

namespace detail {

// Inclusion-exclusion reduction of the three permutation sums over a
// symmetric Gram matrix B:
//   s2 = sum_{i!=j} B_ij^2
//   s3 = sum_{i,j,s distinct} B_ij B_js
//   s4 = sum_{i,j,s,t distinct} B_ij B_st
struct PermutationSums {
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
};

inline PermutationSums permutation_sums(const Matrix& b) {
    const Vector diag = b.diagonal();
    const Vector off_row = b.rowwise().sum() - diag;
    const double total_off = off_row.sum();
    PermutationSums out;
    out.s2 = b.squaredNorm() - diag.squaredNorm();
    out.s3 = off_row.squaredNorm() - out.s2;
    out.s4 = total_off * total_off - 4.0 * out.s3 - 2.0 * out.s2;
    return out;
}

inline double w_from_gram(const Matrix& b) {
    const double n = static_cast<double>(b.rows());
    const auto sums = permutation_sums(b);
    const double p2 = n * (n - 1.0);
    const double p3 = p2 * (n - 2.0);
    const double p4 = p3 * (n - 3.0);
    return sums.s2 / p2 - 2.0 * sums.s3 / p3 + sums.s4 / p4;
}

}  // namespace detail

/// W_n(A). The statistic is location invariant, so it is evaluated on the
/// centred data, which keeps the inclusion-exclusion sums well conditioned.
inline TraceSquareEstimate w_stat(const SampleSummary& summary, const PsdMatrix& a) {
    require(summary.n() >= 4, ErrorCode::TooFewObservations, "w_stat needs n >= 4");
    const Matrix b = summary.centered.transpose() * a.apply(summary.centered);
    return {detail::w_from_gram(0.5 * (b + b.transpose())), summary.n()};
}

inline TraceSquareEstimate w_stat(const Sample& sample, const PsdMatrix& a) {
    require_observations(sample, 4, "w_stat");
    return w_stat(summarize(sample), a);
}

/// W_n(I) straight from the dual covariance: B = (n - 1) S_D.
inline double w_identity(const SampleSummary& summary) {
    require(summary.n() >= 4, ErrorCode::TooFewObservations, "w_stat needs n >= 4");
    return detail::w_from_gram(summary.dual_cov * static_cast<double>(summary.n() - 1));
}

/// tr(S_1 A_1 S_2 A_2) for symmetric weights, computed on the n1 x n2 side.
inline double cross_trace(const SampleSummary& s1, const SampleSummary& s2, const PsdMatrix& a1,
                          const PsdMatrix& a2) {
    const double denom = static_cast<double>(s1.n() - 1) * static_cast<double>(s2.n() - 1);
    const Matrix left = s1.centered.transpose() * a1.apply(s2.centered);
    if (&a1 == &a2) return left.squaredNorm() / denom;
    const Matrix right = s1.centered.transpose() * a2.apply(s2.centered);
    return left.cwiseProduct(right).sum() / denom;
}

/// K1_hat(A) = 2 sum_i W_i(A) / (n_i (n_i - 1)) + 4 tr(S_1 A S_2 A) / (n_1 n_2).
/// May be negative; callers decide how to guard.
inline double k1_hat(const SampleSummary& s1, const SampleSummary& s2, const PsdMatrix& a) {
    require(s1.p() == s2.p(), ErrorCode::DimensionMismatch, "k1_hat dimension mismatch");
    const double n1 = static_cast<double>(s1.n());
    const double n2 = static_cast<double>(s2.n());
    const double w1 = w_stat(s1, a).value;
    const double w2 = w_stat(s2, a).value;
    return 2.0 * (w1 / (n1 * (n1 - 1.0)) + w2 / (n2 * (n2 - 1.0))) + 4.0 * cross_trace(s1, s2, a, a) / (n1 * n2);
}

inline double k1_hat(const Sample& s1, const Sample& s2, const PsdMatrix& a) {
    require_same_dimension(s1, s2);
    require_observations(s1, 4, "k1_hat");
    require_observations(s2, 4, "k1_hat");
    return k1_hat(summarize(s1), summarize(s2), a);
}

/// NR eigenvalues for j = 1..n-2 (0-based entries 0..n-3).
inline Vector nr_eigenvalues(const SampleSummary& summary, const DualEigen& eig) {
    const Index n = summary.n();
    require(n >= 3, ErrorCode::TooFewObservations, "nr_eigenvalues needs n >= 3");
    Vector out(n - 2);
    double cumulative = 0.0;
    for (Index j = 0; j < n - 2; ++j) {
        cumulative += eig.values(j);
        const double residual = std::max(summary.trace_cov - cumulative, 0.0);
        const double shrink = residual / static_cast<double>(n - 2 - j);
        out(j) = std::max(eig.values(j) - shrink, 0.0);
    }
    return out;
}

inline Vector nr_eigenvalues(const SampleSummary& summary) { return nr_eigenvalues(summary, dual_eigen(summary)); }

namespace detail {

inline void require_positive_nr(const Vector& lam_tilde, const Vector& lam_hat, Index k) {
    require(k >= 0 && k <= lam_tilde.size(), ErrorCode::BadArgument,
            "requested " + std::to_string(k) + " NR components, only " + std::to_string(lam_tilde.size()) +
                " available");
    const double top = lam_hat.size() > 0 ? lam_hat(0) : 0.0;
    for (Index j = 0; j < k; ++j) {
        if (!(lam_tilde(j) > kRelativeZero * top) || !(top > 0.0)) {
            fail(ErrorCode::DegenerateEigenvalue,
                 "NR eigenvalue " + std::to_string(j + 1) + " is not positive");
        }
    }
}

}  // namespace detail

/// NR eigenvectors h_tilde_j = {(n-1) lam_tilde_j}^{-1/2} (X - Xbar) u_j, j < k, as columns.
/// These are not unit vectors: ||h_tilde_j||^2 = lam_hat_j / lam_tilde_j.
inline Matrix nr_eigenvectors(const SampleSummary& summary, const DualEigen& eig, const Vector& lam_tilde,
                              Index k) {
    detail::require_positive_nr(lam_tilde, eig.values, k);
    Matrix h(summary.p(), k);
    const double nm1 = static_cast<double>(summary.n() - 1);
    for (Index j = 0; j < k; ++j) {
        h.col(j) = summary.centered * eig.vectors.col(j) / std::sqrt(nm1 * lam_tilde(j));
    }
    return h;
}

inline Matrix nr_eigenvectors(const SampleSummary& summary, Index k) {
    const DualEigen eig = dual_eigen(summary);
    return nr_eigenvectors(summary, eig, nr_eigenvalues(summary, eig), k);
}

/// (n - 1)^{1/2} / (n - 2)
inline double score_constant(Index n) {
    return std::sqrt(static_cast<double>(n - 1)) / static_cast<double>(n - 2);
}

/// Bias-reduced score vectors. `vectors[j]` is p x n with column l equal to
/// h_tilde_{jl}; scores(j, l) = h_tilde_{jl}^T x_l.
struct ScoreVectors {
    std::vector<Matrix> vectors;
    Matrix scores;
};

inline ScoreVectors score_vectors(const SampleSummary& summary, const Sample& sample, const DualEigen& eig,
                                  const Vector& lam_tilde, Index k) {
    const Index n = summary.n();
    require(n >= 4, ErrorCode::TooFewObservations, "score_vectors needs n >= 4");
    detail::require_positive_nr(lam_tilde, eig.values, k);
    const double cn = score_constant(n);
    const double loo = static_cast<double>(n) / static_cast<double>(n - 1);
    ScoreVectors out;
    out.scores.resize(k, n);
    for (Index j = 0; j < k; ++j) {
        const auto u = eig.vectors.col(j);
        const Vector base = summary.centered * u;
        const double scale = cn / std::sqrt(lam_tilde(j));
        Matrix hj(summary.p(), n);
        for (Index l = 0; l < n; ++l) {
            // u_{jl} equals u_j with its l-th entry replaced by -u_jl / (n - 1).
            hj.col(l) = scale * (base - loo * u(l) * summary.centered.col(l));
            out.scores(j, l) = hj.col(l).dot(sample.observation(l));
        }
        out.vectors.push_back(std::move(hj));
    }
    return out;
}

inline ScoreVectors score_vectors(const SampleSummary& summary, const Sample& sample, Index k) {
    const DualEigen eig = dual_eigen(summary);
    return score_vectors(summary, sample, eig, nr_eigenvalues(summary, eig), k);
}

/// Scores only, evaluated through the n x n matrix (X - Xbar)^T X without forming
/// the p x n leave-one-out vectors.
inline Matrix scores_via_gram(const SampleSummary& summary, const Sample& sample, const DualEigen& eig,
                              const Vector& lam_tilde, Index k) {
    const Index n = summary.n();
    require(n >= 4, ErrorCode::TooFewObservations, "score_vectors needs n >= 4");
    detail::require_positive_nr(lam_tilde, eig.values, k);
    const Matrix cross = summary.centered.transpose() * sample.data();  // (x_s - xbar)^T x_l
    const Vector self = cross.diagonal();
    const double cn = score_constant(n);
    const double loo = static_cast<double>(n) / static_cast<double>(n - 1);
    Matrix scores(k, n);
    for (Index j = 0; j < k; ++j) {
        const auto u = eig.vectors.col(j);
        const double scale = cn / std::sqrt(lam_tilde(j));
        scores.row(j) = scale * (cross.transpose() * u - loo * u.cwiseProduct(self)).transpose();
    }
    return scores;
}

/// CDM singular values and tail energies. psi(j) (0-based) estimates
/// Psi_(j+1) = sum_{s > j} lambda_s^2, for j = 0..n_(2)-1; the last entry is zero.
struct CdmEstimate {
    Vector singular_values;  // length n_(2) - 1
    Vector psi;              // length n_(2)
    Index n_first = 0;
    Index n_second = 0;
};

inline CdmEstimate cdm_estimates(const Sample& sample) {
    require_observations(sample, 6, "cdm_estimates");
    const Index n = sample.n();
    CdmEstimate out;
    out.n_first = (n + 1) / 2;
    out.n_second = n - out.n_first;
    const auto x1 = sample.data().leftCols(out.n_first);
    const auto x2 = sample.data().rightCols(out.n_second);
    const Matrix c1 = x1.colwise() - x1.rowwise().mean();
    const Matrix c2 = x2.colwise() - x2.rowwise().mean();
    const double scale =
        1.0 / std::sqrt(static_cast<double>(out.n_first - 1) * static_cast<double>(out.n_second - 1));
    const Matrix cross = (c1.transpose() * c2) * scale;
    Eigen::JacobiSVD<Matrix> svd(cross);
    const Vector sv = svd.singularValues();
    const Index kept = out.n_second - 1;  // rank of the cross matrix is at most n_(2) - 1
    out.singular_values = sv.head(kept);
    out.psi = Vector::Zero(out.n_second);
    double tail = 0.0;
    for (Index j = kept - 1; j >= 0; --j) {
        tail += out.singular_values(j) * out.singular_values(j);
        out.psi(j) = tail;
    }
    return out;
}

/// Everything the eigenstructure-adjusted procedures need from one population.
struct SpectralEstimate {
    SampleSummary summary;
    DualEigen eig;
    Vector lam_hat;
    Vector lam_tilde;
    Matrix h_hat;    // p x k unit eigenvectors of S_n
    Matrix h_tilde;  // p x k NR vectors
    Matrix scores;   // k x n, x_tilde_{jl}
    CdmEstimate cdm;
    double c_n = 0.0;
    Index k = 0;
};

inline SpectralEstimate spectral_estimate(const Sample& sample, Index k) {
    require_observations(sample, 6, "spectral_estimate");
    SpectralEstimate est;
    est.summary = summarize(sample);
    est.eig = dual_eigen(est.summary);
    est.lam_hat = est.eig.values;
    est.lam_tilde = nr_eigenvalues(est.summary, est.eig);
    require(k >= 0 && k <= est.lam_tilde.size(), ErrorCode::BadArgument,
            "spike count " + std::to_string(k) + " exceeds the " + std::to_string(est.lam_tilde.size()) +
                " available noise-reduced eigenvalues");
    est.k = k;
    est.h_tilde = nr_eigenvectors(est.summary, est.eig, est.lam_tilde, k);
    est.h_hat.resize(sample.p(), k);
    for (Index j = 0; j < k; ++j) est.h_hat.col(j) = full_eigenvector(est.summary, est.eig, j);
    est.scores = scores_via_gram(est.summary, sample, est.eig, est.lam_tilde, k);
    est.cdm = cdm_estimates(sample);
    est.c_n = score_constant(sample.n());
    return est;
}

}  // namespace hdtest
