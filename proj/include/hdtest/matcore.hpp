#pragma once

// Dense primitives shared by the estimators and test procedures: the data
// container, its mean/covariance summary, the dual (n x n) eigendecomposition
// and a small positive-semidefinite weight-matrix type.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdtest/error.hpp"

namespace hdtest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One population's data, p variables (rows) by n observations (columns).
class Sample {
public:
    Sample() = default;

    explicit Sample(Matrix data) : data_(std::move(data)) {
        require(data_.rows() > 0, ErrorCode::BadDimension, "sample must have p >= 1 variables");
        require(data_.cols() > 0, ErrorCode::TooFewObservations, "sample must have n >= 1 observations");
        require(data_.allFinite(), ErrorCode::NonFiniteData, "sample contains non-finite entries");
    }

    const Matrix& data() const noexcept { return data_; }
    Index p() const noexcept { return data_.rows(); }
    Index n() const noexcept { return data_.cols(); }
    auto observation(Index l) const { return data_.col(l); }

private:
    Matrix data_;
};

inline void require_observations(const Sample& s, Index minimum, const char* what) {
    if (s.n() < minimum) {
        fail(ErrorCode::TooFewObservations,
             std::string(what) + " needs n >= " + std::to_string(minimum) + ", got n = " +
                 std::to_string(s.n()));
    }
}

inline void require_same_dimension(const Sample& a, const Sample& b) {
    if (a.p() != b.p()) {
        fail(ErrorCode::DimensionMismatch, "samples have p = " + std::to_string(a.p()) + " and p = " +
                                               std::to_string(b.p()));
    }
}

/// Mean, centred data and the dual covariance S_D = (X - Xbar)^T (X - Xbar) / (n - 1).
///
/// The p x p covariance is materialised only on request through cov(); every
/// downstream computation works through the n x n dual matrix.
struct SampleSummary {
    Vector mean;
    Matrix centered;  // p x n, column l is x_l - mean
    Matrix dual_cov;  // n x n
    double trace_cov = 0.0;

    Index p() const noexcept { return centered.rows(); }
    Index n() const noexcept { return centered.cols(); }

    Matrix cov() const {
        return centered * centered.transpose() / static_cast<double>(n() - 1);
    }
};

inline SampleSummary summarize(const Sample& sample) {
    require_observations(sample, 2, "summarize");
    require(sample.data().allFinite(), ErrorCode::NonFiniteData, "sample contains non-finite entries");
    SampleSummary s;
    s.mean = sample.data().rowwise().mean();
    s.centered = sample.data().colwise() - s.mean;
    const double scale = 1.0 / static_cast<double>(sample.n() - 1);
    s.dual_cov = (s.centered.transpose() * s.centered) * scale;
    s.dual_cov = 0.5 * (s.dual_cov + s.dual_cov.transpose()).eval();
    s.trace_cov = s.dual_cov.trace();
    return s;
}

/// Leading n - 1 eigenpairs of S_D in descending order. Column j of `vectors`
/// is u_j (length n).
struct DualEigen {
    Vector values;
    Matrix vectors;

    Index size() const noexcept { return values.size(); }
};

/// Eigenvalues at or below this fraction of the largest one are treated as zero.
inline constexpr double kRelativeZero = 1e-12;

namespace detail {

// Largest-magnitude component positive; ties go to the lowest index.
inline void canonical_sign(Eigen::Ref<Vector> v) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            arg = i;
        }
    }
    if (v(arg) < 0.0) v = -v;
}

}  // namespace detail

inline DualEigen dual_eigen(const SampleSummary& summary) {
    const Index n = summary.n();
    require(n >= 2, ErrorCode::TooFewObservations, "dual_eigen needs n >= 2");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(summary.dual_cov);
    if (solver.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "dual eigendecomposition did not converge");

    // Eigen returns ascending order; the smallest eigenvalue belongs to the
    // direction of the ones vector (S_D 1 = 0) and is dropped.
    const Index keep = n - 1;
    DualEigen out;
    out.values.resize(keep);
    out.vectors.resize(n, keep);
    for (Index j = 0; j < keep; ++j) {
        out.values(j) = solver.eigenvalues()(n - 1 - j);
        out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    }
    const double top = std::max(out.values(0), 0.0);
    for (Index j = 0; j < keep; ++j) {
        if (out.values(j) <= kRelativeZero * top) out.values(j) = 0.0;
        if (out.values(j) > 0.0) {
            // Remove the numerically tiny component along 1 so that 1^T u_j = 0 holds tightly.
            auto u = out.vectors.col(j);
            u.array() -= u.mean();
            u.normalize();
        }
        detail::canonical_sign(out.vectors.col(j));
    }
    return out;
}

/// Unit eigenvector of S_n for the j-th (0-based) eigenvalue, recovered from the dual side.
inline Vector full_eigenvector(const SampleSummary& summary, const DualEigen& eig, Index j) {
    require(j >= 0 && j < eig.size(), ErrorCode::BadArgument, "eigen index out of range");
    const double top = eig.values(0);
    if (!(eig.values(j) > kRelativeZero * top) || !(top > 0.0)) {
        fail(ErrorCode::DegenerateEigenvalue, "eigenvalue " + std::to_string(j + 1) + " is numerically zero");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(summary.n() - 1) * eig.values(j));
    Vector h = summary.centered * eig.vectors.col(j) * scale;
    h.normalize();
    detail::canonical_sign(h);
    return h;
}

/// Positive-semidefinite weight matrix. The projection form stores an
/// orthonormal basis V of the removed directions, so A = I - V V^T.
class PsdMatrix {
public:
    enum class Form { identity, diagonal, dense, projection };

    static PsdMatrix identity(Index p) {
        require(p > 0, ErrorCode::BadDimension, "identity needs p >= 1");
        PsdMatrix a;
        a.form_ = Form::identity;
        a.dim_ = p;
        return a;
    }

    static PsdMatrix diagonal(Vector d) {
        require(d.size() > 0, ErrorCode::BadDimension, "diagonal needs p >= 1");
        require(d.allFinite() && (d.array() >= 0.0).all(), ErrorCode::BadArgument,
                "diagonal weights must be finite and nonnegative");
        PsdMatrix a;
        a.form_ = Form::diagonal;
        a.dim_ = d.size();
        a.diag_ = std::move(d);
        return a;
    }

    /// Dense symmetric matrix; rejected if asymmetric or materially indefinite.
    static PsdMatrix dense(Matrix m, bool validate = true) {
        require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::BadDimension, "dense weight must be square");
        require(m.allFinite(), ErrorCode::NonFiniteData, "dense weight has non-finite entries");
        if (validate) {
            const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
            require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::BadArgument,
                    "dense weight must be symmetric");
            Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
            const double hi = es.eigenvalues().maxCoeff();
            require(es.eigenvalues().minCoeff() >= -1e-8 * std::max(hi, 0.0), ErrorCode::BadArgument,
                    "dense weight is not positive-semidefinite");
        }
        PsdMatrix a;
        a.form_ = Form::dense;
        a.dim_ = m.rows();
        a.dense_ = 0.5 * (m + m.transpose());
        return a;
    }

    /// I - V V^T for V with orthonormal columns (V may have zero columns).
    static PsdMatrix projection(Matrix removed_basis) {
        require(removed_basis.rows() > 0, ErrorCode::BadDimension, "projection needs p >= 1");
        const Index k = removed_basis.cols();
        if (k > 0) {
            const Matrix gram = removed_basis.transpose() * removed_basis;
            require((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8, ErrorCode::BadArgument,
                    "projection basis must be orthonormal");
        }
        PsdMatrix a;
        a.form_ = Form::projection;
        a.dim_ = removed_basis.rows();
        a.basis_ = std::move(removed_basis);
        return a;
    }

    static PsdMatrix zero(Index p) { return diagonal(Vector::Zero(p)); }

    Form form() const noexcept { return form_; }
    Index dim() const noexcept { return dim_; }
    const Vector& diagonal_entries() const noexcept { return diag_; }
    const Matrix& dense_entries() const noexcept { return dense_; }
    const Matrix& removed_basis() const noexcept { return basis_; }

    /// A X
    Matrix apply(const Matrix& x) const { return apply_impl<Matrix>(x); }

    Vector apply(const Vector& x) const { return apply_impl<Vector>(x); }

    Matrix to_dense() const {
        switch (form_) {
        case Form::identity: return Matrix::Identity(dim_, dim_);
        case Form::diagonal: return diag_.asDiagonal();
        case Form::dense: return dense_;
        case Form::projection: return Matrix::Identity(dim_, dim_) - basis_ * basis_.transpose();
        }
        return {};
    }

    /// Symmetric square root; projections and the identity are their own roots.
    PsdMatrix sqrt() const {
        switch (form_) {
        case Form::identity:
        case Form::projection: return *this;
        case Form::diagonal: return diagonal(diag_.cwiseSqrt());
        case Form::dense: {
            Eigen::SelfAdjointEigenSolver<Matrix> es(dense_);
            if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "square root eigendecomposition failed");
            Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            Matrix r = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
            return dense(0.5 * (r + r.transpose()), false);
        }
        }
        return *this;
    }

    bool is_zero() const {
        return form_ == Form::diagonal ? (diag_.array() == 0.0).all()
                                       : (form_ == Form::dense && (dense_.array() == 0.0).all());
    }

private:
    template <class Out, class In>
    Out apply_impl(const In& x) const {
        require(x.rows() == dim_, ErrorCode::DimensionMismatch, "weight/data dimension mismatch");
        switch (form_) {
        case Form::identity: return x;
        case Form::diagonal: return diag_.asDiagonal() * x;
        case Form::dense: return dense_ * x;
        case Form::projection: return x - basis_ * (basis_.transpose() * x);
        }
        return x;
    }

    Form form_ = Form::identity;
    Index dim_ = 0;
    Vector diag_;
    Matrix dense_;
    Matrix basis_;
};

/// Symmetric square root of a symmetric positive-semidefinite matrix.
inline Matrix symmetric_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "square root eigendecomposition failed");
    Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix r = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (r + r.transpose());
}

}  // namespace hdtest
