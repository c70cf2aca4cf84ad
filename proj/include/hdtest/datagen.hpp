#pragma once

// Covariance builders, population generators and replication-indexed random
// streams for the simulation designs.
//
// Every population has the form x = Gamma w + mu with Gamma Gamma^T = Sigma,
// E(w) = 0 and Var(w) = I, except the skewed families, which are generated
// from their stochastic representation and recentred so that the realised
// mean is exactly mu.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hdtest/matcore.hpp"

namespace hdtest {

// ---------------------------------------------------------------------------
// Random streams

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic substream for (seed, replication index). Distinct indices
/// give engines seeded from decorrelated splitmix64 outputs.
inline Rng seeded_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    const std::uint64_t a = detail::splitmix64(state);
    state = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    std::uint64_t words[4];
    for (auto& w : words) w = detail::splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                      static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32),
                      static_cast<std::uint32_t>(words[2]), static_cast<std::uint32_t>(words[2] >> 32),
                      static_cast<std::uint32_t>(words[3]), static_cast<std::uint32_t>(words[3] >> 32)};
    return Rng(seq);
}

/// Combine two stream coordinates into one seed (e.g. base seed and grid point).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (salt * 0x9E3779B97F4A7C15ULL);
    detail::splitmix64(state);
    return detail::splitmix64(state);
}

// ---------------------------------------------------------------------------
// Covariance specifications

struct CovSpec {
    enum class Kind { identity, scaled_power_corr, spiked_block, custom };

    Kind kind = Kind::identity;
    double rho = 0.3;
    bool scale_diagonal = true;              // scaled_power_corr: apply C = diag{(0.5 + i/(p+1))^{1/2}}
    std::vector<double> spike_exponents{};   // spiked_block: leading variances p^{e}
    double multiplier = 1.0;                 // c_i on the non-spiked part
    Matrix custom;

    static CovSpec identity(double c = 1.0) { return {Kind::identity, 0.0, false, {}, c, {}}; }
    static CovSpec power_corr(double rho, bool scaled, double c = 1.0) {
        return {Kind::scaled_power_corr, rho, scaled, {}, c, {}};
    }
    static CovSpec spiked(std::vector<double> exponents, double rho, double c) {
        return {Kind::spiked_block, rho, false, std::move(exponents), c, {}};
    }
    static CovSpec from_matrix(Matrix m) { return {Kind::custom, 0.0, false, {}, 1.0, std::move(m)}; }

    Index spike_count() const noexcept {
        return kind == Kind::spiked_block ? static_cast<Index>(spike_exponents.size()) : 0;
    }
};

inline std::string_view to_string(CovSpec::Kind k) {
    switch (k) {
    case CovSpec::Kind::identity: return "identity";
    case CovSpec::Kind::scaled_power_corr: return "scaled_power_corr";
    case CovSpec::Kind::spiked_block: return "spiked_block";
    case CovSpec::Kind::custom: return "custom";
    }
    return "unknown";
}

/// (rho^{|i-j|^{1/2}}) of size m.
inline Matrix power_correlation(Index m, double rho) {
    Matrix r(m, m);
    for (Index i = 0; i < m; ++i) {
        r(i, i) = 1.0;
        for (Index j = i + 1; j < m; ++j) {
            const double v = std::pow(rho, std::sqrt(static_cast<double>(j - i)));
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

namespace detail {

// Correlation/shape part that a skewed family perturbs: the full matrix for
// unspiked kinds, the trailing block for spiked_block.
inline Matrix base_block(const CovSpec& spec, Index p) {
    switch (spec.kind) {
    case CovSpec::Kind::identity: return Matrix::Identity(p, p);
    case CovSpec::Kind::scaled_power_corr: {
        Matrix r = power_correlation(p, spec.rho);
        if (spec.scale_diagonal) {
            Vector c(p);
            for (Index i = 0; i < p; ++i) c(i) = std::sqrt(0.5 + static_cast<double>(i + 1) / static_cast<double>(p + 1));
            r = c.asDiagonal() * r * c.asDiagonal();
        }
        return r;
    }
    case CovSpec::Kind::spiked_block: return power_correlation(p - spec.spike_count(), spec.rho);
    case CovSpec::Kind::custom: return spec.custom;
    }
    return {};
}

inline Vector spike_variances(const CovSpec& spec, Index p) {
    Vector v(spec.spike_count());
    for (Index j = 0; j < v.size(); ++j) v(j) = std::pow(static_cast<double>(p), spec.spike_exponents[j]);
    return v;
}

inline void validate_cov_spec(const CovSpec& spec, Index p) {
    require(p >= 2, ErrorCode::BadDimension, "covariance needs p >= 2");
    if (spec.kind == CovSpec::Kind::spiked_block) {
        require(spec.spike_count() >= 1, ErrorCode::BadArgument, "spiked_block needs at least one spike exponent");
        require(p > spec.spike_count(), ErrorCode::BadDimension, "spiked_block needs p larger than the spike count");
    }
    if (spec.kind == CovSpec::Kind::custom) {
        require(spec.custom.rows() == p && spec.custom.cols() == p, ErrorCode::BadDimension,
                "custom covariance has the wrong size");
    }
    require(spec.multiplier > 0.0, ErrorCode::BadArgument, "covariance multiplier must be positive");
}

}  // namespace detail

/// Realised Sigma for a Gaussian-type family. Checked positive definite for p <= 2048.
inline PsdMatrix build_cov(const CovSpec& spec, Index p, bool check_definite = true) {
    detail::validate_cov_spec(spec, p);
    Matrix sigma;
    if (spec.kind == CovSpec::Kind::spiked_block) {
        const Index m = spec.spike_count();
        sigma = Matrix::Zero(p, p);
        sigma.topLeftCorner(m, m) = detail::spike_variances(spec, p).asDiagonal();
        sigma.bottomRightCorner(p - m, p - m) = spec.multiplier * detail::base_block(spec, p);
    } else {
        sigma = spec.multiplier * detail::base_block(spec, p);
    }
    if (check_definite && p <= 2048) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
        require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::BadArgument, "covariance is not positive definite");
    }
    return PsdMatrix::dense(std::move(sigma), false);
}

// ---------------------------------------------------------------------------
// Distribution specifications

struct DistSpec {
    enum class Family { gaussian, mvt, chisq_marginal, skew_normal, skew_t };

    Family family = Family::gaussian;
    double df = 0.0;      // mvt / skew_t degrees of freedom; chisq_marginal df (default 5)
    double shape = 0.0;   // skew families: alpha = shape * 1
    Vector mean;          // empty means zero
    CovSpec cov;
};

inline std::string_view to_string(DistSpec::Family f) {
    switch (f) {
    case DistSpec::Family::gaussian: return "gaussian";
    case DistSpec::Family::mvt: return "mvt";
    case DistSpec::Family::chisq_marginal: return "chisq_marginal";
    case DistSpec::Family::skew_normal: return "skew_normal";
    case DistSpec::Family::skew_t: return "skew_t";
    }
    return "unknown";
}

/// Mean of SN(Omega, alpha) is kappa * delta with this kappa; skew_t uses the
/// Gamma-function constant.
inline double skew_mean_constant(DistSpec::Family family, double df) {
    constexpr double kPi = 3.14159265358979323846;
    if (family == DistSpec::Family::skew_normal) return std::sqrt(2.0 / kPi);
    return std::sqrt(df / kPi) * std::exp(std::lgamma(0.5 * df - 0.5) - std::lgamma(0.5 * df));
}

/// A population ready for repeated sampling. Construction does the O(p^3)
/// factorisations once; draw() is O(p^2 n).
class Population {
public:
    Population(DistSpec spec, Index p) : spec_(std::move(spec)), p_(p) {
        using F = DistSpec::Family;
        detail::validate_cov_spec(spec_.cov, p_);
        if (spec_.mean.size() == 0) spec_.mean = Vector::Zero(p_);
        require(spec_.mean.size() == p_, ErrorCode::BadDimension, "mean vector has the wrong length");
        switch (spec_.family) {
        case F::gaussian: break;
        case F::mvt:
        case F::skew_t:
            require(spec_.df >= 5.0, ErrorCode::BadFamilyParams, "t-type families need df >= 5");
            break;
        case F::chisq_marginal:
            if (spec_.df == 0.0) spec_.df = 5.0;
            require(spec_.df > 0.0, ErrorCode::BadFamilyParams, "chi-square df must be positive");
            break;
        case F::skew_normal: break;
        }
        if (is_skewed()) build_skewed();
        else build_linear();
    }

    const DistSpec& spec() const noexcept { return spec_; }
    Index p() const noexcept { return p_; }
    const Vector& mean() const noexcept { return spec_.mean; }
    /// Exact population covariance of the generated vectors.
    const Matrix& covariance() const noexcept { return sigma_; }

    /// n observations with the given mean shift added last (shift-equivariant).
    Sample draw(Index n, Rng& rng) const { return draw(n, rng, spec_.mean); }

    Sample draw(Index n, Rng& rng, const Vector& mean) const {
        require(n >= 1, ErrorCode::TooFewObservations, "draw needs n >= 1");
        require(mean.size() == p_, ErrorCode::BadDimension, "mean vector has the wrong length");
        Matrix x = is_skewed() ? draw_skewed(n, rng) : draw_linear(n, rng);
        x.colwise() += mean;
        return Sample(std::move(x));
    }

private:
    bool is_skewed() const {
        return spec_.family == DistSpec::Family::skew_normal || spec_.family == DistSpec::Family::skew_t;
    }

    void build_linear() {
        sigma_ = build_cov(spec_.cov, p_).to_dense();
        gamma_ = symmetric_sqrt(sigma_);
    }

    void build_skewed() {
        const CovSpec& cov = spec_.cov;
        lead_ = cov.spike_count();
        lead_sd_ = detail::spike_variances(cov, p_).cwiseSqrt();
        const Index m = p_ - lead_;
        const Matrix omega = detail::base_block(cov, p_);
        const Vector alpha = Vector::Constant(m, spec_.shape);
        const Vector omega_alpha = omega * alpha;
        delta_ = omega_alpha / std::sqrt(1.0 + alpha.dot(omega_alpha));
        const Matrix resid = omega - delta_ * delta_.transpose();
        resid_root_ = symmetric_sqrt(0.5 * (resid + resid.transpose()));
        const double kap = skew_mean_constant(spec_.family, spec_.df);
        skew_mean_ = kap * delta_;
        const double infl = spec_.family == DistSpec::Family::skew_t ? spec_.df / (spec_.df - 2.0) : 1.0;
        sigma_ = Matrix::Zero(p_, p_);
        if (lead_ > 0) sigma_.topLeftCorner(lead_, lead_) = lead_sd_.cwiseAbs2().asDiagonal();
        sigma_.bottomRightCorner(m, m) = cov.multiplier * (infl * omega - skew_mean_ * skew_mean_.transpose());
    }

    Matrix draw_linear(Index n, Rng& rng) const {
        using F = DistSpec::Family;
        std::normal_distribution<double> normal;
        Matrix w(p_, n);
        if (spec_.family == F::chisq_marginal) {
            std::chi_squared_distribution<double> chi(spec_.df);
            const double centre = spec_.df;
            const double scale = 1.0 / std::sqrt(2.0 * spec_.df);
            for (Index l = 0; l < n; ++l)
                for (Index t = 0; t < p_; ++t) w(t, l) = (chi(rng) - centre) * scale;
        } else {
            for (Index l = 0; l < n; ++l)
                for (Index t = 0; t < p_; ++t) w(t, l) = normal(rng);
            if (spec_.family == F::mvt) {
                std::chi_squared_distribution<double> chi(spec_.df);
                const double nu = spec_.df;
                for (Index l = 0; l < n; ++l) {
                    const double q = chi(rng);
                    w.col(l) *= std::sqrt((nu - 2.0) / nu) / std::sqrt(q / nu);
                }
            }
        }
        return gamma_ * w;
    }

    Matrix draw_skewed(Index n, Rng& rng) const {
        std::normal_distribution<double> normal;
        const Index m = p_ - lead_;
        Matrix x(p_, n);
        Matrix g(m, n);
        Vector half(n);
        Vector mix = Vector::Ones(n);
        for (Index l = 0; l < n; ++l) {
            for (Index j = 0; j < lead_; ++j) x(j, l) = lead_sd_(j) * normal(rng);
            half(l) = std::abs(normal(rng));
            for (Index t = 0; t < m; ++t) g(t, l) = normal(rng);
        }
        if (spec_.family == DistSpec::Family::skew_t) {
            std::chi_squared_distribution<double> chi(spec_.df);
            for (Index l = 0; l < n; ++l) mix(l) = 1.0 / std::sqrt(chi(rng) / spec_.df);
        }
        Matrix bulk = resid_root_ * g + delta_ * half.transpose();
        bulk = bulk * mix.asDiagonal();
        bulk.colwise() -= skew_mean_;
        x.bottomRows(m) = std::sqrt(spec_.cov.multiplier) * bulk;
        return x;
    }

    DistSpec spec_;
    Index p_ = 0;
    Matrix sigma_;
    Matrix gamma_;
    // skewed families
    Index lead_ = 0;
    Vector lead_sd_;
    Vector delta_;
    Matrix resid_root_;
    Vector skew_mean_;
};

/// One-shot draw for (spec, p, n) from the stream (seed, 0).
inline Sample draw_sample(const DistSpec& spec, Index p, Index n, std::uint64_t seed) {
    Population pop(spec, p);
    Rng rng = seeded_stream(seed, 0);
    return pop.draw(n, rng);
}

}  // namespace hdtest
