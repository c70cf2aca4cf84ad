#pragma once

// Monte Carlo engine: empirical size / power of any set of procedures over a
// (p, n1, n2) grid, with asymptotic-power overlays from the population
// covariances.
//
// Replication r of grid point g draws both samples from
// seeded_stream(derive_seed(seed, g), r); the alternative samples reuse the
// null draws shifted by the alternative mean. Results are stored per
// replication and reduced in index order, so the output does not depend on
// the number of worker threads.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hdtest/datagen.hpp"
#include "hdtest/procedures.hpp"

namespace hdtest {

enum class ProcedureId {
    normal_identity,
    normal_a_star,
    normal_a_star_diag,
    normal_a_star_diag_est,
    chi2,
    sse_true_k,
    sse_khat,
    naive,
    adaptive,
};

inline constexpr ProcedureId kAllProcedures[] = {
    ProcedureId::normal_identity, ProcedureId::normal_a_star, ProcedureId::normal_a_star_diag,
    ProcedureId::normal_a_star_diag_est, ProcedureId::chi2, ProcedureId::sse_true_k,
    ProcedureId::sse_khat, ProcedureId::naive, ProcedureId::adaptive,
};

inline std::string_view to_string(ProcedureId id) {
    switch (id) {
    case ProcedureId::normal_identity: return "normal_identity";
    case ProcedureId::normal_a_star: return "normal_a_star";
    case ProcedureId::normal_a_star_diag: return "normal_a_star_diag";
    case ProcedureId::normal_a_star_diag_est: return "normal_a_star_diag_est";
    case ProcedureId::chi2: return "chi2";
    case ProcedureId::sse_true_k: return "sse_true_k";
    case ProcedureId::sse_khat: return "sse_khat";
    case ProcedureId::naive: return "naive";
    case ProcedureId::adaptive: return "adaptive";
    }
    return "unknown";
}

inline ProcedureId procedure_from_string(std::string_view name) {
    for (ProcedureId id : kAllProcedures)
        if (to_string(id) == name) return id;
    fail(ErrorCode::BadArgument, "unknown procedure '" + std::string(name) + "'");
}

/// Mean vector pattern for population 2 (population 1 has mean zero).
struct MeanPattern {
    enum class Kind { zero, first_ones, last_ones, first_last };

    Kind kind = Kind::zero;
    Index count = 0;   // first_ones / last_ones / first block of first_last
    Index count2 = 0;  // trailing block of first_last (filled with -value)
    double value = 1.0;

    Vector realize(Index p) const {
        Vector mu = Vector::Zero(p);
        const Index c1 = std::min(count, p);
        const Index c2 = std::min(count2, p);
        switch (kind) {
        case Kind::zero: break;
        case Kind::first_ones: mu.head(c1).setConstant(value); break;
        case Kind::last_ones: mu.tail(c1).setConstant(value); break;
        case Kind::first_last:
            mu.head(c1).setConstant(value);
            mu.tail(c2).setConstant(-value);
            break;
        }
        return mu;
    }
};

struct Hypothesis {
    std::string name;
    MeanPattern mean;
};

struct GridPoint {
    Index p = 0;
    Index n1 = 0;
    Index n2 = 0;
};

/// n = multiple * ceil(p^{1/2}), or a fixed value when multiple == 0.
struct SampleSizeRule {
    Index multiple = 1;
    Index fixed = 0;

    Index operator()(Index p) const {
        if (multiple == 0) return fixed;
        return multiple * static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(p)) - 1e-12));
    }
};

struct ExperimentGrid {
    std::string scenario;
    DistSpec population1;
    DistSpec population2;
    std::vector<Hypothesis> hypotheses;
    std::vector<GridPoint> grid;
    std::vector<ProcedureId> procedures;
    Index true_k1 = 0;
    Index true_k2 = 0;
    std::size_t replications = 500;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    // Present when the grid follows a closed-form schedule in p.
    std::optional<std::pair<SampleSizeRule, SampleSizeRule>> schedule;

    /// Replace the p grid, keeping the closed-form n schedule.
    void set_p_values(const std::vector<Index>& ps) {
        require(schedule.has_value(), ErrorCode::BadArgument,
                "scenario '" + scenario + "' has no closed-form n schedule; give an explicit grid");
        grid.clear();
        for (Index p : ps) grid.push_back({p, schedule->first(p), schedule->second(p)});
    }
};

struct ResultRow {
    std::string scenario;
    GridPoint point;
    ProcedureId procedure = ProcedureId::normal_identity;
    std::string hypothesis;
    double reject_freq = 0.0;  // NaN if the grid point was aborted
    double se = 0.0;
    std::optional<double> overlay;
    std::size_t degenerate = 0;
    std::size_t failed = 0;  // replications that raised instead of producing an outcome
    std::size_t replications = 0;
    bool aborted = false;
    double ms_per_rep = std::numeric_limits<double>::quiet_NaN();
};

struct GridResult {
    std::vector<ResultRow> rows;

    const ResultRow* find(Index p, ProcedureId proc, std::string_view hyp) const {
        for (const auto& r : rows)
            if (r.point.p == p && r.procedure == proc && r.hypothesis == hyp) return &r;
        return nullptr;
    }
};

struct RunOptions {
    unsigned threads = 1;
    bool timing = false;
};

// ---------------------------------------------------------------------------
// Population-level quantities for overlays

namespace detail {

struct OracleContext {
    const Matrix* sigma1 = nullptr;
    const Matrix* sigma2 = nullptr;
    Index n1 = 0;
    Index n2 = 0;
    double alpha = 0.05;
};

// Asymptotic power overlay for T(A): Phi(Delta / K^{1/2} - z_alpha (K1 / K)^{1/2}).
inline double overlay_normal(const OracleContext& c, const Matrix& a, const Vector& mu_diff) {
    const Matrix m1 = a * *c.sigma1;
    const Matrix m2 = a * *c.sigma2;
    const double n1 = static_cast<double>(c.n1);
    const double n2 = static_cast<double>(c.n2);
    const double tr11 = m1.cwiseProduct(m1.transpose()).sum();
    const double tr22 = m2.cwiseProduct(m2.transpose()).sum();
    const double tr12 = m1.cwiseProduct(m2.transpose()).sum();
    const Vector amu = a * mu_diff;
    const double delta = mu_diff.dot(amu);
    const double k1 = 2.0 * (tr11 / (n1 * (n1 - 1.0)) + tr22 / (n2 * (n2 - 1.0))) + 4.0 * tr12 / (n1 * n2);
    const double k2 = 4.0 * (amu.dot(*c.sigma1 * amu) / n1 + amu.dot(*c.sigma2 * amu) / n2);
    return asymptotic_power(delta, k1, k2, c.alpha);
}

inline Matrix leading_eigenvectors(const Matrix& sigma, Index k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "population eigendecomposition failed");
    const Index p = sigma.rows();
    require(k >= 0 && k <= p, ErrorCode::BadArgument, "spike count exceeds the dimension");
    Matrix h(p, k);
    for (Index j = 0; j < k; ++j) h.col(j) = es.eigenvectors().col(p - 1 - j);
    return h;
}

// Overlay for the eigenstructure-adjusted test with the true spike counts.
inline double overlay_sse(const OracleContext& c, const Matrix& h1, const Matrix& h2, const Vector& mu1,
                          const Vector& mu2) {
    auto project = [](const Matrix& h, const Matrix& m) -> Matrix { return m - h * (h.transpose() * m); };
    auto project_vec = [](const Matrix& h, const Vector& v) -> Vector { return v - h * (h.transpose() * v); };
    const Matrix s1 = project(h1, project(h1, *c.sigma1).transpose());
    const Matrix s2 = project(h2, project(h2, *c.sigma2).transpose());
    const Vector mu_star = project_vec(h1, mu1) - project_vec(h2, mu2);
    const double n1 = static_cast<double>(c.n1);
    const double n2 = static_cast<double>(c.n2);
    const double delta = mu_star.squaredNorm();
    const double k1 = 2.0 * (s1.squaredNorm() / (n1 * (n1 - 1.0)) + s2.squaredNorm() / (n2 * (n2 - 1.0))) +
                      4.0 * s1.cwiseProduct(s2).sum() / (n1 * n2);
    const double k2 = 4.0 * (mu_star.dot(s1 * mu_star) / n1 + mu_star.dot(s2 * mu_star) / n2);
    return asymptotic_power(delta, k1, k2, c.alpha);
}

}  // namespace detail

/// Population-level overlays at one grid point; weight matrices and
/// eigenvectors are computed once and reused across procedures/hypotheses.
class OverlayOracle {
public:
    OverlayOracle(const Matrix& sigma1, const Matrix& sigma2, const GridPoint& point, Index true_k1, Index true_k2,
                  double alpha)
        : sigma1_(sigma1), sigma2_(sigma2), point_(point), k1_(true_k1), k2_(true_k2), alpha_(alpha) {
        require(sigma1.rows() == point.p && sigma2.rows() == point.p, ErrorCode::OracleRequired,
                "overlay needs population covariances of dimension p");
    }

    /// nullopt where no asymptotic power formula is stated (estimated
    /// weights, chi-square, naive, adaptive).
    std::optional<double> operator()(ProcedureId procedure, const Vector& mu1, const Vector& mu2) {
        detail::OracleContext c{&sigma1_, &sigma2_, point_.n1, point_.n2, alpha_};
        const Vector diff = mu1 - mu2;
        switch (procedure) {
        case ProcedureId::normal_identity:
            return detail::overlay_normal(c, Matrix::Identity(point_.p, point_.p), diff);
        case ProcedureId::normal_a_star:
            if (!a_star_) a_star_ = a_star(sigma1_, sigma2_, point_.n1, point_.n2).to_dense();
            return detail::overlay_normal(c, *a_star_, diff);
        case ProcedureId::normal_a_star_diag:
            if (!a_star_diag_)
                a_star_diag_ =
                    a_star_diagonal(sigma1_.diagonal(), sigma2_.diagonal(), point_.n1, point_.n2).to_dense();
            return detail::overlay_normal(c, *a_star_diag_, diff);
        case ProcedureId::sse_true_k:
        case ProcedureId::sse_khat:
            if (!h1_) {
                h1_ = detail::leading_eigenvectors(sigma1_, k1_);
                h2_ = detail::leading_eigenvectors(sigma2_, k2_);
            }
            return detail::overlay_sse(c, *h1_, *h2_, mu1, mu2);
        default: return std::nullopt;
        }
    }

private:
    const Matrix& sigma1_;
    const Matrix& sigma2_;
    GridPoint point_;
    Index k1_;
    Index k2_;
    double alpha_;
    std::optional<Matrix> a_star_;
    std::optional<Matrix> a_star_diag_;
    std::optional<Matrix> h1_;
    std::optional<Matrix> h2_;
};

inline std::optional<double> overlay_power(const Matrix& sigma1, const Matrix& sigma2, const GridPoint& point,
                                           ProcedureId procedure, const Vector& mu1, const Vector& mu2,
                                           Index true_k1, Index true_k2, double alpha) {
    OverlayOracle oracle(sigma1, sigma2, point, true_k1, true_k2, alpha);
    return oracle(procedure, mu1, mu2);
}

// ---------------------------------------------------------------------------
// Engine

namespace detail {

struct Evaluation {
    bool reject = false;
    bool degenerate = false;
    bool failed = false;
};

struct PointContext {
    const ExperimentGrid* grid = nullptr;
    GridPoint point;
    std::shared_ptr<const PsdMatrix> a_star;
    std::shared_ptr<const PsdMatrix> a_star_diag;
};

inline Evaluation evaluate(const PointContext& ctx, ProcedureId id, const Sample& s1, const Sample& s2) {
    const double alpha = ctx.grid->alpha;
    Evaluation ev;
    try {
        TestOutcome out;
        switch (id) {
        case ProcedureId::normal_identity: out = test_normal(s1, s2, MatrixChoice::identity(), alpha); break;
        case ProcedureId::normal_a_star: out = test_normal(s1, s2, MatrixChoice::custom(*ctx.a_star), alpha); break;
        case ProcedureId::normal_a_star_diag:
            out = test_normal(s1, s2, MatrixChoice::custom(*ctx.a_star_diag), alpha);
            break;
        case ProcedureId::normal_a_star_diag_est:
            out = test_normal(s1, s2, MatrixChoice::estimated_diagonal(), alpha);
            break;
        case ProcedureId::chi2: out = test_chi2(s1, s2, alpha); break;
        case ProcedureId::sse_true_k: out = test_sse(s1, s2, ctx.grid->true_k1, ctx.grid->true_k2, alpha); break;
        case ProcedureId::sse_khat: {
            const Index k1 = select_k(s1).k_hat;
            const Index k2 = select_k(s2).k_hat;
            out = test_sse(s1, s2, k1, k2, alpha);
            break;
        }
        case ProcedureId::naive: out = test_naive(s1, s2, ctx.grid->true_k1, ctx.grid->true_k2, alpha); break;
        case ProcedureId::adaptive: out = test_adaptive(s1, s2, alpha); break;
        }
        ev.reject = out.reject;
        ev.degenerate = out.degenerate;
    } catch (const Error&) {
        ev.failed = true;
        ev.degenerate = true;
    }
    return ev;
}

}  // namespace detail

inline GridResult run_grid(const ExperimentGrid& grid, const RunOptions& options = {}) {
    require(grid.replications >= 1, ErrorCode::BadArgument, "replications must be >= 1");
    require(!grid.procedures.empty(), ErrorCode::BadArgument, "no procedures requested");
    require(!grid.hypotheses.empty(), ErrorCode::BadArgument, "no hypotheses requested");
    require_alpha(grid.alpha);
    using Clock = std::chrono::steady_clock;

    GridResult result;
    const std::size_t reps = grid.replications;
    const std::size_t n_hyp = grid.hypotheses.size();
    const std::size_t n_proc = grid.procedures.size();

    for (std::size_t g = 0; g < grid.grid.size(); ++g) {
        const GridPoint pt = grid.grid[g];
        require(pt.n1 >= 4 && pt.n2 >= 4, ErrorCode::TooFewObservations, "grid sample sizes must be >= 4");
        const Population pop1(grid.population1, pt.p);
        const Population pop2(grid.population2, pt.p);
        const Vector zero = Vector::Zero(pt.p);

        detail::PointContext ctx;
        ctx.grid = &grid;
        ctx.point = pt;
        auto wants = [&](ProcedureId id) {
            return std::find(grid.procedures.begin(), grid.procedures.end(), id) != grid.procedures.end();
        };
        if (wants(ProcedureId::normal_a_star)) {
            ctx.a_star = std::make_shared<const PsdMatrix>(a_star(pop1.covariance(), pop2.covariance(), pt.n1, pt.n2));
        }
        if (wants(ProcedureId::normal_a_star_diag)) {
            ctx.a_star_diag = std::make_shared<const PsdMatrix>(a_star_diagonal(
                pop1.covariance().diagonal(), pop2.covariance().diagonal(), pt.n1, pt.n2));
        }
        std::vector<Vector> mu2;
        for (const auto& h : grid.hypotheses) mu2.push_back(h.mean.realize(pt.p));

        // outcome codes: bit 0 reject, bit 1 degenerate, bit 2 failed
        std::vector<std::uint8_t> codes(reps * n_hyp * n_proc, 0);
        std::vector<double> elapsed_ms(n_proc, 0.0);
        const std::uint64_t point_seed = derive_seed(grid.seed, g);

        std::atomic<std::size_t> next{0};
        auto worker = [&](std::vector<double>& local_ms) {
            for (;;) {
                const std::size_t r = next.fetch_add(1);
                if (r >= reps) break;
                Rng rng = seeded_stream(point_seed, r);
                const Sample s1 = pop1.draw(pt.n1, rng, zero);
                const Sample base2 = pop2.draw(pt.n2, rng, zero);
                for (std::size_t h = 0; h < n_hyp; ++h) {
                    const Sample s2 = mu2[h].isZero(0.0) ? base2 : Sample(base2.data().colwise() + mu2[h]);
                    for (std::size_t q = 0; q < n_proc; ++q) {
                        const auto t0 = options.timing ? Clock::now() : Clock::time_point{};
                        const detail::Evaluation ev = detail::evaluate(ctx, grid.procedures[q], s1, s2);
                        if (options.timing) {
                            local_ms[q] += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
                        }
                        codes[(r * n_hyp + h) * n_proc + q] = static_cast<std::uint8_t>(
                            (ev.reject ? 1 : 0) | (ev.degenerate ? 2 : 0) | (ev.failed ? 4 : 0));
                    }
                }
            }
        };
        const unsigned threads = std::max(1u, options.threads);
        std::vector<std::vector<double>> per_thread_ms(threads, std::vector<double>(n_proc, 0.0));
        if (threads == 1) {
            worker(per_thread_ms[0]);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, std::ref(per_thread_ms[t]));
            for (auto& th : pool) th.join();
        }
        for (const auto& v : per_thread_ms)
            for (std::size_t q = 0; q < n_proc; ++q) elapsed_ms[q] += v[q];

        OverlayOracle overlay(pop1.covariance(), pop2.covariance(), pt, grid.true_k1, grid.true_k2, grid.alpha);
        for (std::size_t h = 0; h < n_hyp; ++h) {
            for (std::size_t q = 0; q < n_proc; ++q) {
                ResultRow row;
                row.scenario = grid.scenario;
                row.point = pt;
                row.procedure = grid.procedures[q];
                row.hypothesis = grid.hypotheses[h].name;
                row.replications = reps;
                std::size_t rejects = 0;
                for (std::size_t r = 0; r < reps; ++r) {
                    const std::uint8_t c = codes[(r * n_hyp + h) * n_proc + q];
                    rejects += c & 1;
                    row.degenerate += (c >> 1) & 1;
                    row.failed += (c >> 2) & 1;
                }
                row.aborted = static_cast<double>(row.degenerate) > 0.1 * static_cast<double>(reps);
                if (row.aborted) {
                    row.reject_freq = std::numeric_limits<double>::quiet_NaN();
                    row.se = std::numeric_limits<double>::quiet_NaN();
                } else {
                    row.reject_freq = static_cast<double>(rejects) / static_cast<double>(reps);
                    row.se = std::sqrt(row.reject_freq * (1.0 - row.reject_freq) / static_cast<double>(reps));
                }
                try {
                    row.overlay = overlay(row.procedure, zero, mu2[h]);
                } catch (const Error&) {
                    row.overlay.reset();
                }
                if (options.timing) row.ms_per_rep = elapsed_ms[q] / static_cast<double>(reps * n_hyp);
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace scenarios {

inline std::vector<Index> powers_of_two(int lo, int hi) {
    std::vector<Index> out;
    for (int s = lo; s <= hi; ++s) out.push_back(Index{1} << s);
    return out;
}

inline ExperimentGrid with_schedule(ExperimentGrid g, const std::vector<Index>& ps, SampleSizeRule r1,
                                    SampleSizeRule r2) {
    g.schedule = std::make_pair(r1, r2);
    g.set_p_values(ps);
    return g;
}

inline DistSpec dist(DistSpec::Family family, CovSpec cov, double df = 0.0, double shape = 0.0) {
    DistSpec d;
    d.family = family;
    d.cov = std::move(cov);
    d.df = df;
    d.shape = shape;
    return d;
}

inline const std::vector<ProcedureId>& weight_procedures() {
    static const std::vector<ProcedureId> v{ProcedureId::normal_identity, ProcedureId::normal_a_star,
                                            ProcedureId::normal_a_star_diag, ProcedureId::normal_a_star_diag_est};
    return v;
}

inline const std::vector<ProcedureId>& spiked_procedures() {
    static const std::vector<ProcedureId> v{ProcedureId::normal_identity, ProcedureId::chi2, ProcedureId::sse_true_k,
                                            ProcedureId::sse_khat, ProcedureId::naive};
    return v;
}

inline std::vector<double> spike_exponents() { return {2.0 / 3.0, 0.5}; }

inline std::vector<Hypothesis> spiked_hypotheses() {
    return {{"null", {}}, {"alt", {MeanPattern::Kind::last_ones, 4, 0, 1.0}}};
}

inline ExperimentGrid fig1() {
    ExperimentGrid g;
    g.scenario = "fig1";
    const CovSpec cov = CovSpec::power_corr(0.3, true);
    g.population1 = dist(DistSpec::Family::gaussian, cov);
    g.population2 = dist(DistSpec::Family::gaussian, cov);
    g.hypotheses = {{"a", {}},
                    {"b", {MeanPattern::Kind::first_ones, 10, 0, 1.0}},
                    {"c", {MeanPattern::Kind::last_ones, 10, 0, 1.0}}};
    g.procedures = weight_procedures();
    return with_schedule(g, powers_of_two(4, 10), {1, 0}, {1, 0});
}

inline ExperimentGrid spiked_base(std::string name, DistSpec::Family family, double df) {
    ExperimentGrid g;
    g.scenario = std::move(name);
    g.population1 = dist(family, CovSpec::spiked(spike_exponents(), 0.3, 1.0), df);
    g.population2 = dist(family, CovSpec::spiked(spike_exponents(), 0.3, 1.5), df);
    g.hypotheses = spiked_hypotheses();
    g.procedures = spiked_procedures();
    g.true_k1 = 2;
    g.true_k2 = 2;
    return g;
}

inline ExperimentGrid fig2a() {
    return with_schedule(spiked_base("fig2a", DistSpec::Family::gaussian, 0.0), powers_of_two(4, 10), {3, 0}, {4, 0});
}

inline ExperimentGrid fig2b() {
    ExperimentGrid g = spiked_base("fig2b", DistSpec::Family::mvt, 15.0);
    std::vector<Index> ps;
    for (int s = 1; s <= 7; ++s) ps.push_back(50 + 100 * (s - 1));
    return with_schedule(g, ps, {0, 40}, {0, 60});
}

inline ExperimentGrid fig2c() {
    ExperimentGrid g = spiked_base("fig2c", DistSpec::Family::chisq_marginal, 5.0);
    for (int s = 2; s <= 8; ++s) g.grid.push_back({500, 10 * s, 15 * s});
    return g;
}

inline ExperimentGrid s4_1() {
    ExperimentGrid g;
    g.scenario = "s4_1";
    g.population1 = dist(DistSpec::Family::skew_normal, CovSpec::power_corr(0.3, false, 1.0), 0.0, 4.0);
    g.population2 = dist(DistSpec::Family::skew_normal, CovSpec::power_corr(0.3, false, 1.5), 0.0, 4.0);
    g.hypotheses = {{"null", {}}, {"alt", {MeanPattern::Kind::first_last, 5, 5, 1.0}}};
    g.procedures = weight_procedures();
    return with_schedule(g, powers_of_two(4, 10), {1, 0}, {2, 0});
}

inline ExperimentGrid skew_spiked(std::string name, DistSpec::Family family, double df, double shape) {
    ExperimentGrid g = spiked_base(std::move(name), family, df);
    g.population1 = dist(family, CovSpec::spiked(spike_exponents(), 0.3, 1.0), df, shape);
    g.population2 = dist(family, CovSpec::spiked(spike_exponents(), 0.5, 1.0), df, shape);
    return g;
}

inline ExperimentGrid s4_2() {
    return with_schedule(skew_spiked("s4_2", DistSpec::Family::skew_normal, 0.0, 4.0), powers_of_two(4, 10), {3, 0},
                         {4, 0});
}

inline ExperimentGrid s4_3() {
    ExperimentGrid g = skew_spiked("s4_3", DistSpec::Family::skew_t, 10.0, 10.0);
    std::vector<Index> ps;
    for (int s = 1; s <= 7; ++s) ps.push_back(50 + 100 * (s - 1));
    return with_schedule(g, ps, {0, 40}, {0, 60});
}

inline ExperimentGrid s4_4() {
    ExperimentGrid g = skew_spiked("s4_4", DistSpec::Family::skew_t, 10.0, 10.0);
    for (int s = 2; s <= 8; ++s) g.grid.push_back({500, 10 * s, 15 * s});
    return g;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> v{"fig1", "fig2a", "fig2b", "fig2c", "s4_1", "s4_2", "s4_3", "s4_4"};
    return v;
}

inline std::optional<ExperimentGrid> by_name(std::string_view name) {
    if (name == "fig1") return fig1();
    if (name == "fig2a") return fig2a();
    if (name == "fig2b") return fig2b();
    if (name == "fig2c") return fig2c();
    if (name == "s4_1") return s4_1();
    if (name == "s4_2") return s4_2();
    if (name == "s4_3") return s4_3();
    if (name == "s4_4") return s4_4();
    return std::nullopt;
}

}  // namespace scenarios

}  // namespace hdtest
