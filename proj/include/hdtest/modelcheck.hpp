#pragma once

// NSSE / SSE model check via eta_hat and spike-count selection from the CDM
// tail-energy ratios.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hdtest/estimators.hpp"

namespace hdtest {

/// Threshold function kappa(n); must tend to zero with n^{1/2} kappa(n) -> infinity.
using KappaFn = std::function<double(Index)>;

/// (log n / n)^{1/2}, natural logarithm.
inline double kappa(Index n) {
    require(n >= 2, ErrorCode::TooFewObservations, "kappa needs n >= 2");
    const double nn = static_cast<double>(n);
    return std::sqrt(std::log(nn) / nn);
}

/// n^{-c} for c in (0, 1/2).
inline KappaFn kappa_power(double c) {
    require(c > 0.0 && c < 0.5, ErrorCode::BadArgument, "kappa exponent must lie in (0, 1/2)");
    return [c](Index n) { return std::pow(static_cast<double>(n), -c); };
}

inline KappaFn default_kappa() { return [](Index n) { return kappa(n); }; }

struct EtaResult {
    double eta = 0.0;
    double lam_tilde1 = 0.0;
    double w = 0.0;
    bool nonpositive_w = false;  // eta forced to +inf
};

inline EtaResult eta_hat(const SampleSummary& summary) {
    require(summary.n() >= 4, ErrorCode::TooFewObservations, "eta_hat needs n >= 4");
    const DualEigen eig = dual_eigen(summary);
    EtaResult r;
    r.lam_tilde1 = nr_eigenvalues(summary, eig)(0);
    r.w = w_identity(summary);
    if (r.w <= 0.0) {
        r.nonpositive_w = true;
        r.eta = std::numeric_limits<double>::infinity();
    } else {
        r.eta = r.lam_tilde1 * r.lam_tilde1 / r.w;
    }
    return r;
}

struct SpikeSelection {
    Index k_hat = 0;
    Index cap = 0;
    std::vector<double> tau_tilde;  // tau_hat_(j) {1 + j kappa(n)} for each j examined (1-based j)
};

/// First j >= 0 with tau_hat_(j+1) {1 + (j+1) kappa(n)} > 1, capped at n_(2) - 2.
inline SpikeSelection select_k(const CdmEstimate& cdm, Index n, const KappaFn& kappa_fn = default_kappa()) {
    const double kap = kappa_fn(n);
    SpikeSelection out;
    out.cap = std::max<Index>(cdm.n_second - 2, 0);
    for (Index j = 0;; ++j) {
        if (j >= out.cap) {
            out.k_hat = out.cap;
            return out;
        }
        const double denom = cdm.psi(j);
        if (!(denom > 0.0)) {
            out.k_hat = out.cap;
            return out;
        }
        const double tau = cdm.psi(j + 1) / denom;
        const double scaled = tau * (1.0 + static_cast<double>(j + 1) * kap);
        out.tau_tilde.push_back(scaled);
        if (scaled > 1.0) {
            out.k_hat = j;
            return out;
        }
    }
}

inline SpikeSelection select_k(const Sample& sample, const KappaFn& kappa_fn = default_kappa()) {
    require_observations(sample, 6, "select_k");
    return select_k(cdm_estimates(sample), sample.n(), kappa_fn);
}

struct ModelDiagnosis {
    std::array<double, 2> eta{};
    std::array<double, 2> kappa{};
    std::array<bool, 2> eta_infinite{};
    bool sse = false;
    std::array<Index, 2> k_hat{};
    std::array<std::vector<double>, 2> tau_trace;
};

/// eta_hat and the SSE verdict only (k_hat left at zero).
inline ModelDiagnosis sse_check(const Sample& s1, const Sample& s2, const KappaFn& kappa_fn = default_kappa()) {
    require_same_dimension(s1, s2);
    require_observations(s1, 4, "sse_check");
    require_observations(s2, 4, "sse_check");
    ModelDiagnosis d;
    const Sample* samples[2] = {&s1, &s2};
    for (int i = 0; i < 2; ++i) {
        const EtaResult e = eta_hat(summarize(*samples[i]));
        d.eta[i] = e.eta;
        d.eta_infinite[i] = e.nonpositive_w;
        d.kappa[i] = kappa_fn(samples[i]->n());
    }
    d.sse = d.eta[0] >= d.kappa[0] || d.eta[1] >= d.kappa[1];
    return d;
}

/// Full diagnosis: eta_hat, verdict and k_hat for both populations.
inline ModelDiagnosis diagnose(const Sample& s1, const Sample& s2, const KappaFn& kappa_fn = default_kappa()) {
    ModelDiagnosis d = sse_check(s1, s2, kappa_fn);
    require_observations(s1, 6, "diagnose");
    require_observations(s2, 6, "diagnose");
    const Sample* samples[2] = {&s1, &s2};
    for (int i = 0; i < 2; ++i) {
        SpikeSelection sel = select_k(*samples[i], kappa_fn);
        d.k_hat[i] = sel.k_hat;
        d.tau_trace[i] = std::move(sel.tau_tilde);
    }
    return d;
}

}  // namespace hdtest
