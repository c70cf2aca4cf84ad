#pragma once

// JSON / CSV serialization: test outcomes, diagnoses, experiment configs and
// grid results.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hdtest/simharness.hpp"

namespace hdtest::report {

using nlohmann::json;

namespace detail {

// JSON has no infinity / NaN; those go out as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline std::string fixed(double x, int digits = 6) {
    if (std::isnan(x)) return "NaN";
    if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

inline json to_json(const ModelDiagnosis& d) {
    return json{{"eta1", detail::number(d.eta[0])},
                {"eta2", detail::number(d.eta[1])},
                {"eta1_infinite", d.eta_infinite[0]},
                {"eta2_infinite", d.eta_infinite[1]},
                {"kappa1", d.kappa[0]},
                {"kappa2", d.kappa[1]},
                {"sse", d.sse},
                {"k1", d.k_hat[0]},
                {"k2", d.k_hat[1]}};
}

inline json to_json(const TestOutcome& o) {
    json j{{"statistic", detail::number(o.statistic)},
           {"standardizer", detail::number(o.standardizer)},
           {"score", detail::number(o.score)},
           {"critical", detail::number(o.critical)},
           {"reject", o.reject},
           {"p_value", detail::number(o.p_value)},
           {"procedure", std::string(to_string(o.procedure))},
           {"route", std::string(to_string(o.route))},
           {"alpha", o.alpha},
           {"degenerate", o.degenerate},
           {"k1", o.k[0]},
           {"k2", o.k[1]},
           {"caveats", o.caveats}};
    if (o.diagnosis) j["diagnosis"] = to_json(*o.diagnosis);
    return j;
}

// ---------------------------------------------------------------------------
// Experiment config

inline CovSpec cov_from_json(const json& j) {
    const std::string kind = detail::get_or<std::string>(j, "kind", "identity");
    CovSpec c;
    c.multiplier = detail::get_or(j, "multiplier", 1.0);
    if (kind == "identity") {
        c.kind = CovSpec::Kind::identity;
    } else if (kind == "scaled_power_corr" || kind == "power_corr") {
        c.kind = CovSpec::Kind::scaled_power_corr;
        c.rho = detail::get_or(j, "rho", 0.3);
        c.scale_diagonal = detail::get_or(j, "scale_diagonal", kind == "scaled_power_corr");
    } else if (kind == "spiked_block") {
        c.kind = CovSpec::Kind::spiked_block;
        c.rho = detail::get_or(j, "rho", 0.3);
        c.spike_exponents = detail::get_or(j, "spike_exponents", std::vector<double>{2.0 / 3.0, 0.5});
    } else {
        fail(ErrorCode::BadArgument, "unknown covariance kind '" + kind + "'");
    }
    return c;
}

inline json to_json(const CovSpec& c) {
    json j{{"kind", std::string(to_string(c.kind))}, {"multiplier", c.multiplier}};
    if (c.kind == CovSpec::Kind::scaled_power_corr) {
        j["rho"] = c.rho;
        j["scale_diagonal"] = c.scale_diagonal;
    } else if (c.kind == CovSpec::Kind::spiked_block) {
        j["rho"] = c.rho;
        j["spike_exponents"] = c.spike_exponents;
    }
    return j;
}

inline DistSpec dist_from_json(const json& j) {
    DistSpec d;
    const std::string family = detail::get_or<std::string>(j, "family", "gaussian");
    bool found = false;
    for (auto f : {DistSpec::Family::gaussian, DistSpec::Family::mvt, DistSpec::Family::chisq_marginal,
                   DistSpec::Family::skew_normal, DistSpec::Family::skew_t}) {
        if (to_string(f) == family) {
            d.family = f;
            found = true;
        }
    }
    require(found, ErrorCode::BadFamilyParams, "unknown family '" + family + "'");
    d.df = detail::get_or(j, "df", 0.0);
    d.shape = detail::get_or(j, "shape", 0.0);
    if (j.contains("cov")) d.cov = cov_from_json(j.at("cov"));
    return d;
}

inline json to_json(const DistSpec& d) {
    return json{{"family", std::string(to_string(d.family))}, {"df", d.df}, {"shape", d.shape}, {"cov", to_json(d.cov)}};
}

inline MeanPattern mean_from_json(const json& j) {
    MeanPattern m;
    const std::string kind = detail::get_or<std::string>(j, "pattern", "zero");
    if (kind == "zero") m.kind = MeanPattern::Kind::zero;
    else if (kind == "first_ones") m.kind = MeanPattern::Kind::first_ones;
    else if (kind == "last_ones") m.kind = MeanPattern::Kind::last_ones;
    else if (kind == "first_last") m.kind = MeanPattern::Kind::first_last;
    else fail(ErrorCode::BadArgument, "unknown mean pattern '" + kind + "'");
    m.count = detail::get_or<Index>(j, "count", 0);
    m.count2 = detail::get_or<Index>(j, "count2", 0);
    m.value = detail::get_or(j, "value", 1.0);
    return m;
}

/// Config: either {"scenario": <built-in name>, overrides...} or a full
/// description with "populations", "hypotheses", "procedures" and "grid".
inline ExperimentGrid grid_from_json(const json& j) {
    try {
        ExperimentGrid g;
        const std::string name = detail::get_or<std::string>(j, "scenario", "custom");
        const std::string base = detail::get_or<std::string>(j, "base", name);
        if (auto builtin = scenarios::by_name(base)) {
            g = *builtin;
        } else {
            require(j.contains("populations"), ErrorCode::BadArgument,
                    "unknown scenario '" + base + "' and no populations given");
        }
        g.scenario = name;
        if (j.contains("populations")) {
            const auto& pops = j.at("populations");
            require(pops.is_array() && pops.size() == 2, ErrorCode::BadArgument, "populations must list two entries");
            g.population1 = dist_from_json(pops[0]);
            g.population2 = dist_from_json(pops[1]);
        }
        if (j.contains("hypotheses")) {
            g.hypotheses.clear();
            for (const auto& h : j.at("hypotheses"))
                g.hypotheses.push_back({h.at("name").get<std::string>(), mean_from_json(h.value("mean", json::object()))});
        }
        if (j.contains("procedures")) {
            g.procedures.clear();
            for (const auto& p : j.at("procedures")) g.procedures.push_back(procedure_from_string(p.get<std::string>()));
        }
        if (j.contains("true_k")) {
            const auto k = j.at("true_k").get<std::vector<Index>>();
            require(k.size() == 2 && k[0] >= 0 && k[1] >= 0, ErrorCode::BadArgument, "true_k must be two counts");
            g.true_k1 = k[0];
            g.true_k2 = k[1];
        }
        if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            auto rule = [](const json& r) {
                SampleSizeRule out;
                out.multiple = detail::get_or<Index>(r, "sqrt_multiple", 0);
                out.fixed = detail::get_or<Index>(r, "fixed", 0);
                return out;
            };
            g.schedule = std::make_pair(rule(s.at("n1")), rule(s.at("n2")));
        }
        if (j.contains("grid")) {
            g.grid.clear();
            for (const auto& pt : j.at("grid"))
                g.grid.push_back({pt.at("p").get<Index>(), pt.at("n1").get<Index>(), pt.at("n2").get<Index>()});
        }
        if (j.contains("p_values")) g.set_p_values(j.at("p_values").get<std::vector<Index>>());
        g.replications = detail::get_or<std::size_t>(j, "reps", g.replications);
        g.seed = detail::get_or<std::uint64_t>(j, "seed", g.seed);
        g.alpha = detail::get_or(j, "alpha", g.alpha);
        require(!g.grid.empty(), ErrorCode::BadArgument, "experiment grid is empty");
        return g;
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("bad experiment config: ") + e.what());
    }
}

/// A built-in scenario name or a path to a JSON config file.
inline ExperimentGrid load_grid(const std::string& name_or_path) {
    if (auto builtin = scenarios::by_name(name_or_path)) return *builtin;
    std::ifstream in(name_or_path);
    require(static_cast<bool>(in), ErrorCode::BadArgument,
            "'" + name_or_path + "' is neither a built-in scenario nor a readable config file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, name_or_path + ": " + e.what());
    }
    return grid_from_json(j);
}

inline json to_json(const ExperimentGrid& g) {
    json hyps = json::array();
    for (const auto& h : g.hypotheses) {
        const char* kinds[] = {"zero", "first_ones", "last_ones", "first_last"};
        hyps.push_back({{"name", h.name},
                        {"mean",
                         {{"pattern", kinds[static_cast<int>(h.mean.kind)]},
                          {"count", h.mean.count},
                          {"count2", h.mean.count2},
                          {"value", h.mean.value}}}});
    }
    json procs = json::array();
    for (auto p : g.procedures) procs.push_back(std::string(to_string(p)));
    json grid = json::array();
    for (const auto& pt : g.grid) grid.push_back({{"p", pt.p}, {"n1", pt.n1}, {"n2", pt.n2}});
    return json{{"scenario", g.scenario},
                {"populations", {to_json(g.population1), to_json(g.population2)}},
                {"hypotheses", hyps},
                {"procedures", procs},
                {"true_k", {g.true_k1, g.true_k2}},
                {"grid", grid},
                {"reps", g.replications},
                {"seed", g.seed},
                {"alpha", g.alpha}};
}

// ---------------------------------------------------------------------------
// Results

inline constexpr const char* kCsvHeader =
    "scenario,p,n1,n2,procedure,hypothesis,reject_freq,se,overlay,degenerate,ms_per_rep";

inline void write_csv(std::ostream& out, const GridResult& result) {
    out << kCsvHeader << '\n';
    for (const auto& r : result.rows) {
        out << r.scenario << ',' << r.point.p << ',' << r.point.n1 << ',' << r.point.n2 << ','
            << to_string(r.procedure) << ',' << r.hypothesis << ',' << detail::fixed(r.reject_freq) << ','
            << detail::fixed(r.se) << ',' << (r.overlay ? detail::fixed(*r.overlay) : std::string("NA")) << ','
            << r.degenerate << ',' << (std::isnan(r.ms_per_rep) ? std::string("NA") : detail::fixed(r.ms_per_rep, 3))
            << '\n';
    }
}

inline json to_json(const GridResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"scenario", r.scenario},
                        {"p", r.point.p},
                        {"n1", r.point.n1},
                        {"n2", r.point.n2},
                        {"procedure", std::string(to_string(r.procedure))},
                        {"hypothesis", r.hypothesis},
                        {"reject_freq", detail::number(r.reject_freq)},
                        {"se", detail::number(r.se)},
                        {"overlay", r.overlay ? json(*r.overlay) : json(nullptr)},
                        {"degenerate", r.degenerate},
                        {"failed", r.failed},
                        {"aborted", r.aborted},
                        {"replications", r.replications},
                        {"ms_per_rep", detail::number(r.ms_per_rep)}});
    }
    return rows;
}

}  // namespace hdtest::report
