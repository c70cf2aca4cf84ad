// hdtest: two-sample mean tests on CSV data, model diagnosis and Monte Carlo
// size/power simulation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "hdtest/hdtest.hpp"

namespace {

struct CliConfig {
    std::string group1;
    std::string group2;
    std::string procedure = "auto";
    std::string matrix = "identity";
    std::optional<long> k1;
    std::optional<long> k2;
    std::optional<double> alpha;
    std::string out;
    std::string config;
    std::optional<std::size_t> reps;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::vector<long> p_values;
    bool timing = false;
    int verbosity = 0;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) hdtest::fail(hdtest::ErrorCode::BadArgument, "cannot write '" + path + "'");
    out << text << '\n';
}

std::pair<hdtest::Sample, hdtest::Sample> load_groups(const CliConfig& c) {
    hdtest::Sample s1 = hdtest::csv::read(c.group1);
    hdtest::Sample s2 = hdtest::csv::read(c.group2);
    hdtest::require_same_dimension(s1, s2);
    return {std::move(s1), std::move(s2)};
}

hdtest::Index spike_count(const std::optional<long>& flag, const hdtest::Sample& s) {
    if (flag) {
        hdtest::require(*flag >= 0, hdtest::ErrorCode::BadArgument, "k flags must be nonnegative");
        return *flag;
    }
    return hdtest::select_k(s).k_hat;
}

int cmd_run(const CliConfig& c) {
    const auto [s1, s2] = load_groups(c);
    const double alpha = c.alpha.value_or(0.05);
    hdtest::TestOutcome out;
    if (c.procedure == "auto") {
        out = hdtest::test_adaptive(s1, s2, alpha);
    } else if (c.procedure == "normal") {
        const auto choice =
            c.matrix == "diag-est" ? hdtest::MatrixChoice::estimated_diagonal() : hdtest::MatrixChoice::identity();
        out = hdtest::test_normal(s1, s2, choice, alpha);
    } else if (c.procedure == "chi2") {
        out = hdtest::test_chi2(s1, s2, alpha);
    } else if (c.procedure == "sse") {
        out = hdtest::test_sse(s1, s2, spike_count(c.k1, s1), spike_count(c.k2, s2), alpha);
    } else {
        out = hdtest::test_naive(s1, s2, spike_count(c.k1, s1), spike_count(c.k2, s2), alpha);
    }
    emit(hdtest::report::to_json(out).dump(2), c.out);
    return 0;
}

int cmd_diagnose(const CliConfig& c) {
    const auto [s1, s2] = load_groups(c);
    emit(hdtest::report::to_json(hdtest::diagnose(s1, s2)).dump(2), c.out);
    return 0;
}

std::filesystem::path json_mirror(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

int cmd_simulate(const CliConfig& c) {
    hdtest::ExperimentGrid grid = hdtest::report::load_grid(c.config);
    if (c.reps) grid.replications = *c.reps;
    if (c.seed) grid.seed = *c.seed;
    if (c.alpha) grid.alpha = *c.alpha;
    if (!c.p_values.empty()) grid.set_p_values({c.p_values.begin(), c.p_values.end()});

    hdtest::RunOptions options;
    options.timing = c.timing;
    options.threads = 1;
    if (c.threads) {
        options.threads = *c.threads;
    } else if (const char* env = std::getenv("HDTEST_THREADS")) {
        options.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (options.threads == 0) options.threads = std::max(1u, std::thread::hardware_concurrency());
    if (c.verbosity > 0) {
        std::cerr << "simulate " << grid.scenario << ": " << grid.grid.size() << " grid points, R = "
                  << grid.replications << ", threads = " << options.threads << '\n';
    }

    const hdtest::GridResult result = hdtest::run_grid(grid, options);
    if (c.out.empty() || c.out == "-") {
        hdtest::report::write_csv(std::cout, result);
        return 0;
    }
    std::ofstream csv(c.out);
    if (!csv) hdtest::fail(hdtest::ErrorCode::BadArgument, "cannot write '" + c.out + "'");
    hdtest::report::write_csv(csv, result);
    const nlohmann::json mirror{{"config", hdtest::report::to_json(grid)}, {"rows", hdtest::report::to_json(result)}};
    emit(mirror.dump(2), json_mirror(c.out).string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig c;
    CLI::App app{"High-dimensional two-sample mean tests"};
    app.require_subcommand(1);
    app.add_option("--threads", c.threads, "Worker threads for simulate (0 = all cores)");
    app.add_option("--seed", c.seed, "Base seed for simulate");
    app.add_option("--alpha", c.alpha, "Significance level in (0, 0.5)")->check(CLI::Range(0.0, 0.5));
    app.add_flag("-v,--verbose", c.verbosity, "Progress messages on stderr");

    auto* run = app.add_subcommand("run", "Test equality of the two group means");
    auto* diag = app.add_subcommand("diagnose", "Decide NSSE vs SSE and estimate spike counts");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo size/power over a grid");
    for (auto* sub : {run, diag}) {
        sub->fallthrough();
        sub->add_option("--group1", c.group1, "CSV, one observation per row")->required()->check(CLI::ExistingFile);
        sub->add_option("--group2", c.group2, "CSV, one observation per row")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "Output JSON (default stdout)");
    }
    run->add_option("--procedure", c.procedure, "Test procedure")
        ->check(CLI::IsMember({"auto", "normal", "chi2", "sse", "naive"}));
    run->add_option("--matrix", c.matrix, "Weight matrix for the normal procedure")
        ->check(CLI::IsMember({"identity", "diag-est"}));
    run->add_option("--k1", c.k1, "Spike count for group 1 (default: estimated)")->check(CLI::NonNegativeNumber);
    run->add_option("--k2", c.k2, "Spike count for group 2 (default: estimated)")->check(CLI::NonNegativeNumber);

    sim->fallthrough();
    sim->add_option("--config", c.config, "Built-in scenario name or JSON config file")->required();
    sim->add_option("--out", c.out, "Output CSV; a JSON mirror is written next to it (default stdout)");
    sim->add_option("--reps", c.reps, "Replications per grid point")->check(CLI::PositiveNumber);
    sim->add_option("--p-values", c.p_values, "Override the p grid (scheduled scenarios only)");
    sim->add_flag("--timing", c.timing, "Report ms_per_rep (otherwise NA)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run) return cmd_run(c);
        if (*diag) return cmd_diagnose(c);
        return cmd_simulate(c);
    } catch (const hdtest::Error& e) {
        std::cerr << "error: " << hdtest::to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
