// Command-line front end: analyze one experiment, batch-analyze aggregate
// rows, run seeded coverage simulations, or certify the closed-form variance
// formulas by exhaustive enumeration.

#include <cstdint>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satkit/cli.hpp"

namespace {

using satkit::cli::json;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) satkit::fail(satkit::errc::parse_error, "cannot open input file '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) satkit::fail(satkit::errc::config_invalid, "cannot open output file '" + path + "'");
    return out;
}

satkit::VarianceMode parse_mode(const std::string& mode) {
    if (mode == "exact") return satkit::VarianceMode::exact;
    if (mode == "paper") return satkit::VarianceMode::paper_asymptotic;
    satkit::fail(satkit::errc::config_invalid, "unknown --mode '" + mode + "' (exact|paper)");
}

int run_analyze(const std::string& input, double alpha, const std::string& mode,
                const std::string& rho, const std::vector<std::string>& estimands,
                bool no_adjust, const std::string& out_path) {
    satkit::cli::AnalyzeOptions opt;
    opt.alpha = alpha;
    opt.mode = parse_mode(mode);
    opt.adjust_covariates = !no_adjust;
    if (rho == "empirical")
        opt.rho_empirical = true;
    else
        opt.rho = satkit::parse_rho(rho);
    for (const auto& e : estimands) opt.extra.push_back(satkit::parse_estimand(e));

    auto in = open_input(input);
    const auto obs = satkit::cli::read_unit_csv(in, input);
    const auto report = satkit::cli::analyze(obs, opt);
    if (out_path.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        auto out = open_output(out_path);
        out << report.dump(2) << '\n';
    }
    return 0;
}

int run_batch(const std::string& input, double alpha, const std::string& rows_path,
              const std::string& report_path) {
    auto in = open_input(input);
    satkit::cli::BatchOptions opt;
    opt.alpha = alpha;

    json report;
    if (rows_path.empty()) {
        report = satkit::cli::run_batch(in, std::cout, opt);
    } else {
        auto rows_out = open_output(rows_path);
        report = satkit::cli::run_batch(in, rows_out, opt);
    }
    if (report_path.empty()) {
        if (!rows_path.empty()) std::cout << report.dump(2) << '\n';
    } else {
        auto out = open_output(report_path);
        out << report.dump(2) << '\n';
    }
    return 0;
}

struct SimulateFlags {
    std::string config_path;
    std::string dgp;
    std::vector<double> sigma_tau;
    std::optional<double> tau, p0, p1, p, alpha;
    std::optional<std::int64_t> n, n_samples, n_assignments;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> estimands;
    std::string mode;
    std::string out_prefix;
};

int run_simulate(const SimulateFlags& flags) {
    json config;
    if (!flags.config_path.empty()) {
        auto in = open_input(flags.config_path);
        try {
            in >> config;
        } catch (const std::exception& e) {
            satkit::fail(satkit::errc::config_invalid,
                         std::string("cannot parse config JSON: ") + e.what());
        }
    } else {
        config = json{{"dgp", json::object()}, {"plan", json::object()}};
    }

    // flags override the config document
    auto& dgp_json = config["dgp"];
    auto& plan_json = config["plan"];
    if (!flags.dgp.empty()) dgp_json["kind"] = flags.dgp;
    if (!dgp_json.contains("kind")) dgp_json["kind"] = "random_coefficient";
    if (!flags.sigma_tau.empty()) dgp_json["sigma_tau"] = flags.sigma_tau;
    if (flags.tau) dgp_json["tau"] = *flags.tau;
    if (flags.p0) dgp_json["p0"] = *flags.p0;
    if (flags.p1) dgp_json["p1"] = *flags.p1;
    if (flags.n) dgp_json["n"] = *flags.n;
    if (flags.seed) dgp_json["seed"] = *flags.seed;
    if (flags.p) plan_json["p"] = *flags.p;
    if (flags.alpha) plan_json["alpha"] = *flags.alpha;
    if (flags.n_samples) plan_json["n_samples"] = *flags.n_samples;
    if (flags.n_assignments) plan_json["n_assignments"] = *flags.n_assignments;
    if (!flags.estimands.empty()) plan_json["estimands"] = flags.estimands;
    if (!flags.mode.empty()) plan_json["mode"] = flags.mode;

    const auto job = satkit::cli::parse_simulate_config(config);
    std::vector<satkit::sim::CoverageReport> reports;
    reports.reserve(job.dgps.size());
    for (const auto& d : job.dgps) reports.push_back(satkit::sim::run(d, job.plan));

    const auto report_json = satkit::cli::coverage_report_json(reports);
    if (flags.out_prefix.empty()) {
        satkit::cli::coverage_report_csv(std::cout, reports);
    } else {
        auto csv_out = open_output(flags.out_prefix + ".csv");
        satkit::cli::coverage_report_csv(csv_out, reports);
        auto json_out = open_output(flags.out_prefix + ".json");
        json_out << report_json.dump(2) << '\n';
    }
    return 0;
}

int run_oracle(const std::string& input, std::int64_t m, std::uint64_t cap,
               const std::string& json_path) {
    auto in = open_input(input);
    const auto table = satkit::cli::read_science_csv(in, input);
    const auto report = satkit::cli::oracle_report(table, m, cap);
    std::cout << satkit::cli::oracle_table_text(report);
    if (!json_path.empty()) {
        auto out = open_output(json_path);
        out << report.dump(2) << '\n';
    }
    return report.at("all_exact_within_1e-8").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-population randomization inference toolkit"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "intervals and diagnostics for one experiment");
    std::string an_input, an_mode = "exact", an_rho = "neyman", an_out;
    double an_alpha = 0.05;
    bool an_no_adjust = false;
    std::vector<std::string> an_estimands;
    analyze->add_option("input", an_input, "unit-level CSV with columns y,t[,x1..xp]")->required();
    analyze->add_option("--alpha", an_alpha, "interval level alpha");
    analyze->add_option("--mode", an_mode, "variance mode: exact|paper");
    analyze->add_option("--rho", an_rho,
                        "rho assumption: neyman|one|bound:<r>|known:<r>|empirical");
    analyze->add_option("--estimand", an_estimands,
                        "extra estimand: sate|satt|satc|mix:<w>|sato (repeatable)");
    analyze->add_flag("--no-adjust", an_no_adjust, "skip covariate adjustment");
    analyze->add_option("--out", an_out, "write the JSON report here instead of stdout");

    // batch
    auto* batch = app.add_subcommand("batch", "stream aggregate summary rows");
    std::string ba_input, ba_rows, ba_report;
    double ba_alpha = 0.05;
    batch->add_option("input", ba_input, "batch CSV with BatchRow columns")->required();
    batch->add_option("--alpha", ba_alpha, "interval level alpha");
    batch->add_option("--out-rows", ba_rows, "per-(row,estimand) CSV output path");
    batch->add_option("--out-report", ba_report, "aggregate JSON report path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo coverage study");
    SimulateFlags si;
    simulate->add_option("--config", si.config_path, "JSON config file (flags override it)");
    simulate->add_option("--dgp", si.dgp, "random_coefficient|binary|tobit");
    simulate->add_option("--sigma-tau", si.sigma_tau, "treatment-effect sd grid (repeatable)");
    simulate->add_option("--tau", si.tau, "tobit shift");
    simulate->add_option("--p0", si.p0, "binary control marginal");
    simulate->add_option("--p1", si.p1, "binary treated marginal");
    simulate->add_option("--n", si.n, "units per sample");
    simulate->add_option("--seed", si.seed, "master seed");
    simulate->add_option("--p", si.p, "treatment share");
    simulate->add_option("--alpha", si.alpha, "interval level alpha");
    simulate->add_option("--n-samples", si.n_samples, "sample draws");
    simulate->add_option("--n-assignments", si.n_assignments, "assignment draws per sample");
    simulate->add_option("--estimand", si.estimands, "estimand spec (repeatable)");
    simulate->add_option("--mode", si.mode, "variance mode: exact|paper");
    simulate->add_option("--out-prefix", si.out_prefix, "write <prefix>.csv and <prefix>.json");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "certify variance formulas by enumeration");
    std::string or_input, or_json;
    std::int64_t or_m = 0;
    std::uint64_t or_cap = satkit::oracle::kDefaultCap;
    oracle->add_option("input", or_input, "potential-outcome CSV with columns y0,y1")->required();
    oracle->add_option("--m", or_m, "treated-group size")->required();
    oracle->add_option("--cap", or_cap, "assignment enumeration cap");
    oracle->add_option("--out-json", or_json, "also write the verdict table as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze)
            return run_analyze(an_input, an_alpha, an_mode, an_rho, an_estimands, an_no_adjust,
                               an_out);
        if (*batch) return run_batch(ba_input, ba_alpha, ba_rows, ba_report);
        if (*simulate) return run_simulate(si);
        if (*oracle) return run_oracle(or_input, or_m, or_cap, or_json);
    } catch (const satkit::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return satkit::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
