#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "satkit/cli.hpp"

using namespace satkit;
using cli::json;

namespace {

template <typename F>
std::optional<errc> thrown_code(F&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    return std::nullopt;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << contents;
    return path;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(SATKIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("csv reader reports 1-based line numbers and column names") {
    std::istringstream in("y,t\n1.5,1\noops,0\n");
    csv::Reader reader(in, "data.csv");
    csv::Row row;
    REQUIRE(reader.next(row));
    CHECK(reader.real(row, 0) == 1.5);
    REQUIRE(reader.next(row));
    try {
        reader.real(row, 0);
        FAIL("expected parse_error");
    } catch (const error& e) {
        CHECK(e.code() == errc::parse_error);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("'y'") != std::string::npos);
    }
}

TEST_CASE("csv reader rejects ragged rows and missing columns") {
    std::istringstream ragged("y,t\n1,0,9\n");
    csv::Reader reader(ragged, "in");
    csv::Row row;
    CHECK(thrown_code([&] { reader.next(row); }) == errc::parse_error);

    std::istringstream missing("a,b\n1,2\n");
    CHECK(thrown_code([&] { csv::Reader r(missing, "in"); (void)r.column("y"); }) ==
          errc::parse_error);
}

TEST_CASE("float formatting round-trips doubles exactly") {
    for (double v : {1.0 / 3.0, 0.1, 12345.6789e-7, -2.0 / 7.0}) {
        const auto s = csv::format_real(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("unit csv ingestion, with and without covariates") {
    std::istringstream in("y,t,x1\n1.0,1,0.5\n2.0,0,1.5\n3.0,1,2.5\n4.0,0,3.5\n");
    const auto obs = cli::read_unit_csv(in, "unit.csv");
    CHECK(obs.size() == 4);
    CHECK(obs.n_covariates == 1);
    CHECK(obs.treated_count() == 2);

    std::istringstream bad_t("y,t\n1,2\n2,0\n");
    CHECK(thrown_code([&] { cli::read_unit_csv(bad_t, "unit.csv"); }) == errc::parse_error);
}

TEST_CASE("analyze reproduces the worked satt example") {
    ObservedExperiment obs;
    obs.y = {0, 2, 1, 3};
    obs.t = {1, 1, 0, 0};
    cli::AnalyzeOptions opt;
    const auto report = cli::analyze(obs, opt);
    CHECK(report.at("t_diff").get<double>() == Approx(-1.0));
    bool found = false;
    for (const auto& iv : report.at("intervals")) {
        if (iv.at("estimand") == "satt") {
            found = true;
            CHECK(iv.at("center").get<double>() == Approx(-1.0));
            CHECK(iv.at("half_width").get<double>() == Approx(2.7718).margin(1e-4));
        }
    }
    CHECK(found);
}

TEST_CASE("analyze on constant outcomes raises degenerate variance") {
    ObservedExperiment obs;
    obs.y = {5, 5, 5, 5};
    obs.t = {1, 1, 0, 0};
    CHECK(thrown_code([&] { cli::analyze(obs, {}); }) == errc::degenerate_variance);
}

TEST_CASE("analyze mix estimand matches the estimator cross-check") {
    ObservedExperiment obs;
    obs.y = {0.4, 2.2, 1.9, 3.0, 1.1, 0.7, 2.8, 1.5};
    obs.t = {1, 1, 1, 1, 0, 0, 0, 0};
    cli::AnalyzeOptions opt;
    opt.rho = RhoSpec::known(0.5);
    opt.extra = {parse_estimand("mix:0.5")};
    const auto report = cli::analyze(obs, opt);
    const auto summary = summarize(obs);
    const double expected =
        recentered_variance(summary, EstimandSpec::mix(0.5, RhoSpec::known(0.5)));
    bool found = false;
    for (const auto& iv : report.at("intervals")) {
        const auto label = iv.at("estimand").get<std::string>();
        if (label.rfind("mix:0.5", 0) == 0) {
            found = true;
            CHECK(iv.at("variance").get<double>() == Approx(expected).epsilon(1e-12));
        }
    }
    CHECK(found);
}

TEST_CASE("interval json round-trips endpoint-exactly") {
    ObservedExperiment obs;
    obs.y = {0.4, 2.2, 1.9, 3.0, 1.1, 0.7, 2.8, 1.5};
    obs.t = {1, 1, 1, 1, 0, 0, 0, 0};
    const auto iv = interval(summarize(obs), EstimandSpec::satt(), 0.05);
    const auto serialized = cli::interval_json(iv).dump();
    const auto back = cli::interval_from_json(json::parse(serialized));
    CHECK(back.center == iv.center);
    CHECK(back.half_width == iv.half_width);
    CHECK(back.lower() == iv.lower());
    CHECK(back.upper() == iv.upper());
    CHECK(back.variance == iv.variance);
}

TEST_CASE("batch quarantines bad rows and aggregates the rest") {
    const std::string input =
        "experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq\n"
        "e1,clicks,1000,500,1.2,1.0,2.0,1.0\n"
        "e2,clicks,100,100,1.0,1.0,1.0,1.0\n"      // m = N: invalid
        "e3,clicks,100,50,0.5,0.5,not_a_number,1\n"  // parse failure
        "e4,clicks,400,100,0.1,0.1,1.0,1.0\n";
    std::istringstream in(input);
    std::ostringstream rows;
    const auto report = cli::run_batch(in, rows, {});
    CHECK(report.at("n_rows").get<int>() == 4);
    CHECK(report.at("n_analyzed").get<int>() == 2);
    CHECK(report.at("skipped").size() == 2);
    // 7 estimand rows per analyzed input row, plus the header
    const auto text = rows.str();
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 1 + 2 * 7);
    CHECK(text.find("sato:known:1") != std::string::npos);

    const double sate_rate = report.at("rejection_rates")
                                 .at("sate:neyman")
                                 .at("rejection_rate")
                                 .get<double>();
    CHECK(sate_rate >= 0.0);
    CHECK(sate_rate <= 1.0);
}

TEST_CASE("batch single-row gain lands in the right ratio bin") {
    // s1sq = 2 s0sq at p = 1/2: the 18.35% headline gain
    const std::string input =
        "experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq\n"
        "e1,metric,1000,500,0.0,0.0,2.0,1.0\n";
    std::istringstream in(input);
    std::ostringstream rows;
    const auto report = cli::run_batch(in, rows, {});
    bool found = false;
    for (const auto& bin : report.at("variance_ratio_bins")) {
        if (bin.at("count").get<int>() == 1) {
            found = true;
            CHECK(bin.at("mean_length_gain_vs_neyman").get<double>() ==
                  Approx(0.1835).margin(5e-5));
        }
    }
    CHECK(found);
}

TEST_CASE("batch rows with zero mean difference and tiny variances never reject") {
    std::string input = "experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq\n";
    for (int i = 0; i < 5; ++i)
        input += "e" + std::to_string(i) + ",m,1000,500,1.0,1.0,1e-9,1e-9\n";
    std::istringstream in(input);
    std::ostringstream rows;
    const auto report = cli::run_batch(in, rows, {});
    for (const auto& [name, stats] : report.at("rejection_rates").items()) {
        INFO(name);
        CHECK(stats.at("rejection_rate").get<double>() == 0.0);
    }
}

TEST_CASE("batch aggregates are row-order independent") {
    const std::string header = "experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq\n";
    std::vector<std::string> rows = {
        "a,m,1000,500,1.3,1.0,2.0,1.0\n", "b,m,800,200,0.2,0.3,1.0,1.5\n",
        "c,m,600,300,0.0,0.0,0.7,0.7\n", "d,m,2000,1000,2.0,1.9,3.0,1.0\n"};
    std::istringstream forward(header + rows[0] + rows[1] + rows[2] + rows[3]);
    std::istringstream backward(header + rows[3] + rows[2] + rows[1] + rows[0]);
    std::ostringstream sink_a, sink_b;
    const auto a = cli::run_batch(forward, sink_a, {});
    const auto b = cli::run_batch(backward, sink_b, {});
    CHECK(a.at("rejection_rates") == b.at("rejection_rates"));
    CHECK(a.at("variance_ratio_bins") == b.at("variance_ratio_bins"));
}

TEST_CASE("synthetic heterogeneous batch: sato rejects at least as often as sate") {
    // build batch rows from simulated experiments with a real treatment effect
    // spread, then check the rejection-rate ordering the aggregate table shows
    sim::DgpSpec dgp;
    dgp.kind = sim::DgpKind::random_coefficient;
    dgp.sigma_tau = 2.0;
    dgp.n = 400;
    dgp.seed = 31415u;
    std::string input = "experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq\n";
    for (int rep = 0; rep < 60; ++rep) {
        auto d = dgp;
        d.seed = dgp.seed + static_cast<std::uint64_t>(rep);
        const auto table = sim::generate(d);
        auto stream = rng::Stream(rng::derive_stream(d.seed, 1));
        ObservedExperiment obs;
        obs.t = rng::sample_assignment(d.n, d.n / 2, stream);
        obs.y.resize(table.y0.size());
        for (std::size_t i = 0; i < obs.y.size(); ++i)
            obs.y[i] = obs.t[i] ? table.y1[i] : table.y0[i];
        const auto s = summarize(obs);
        input += "e" + std::to_string(rep) + ",m," + std::to_string(s.n) + "," +
                 std::to_string(s.m) + "," + csv::format_real(s.mean1) + "," +
                 csv::format_real(s.mean0) + "," + csv::format_real(s.s1sq) + "," +
                 csv::format_real(s.s0sq) + "\n";
    }
    std::istringstream in(input);
    std::ostringstream sink;
    const auto report = cli::run_batch(in, sink, {});
    const auto& rates = report.at("rejection_rates");
    const double sato = rates.at("sato:known:1").at("rejection_rate").get<double>();
    const double sate = rates.at("sate:neyman").at("rejection_rate").get<double>();
    CHECK(sato >= sate);
}

TEST_CASE("empirical rho bound flows into the report") {
    ObservedExperiment obs;
    obs.y = {0.4, 2.2, 1.9, 3.0, 1.1, 0.7, 2.8, 1.5};
    obs.t = {1, 1, 1, 1, 0, 0, 0, 0};
    cli::AnalyzeOptions opt;
    opt.rho_empirical = true;
    const auto report = cli::analyze(obs, opt);
    REQUIRE(report.contains("empirical_rho_bound"));
    const double bound = report.at("empirical_rho_bound").get<double>();
    CHECK(bound <= 1.0);
    CHECK(bound >= -1.0);
    bool found = false;
    for (const auto& iv : report.at("intervals"))
        if (iv.at("estimand").get<std::string>().rfind("sate:bound:", 0) == 0) found = true;
    CHECK(found);
}

TEST_CASE("simulate config parsing fans out grids and validates") {
    const auto config = json::parse(R"({
        "dgp": {"kind": "random_coefficient", "n": 200, "seed": 5, "sigma_tau": [0, 0.5, 1]},
        "plan": {"n_samples": 3, "n_assignments": 4, "p": 0.5, "alpha": 0.05,
                 "estimands": ["satt", "sate:neyman"]}
    })");
    const auto job = cli::parse_simulate_config(config);
    CHECK(job.dgps.size() == 3);
    CHECK(job.plan.requests.size() == 2);
    CHECK(job.dgps[0].sigma_tau == 0.0);
    CHECK(job.dgps[2].sigma_tau == 1.0);
    // distinct derived seeds per grid point
    CHECK(job.dgps[0].seed != job.dgps[1].seed);

    CHECK(thrown_code([&] {
              cli::parse_simulate_config(json::parse(R"({"dgp": {"kind": "nope"}, "plan": {}})"));
          }) == errc::config_invalid);
    CHECK(thrown_code([&] { cli::parse_simulate_config(json::parse(R"({})")); }) ==
          errc::config_invalid);
}

TEST_CASE("simulate emits one row per dgp point and estimand") {
    const auto config = json::parse(R"({
        "dgp": {"kind": "random_coefficient", "n": 60, "seed": 5, "sigma_tau": [0, 1]},
        "plan": {"n_samples": 2, "n_assignments": 3, "p": 0.5, "alpha": 0.05,
                 "estimands": ["satt", "sate:neyman"]}
    })");
    const auto job = cli::parse_simulate_config(config);
    std::vector<sim::CoverageReport> reports;
    for (const auto& d : job.dgps) reports.push_back(sim::run(d, job.plan));
    std::ostringstream csv_out;
    cli::coverage_report_csv(csv_out, reports);
    std::size_t lines = 0;
    for (char c : csv_out.str()) lines += c == '\n';
    CHECK(lines == 1 + 2 * 2);
    const auto j = cli::coverage_report_json(reports);
    CHECK(j.at("runs").size() == 2);
}

TEST_CASE("oracle report flags the denominator slippage but passes exact mode") {
    const ScienceTable table{{0, 0, 0, 0}, {1, -1, -100, 100}};
    const auto report = cli::oracle_report(table, 2);
    CHECK(report.at("all_exact_within_1e-8").get<bool>());
    CHECK(report.at("n_assignments").get<int>() == 6);
    bool saw_gap = false;
    for (const auto& v : report.at("verdicts")) {
        if (v.at("formula") == "cov_satt_satc" && v.at("mode") == "paper")
            saw_gap = v.at("relative_error").get<double>() > 0.3;
    }
    CHECK(saw_gap);
    CHECK(!cli::oracle_table_text(report).empty());
}

// ---------------------------------------------------------------------------
// subprocess checks: each error class maps to its own exit code
// ---------------------------------------------------------------------------

TEST_CASE("cli exit codes") {
    const auto unit = temp_file("satkit_unit.csv", "y,t\n0,1\n2,1\n1,0\n3,0\n");
    CHECK(run_cli("analyze " + unit.string()) == 0);

    const auto constant = temp_file("satkit_const.csv", "y,t\n5,1\n5,1\n5,0\n5,0\n");
    CHECK(run_cli("analyze " + constant.string()) == 3);  // degenerate variance

    const auto broken = temp_file("satkit_broken.csv", "y,t\n5,definitely\n5,0\n");
    CHECK(run_cli("analyze " + broken.string()) == 2);  // parse error

    const auto science = temp_file("satkit_science.csv", "y0,y1\n0,1\n0,-1\n0,-100\n0,100\n");
    CHECK(run_cli("oracle " + science.string() + " --m 2") == 0);
    CHECK(run_cli("oracle " + science.string() + " --m 0") == 17);  // precondition
    CHECK(run_cli("oracle " + science.string() + " --m 2 --cap 2") == 4);  // enumeration cap

    const auto bad_config = temp_file("satkit_bad_config.json", R"({"dgp": {"kind": "zzz"}})");
    CHECK(run_cli("simulate --config " + bad_config.string()) == 5);

    CHECK(run_cli("analyze " + unit.string() + " --estimand sato") == 7);  // rho required

    const auto lone = temp_file("satkit_lone.csv", "y,t\n1,1\n2,0\n3,0\n4,0\n");
    CHECK(run_cli("analyze " + lone.string()) == 6);  // one-unit treated group

    // outcomes exactly linear in the covariate: residualization leaves zeros
    const auto fitted = temp_file("satkit_fitted.csv",
                                  "y,t,x1\n2,1,1\n4,0,2\n6,1,3\n8,0,4\n10,1,5\n12,0,6\n");
    CHECK(run_cli("analyze " + fitted.string()) == 3);
    CHECK(run_cli("analyze " + fitted.string() + " --no-adjust") == 0);
}

TEST_CASE("simulate runs are byte-identical for a fixed seed") {
    const auto config = temp_file("satkit_sim_config.json", R"({
        "dgp": {"kind": "tobit", "n": 80, "seed": 42, "tau": 1.0},
        "plan": {"n_samples": 3, "n_assignments": 5, "p": 0.5, "alpha": 0.05,
                 "estimands": ["satt", "satc"]}
    })");
    const auto prefix_a = std::filesystem::temp_directory_path() / "satkit_sim_a";
    const auto prefix_b = std::filesystem::temp_directory_path() / "satkit_sim_b";
    REQUIRE(run_cli("simulate --config " + config.string() + " --out-prefix " +
                    prefix_a.string()) == 0);
    REQUIRE(run_cli("simulate --config " + config.string() + " --out-prefix " +
                    prefix_b.string()) == 0);
    CHECK(slurp(prefix_a.string() + ".csv") == slurp(prefix_b.string() + ".csv"));
    CHECK(slurp(prefix_a.string() + ".json") == slurp(prefix_b.string() + ".json"));
    CHECK_FALSE(slurp(prefix_a.string() + ".csv").empty());
}
