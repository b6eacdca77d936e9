#ifndef SATKIT_CLI_HPP
#define SATKIT_CLI_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satkit/csv.hpp"
#include "satkit/errors.hpp"
#include "satkit/estimators.hpp"
#include "satkit/oracle.hpp"
#include "satkit/simulation.hpp"
#include "satkit/types.hpp"

// Command-level logic behind the CLI binary: ingestion, the single-dataset
// analyzer, the streaming batch analyzer, the simulation driver, and the
// formula verification table. Kept in the library so tests exercise the same
// code paths the binary runs.
namespace satkit::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

// unit-level data: columns y (real), t (0/1), optional x1..xp
inline ObservedExperiment read_unit_csv(std::istream& in, const std::string& source = "input") {
    csv::Reader reader(in, source);
    const auto col_y = reader.column("y");
    const auto col_t = reader.column("t");
    std::vector<std::int64_t> cov_cols;
    for (std::size_t j = 1;; ++j) {
        const auto col = reader.column("x" + std::to_string(j), false);
        if (col < 0) break;
        cov_cols.push_back(col);
    }

    ObservedExperiment obs;
    obs.n_covariates = cov_cols.size();
    csv::Row row;
    while (reader.next(row)) {
        obs.y.push_back(reader.real(row, col_y));
        const auto t = reader.integer(row, col_t);
        if (t != 0 && t != 1)
            fail(errc::parse_error, source + ": line " + std::to_string(row.line) +
                                        ": treatment indicator must be 0 or 1");
        obs.t.push_back(static_cast<std::uint8_t>(t));
        for (auto col : cov_cols) obs.x.push_back(reader.real(row, col));
    }
    validate(obs);
    return obs;
}

// potential-outcome data: columns y0, y1
inline ScienceTable read_science_csv(std::istream& in, const std::string& source = "input") {
    csv::Reader reader(in, source);
    const auto col_y0 = reader.column("y0");
    const auto col_y1 = reader.column("y1");
    ScienceTable table;
    csv::Row row;
    while (reader.next(row)) {
        table.y0.push_back(reader.real(row, col_y0));
        table.y1.push_back(reader.real(row, col_y1));
    }
    validate(table);
    return table;
}

// ---------------------------------------------------------------------------
// Shared JSON pieces
// ---------------------------------------------------------------------------

inline json interval_json(const IntervalResult& r) {
    return json{{"estimand", format_estimand(r.estimand)},
                {"center", r.center},
                {"half_width", r.half_width},
                {"lower", r.lower()},
                {"upper", r.upper()},
                {"level", r.level},
                {"variance", r.variance},
                {"variance_mode", variance_mode_name(r.variance_mode)},
                {"reject_zero", r.rejects_zero()}};
}

// Inverse of interval_json for everything round-trip tests compare.
inline IntervalResult interval_from_json(const json& j) {
    IntervalResult r;
    r.estimand = parse_estimand(j.at("estimand").get<std::string>());
    r.center = j.at("center").get<double>();
    r.half_width = j.at("half_width").get<double>();
    r.level = j.at("level").get<double>();
    r.variance = j.at("variance").get<double>();
    r.variance_mode = j.at("variance_mode").get<std::string>() == "exact"
                          ? VarianceMode::exact
                          : VarianceMode::paper_asymptotic;
    return r;
}

// substitute the ambient --rho assumption into estimands that defer to it
inline EstimandSpec apply_ambient_rho(EstimandSpec spec, const RhoSpec& ambient) {
    const bool needs = spec.kind == EstimandKind::sate || spec.kind == EstimandKind::mix ||
                       spec.kind == EstimandKind::sato;
    if (needs && spec.rho.kind == RhoKind::known && !spec.rho.value) spec.rho = ambient;
    return spec;
}

// ---------------------------------------------------------------------------
// analyze: one unit-level dataset -> full report
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    double alpha = 0.05;
    VarianceMode mode = VarianceMode::exact;
    RhoSpec rho = RhoSpec::neyman();   // ambient assumption for rho-needing estimands
    bool rho_empirical = false;        // replace ambient with the empirical comonotone bound
    std::vector<EstimandSpec> extra;   // requested beyond the standard display
    bool adjust_covariates = true;     // residualize on x columns when present
};

inline json analyze(const ObservedExperiment& input, const AnalyzeOptions& opt) {
    require(opt.alpha > 0.0 && opt.alpha < 1.0, errc::bad_input, "alpha must be in (0,1)");
    ObservedExperiment obs = input;
    const bool adjusted = opt.adjust_covariates && input.n_covariates > 0;
    if (adjusted) obs = covariate_adjust(input);

    const auto summary = summarize(obs);
    const double p = summary.p();
    const double s0 = std::sqrt(summary.s0sq);
    const double s1 = std::sqrt(summary.s1sq);

    RhoSpec ambient = opt.rho;
    std::optional<double> empirical_bound;
    if (opt.rho_empirical) {
        empirical_bound = empirical_rho_bound(obs);
        ambient = RhoSpec::bound(*empirical_bound);
    }

    // the standard three-interval display plus the rho=1 SATE bound
    std::vector<EstimandSpec> wanted = {
        EstimandSpec::sate(RhoSpec::neyman()),
        EstimandSpec::sate(RhoSpec::rho_one()),
        EstimandSpec::satt(),
        EstimandSpec::satc(),
    };
    if (ambient.kind == RhoKind::known || ambient.kind == RhoKind::bound)
        wanted.push_back(EstimandSpec::sate(ambient));
    const std::size_t n_standard = wanted.size();
    for (const auto& spec : opt.extra) wanted.push_back(apply_ambient_rho(spec, ambient));

    // standard display entries degrade per-entry; explicitly requested
    // estimands must succeed or the whole command fails
    json intervals = json::array();
    std::size_t n_ok = 0;
    std::optional<error> first_error;
    for (std::size_t i = 0; i < wanted.size(); ++i) {
        const auto& spec = wanted[i];
        try {
            intervals.push_back(interval_json(interval(summary, spec, opt.alpha, opt.mode)));
            ++n_ok;
        } catch (const error& e) {
            if (i >= n_standard) throw;
            if (!first_error) first_error = e;
            intervals.push_back(json{{"estimand", format_estimand(spec)},
                                     {"error", errc_name(e.code())},
                                     {"message", e.what()}});
        }
    }
    if (n_ok == 0 && first_error) throw *first_error;

    json report;
    report["n"] = summary.n;
    report["m"] = summary.m;
    report["p"] = p;
    report["mean1"] = summary.mean1;
    report["mean0"] = summary.mean0;
    report["s1sq"] = summary.s1sq;
    report["s0sq"] = summary.s0sq;
    report["t_diff"] = summary.t_diff();
    report["alpha"] = opt.alpha;
    report["variance_mode"] = variance_mode_name(opt.mode);
    report["covariate_adjusted"] = adjusted;
    report["intervals"] = intervals;
    if (empirical_bound) report["empirical_rho_bound"] = *empirical_bound;

    try {
        const auto rt = rho_threshold(s0, s1, p);
        report["rho_threshold"] = json{{"value", rt.value}, {"in_range", rt.in_range}};
    } catch (const error&) {
        report["rho_threshold"] = nullptr;
    }
    try {
        const auto vr = variance_ratio_test(summary, opt.alpha);
        report["variance_ratio_test"] = json{{"statistic", vr.statistic},
                                             {"threshold", vr.threshold},
                                             {"p_value", vr.p_value},
                                             {"reject", vr.reject}};
    } catch (const error&) {
        report["variance_ratio_test"] = nullptr;
    }

    // mix weight and estimand distance under the simple reference bounds
    json omegas, mses;
    std::vector<std::pair<std::string, double>> rhos = {
        {"rho_minus_one", -1.0}, {"rho_zero", 0.0}, {"rho_one", 1.0}};
    if ((ambient.kind == RhoKind::known || ambient.kind == RhoKind::bound) && ambient.value)
        rhos.emplace_back("rho_ambient", *ambient.value);
    for (const auto& [label, rho] : rhos) {
        try {
            const auto w = optimal_omega(s0, s1, rho);
            omegas[label] = json{{"omega", w.value}, {"raw", w.raw}, {"in_range", w.in_range}};
        } catch (const error& e) {
            omegas[label] = (e.code() == errc::degenerate_denominator)
                                ? json{{"omega_irrelevant", true}}
                                : json(nullptr);
        }
        const double tau_sq = std::max(0.0, summary.s0sq + summary.s1sq - 2.0 * rho * s0 * s1);
        mses[label] = mse_sate_satt(tau_sq, summary.m, p);
    }
    report["optimal_omega"] = omegas;
    report["mse_sate_satt"] = mses;
    return report;
}

// ---------------------------------------------------------------------------
// batch: stream of per-experiment aggregate rows -> intervals + aggregates
// ---------------------------------------------------------------------------

struct BatchOptions {
    double alpha = 0.05;
};

namespace detail {

inline const std::vector<std::string>& batch_estimands() {
    static const std::vector<std::string> names = {
        "sate:neyman", "sate:one", "satt", "satc",
        "sato:known:-1", "sato:known:0", "sato:known:1"};
    return names;
}

// sato with equal variances and rho = 1 has an omega-free variance; fall back
// to the midpoint mix instead of refusing the row
inline IntervalResult batch_interval(const ExperimentSummary& summary, const EstimandSpec& spec,
                                     double alpha) {
    try {
        return interval(summary, spec, alpha);
    } catch (const error& e) {
        if (e.code() != errc::degenerate_denominator) throw;
        return interval(summary, EstimandSpec::mix(0.5, spec.rho), alpha);
    }
}

// fixed variance-ratio bins shared by the gain and rejection tables
inline const std::vector<double>& ratio_bin_edges() {
    static const std::vector<double> edges = {0.25, 0.5, 0.8, 1.25, 2.0, 4.0};
    return edges;
}

inline std::size_t ratio_bin(double r_sq) {
    const auto& edges = ratio_bin_edges();
    std::size_t b = 0;
    while (b < edges.size() && r_sq >= edges[b]) ++b;
    return b;
}

}  // namespace detail

// Reads BatchRow records (experiment_id,outcome_id,N,m,mean1,mean0,s1sq,s0sq),
// writes one output row per (input row, estimand) in input order, and returns
// the aggregate report. Bad rows are quarantined with a reason; the batch
// never aborts on a row.
inline json run_batch(std::istream& in, std::ostream& rows_out, const BatchOptions& opt) {
    require(opt.alpha > 0.0 && opt.alpha < 1.0, errc::bad_input, "alpha must be in (0,1)");
    csv::Reader reader(in, "batch");
    const auto col_exp = reader.column("experiment_id");
    const auto col_out = reader.column("outcome_id");
    const auto col_n = reader.column("N");
    const auto col_m = reader.column("m");
    const auto col_mean1 = reader.column("mean1");
    const auto col_mean0 = reader.column("mean0");
    const auto col_s1 = reader.column("s1sq");
    const auto col_s0 = reader.column("s0sq");

    csv::Writer writer(rows_out);
    writer.row({"experiment_id", "outcome_id", "estimand", "status", "center", "half_width",
                "lower", "upper", "variance", "reject_zero"});

    const auto& estimands = detail::batch_estimands();
    struct Tally {
        std::uint64_t ok = 0, skipped = 0, rejected = 0;
    };
    std::vector<Tally> tallies(estimands.size());

    struct Bin {
        std::uint64_t count = 0;
        double gain_sum = 0.0;
        std::uint64_t neyman_ok = 0, neyman_rej = 0, sato_ok = 0, sato_rej = 0;
    };
    std::vector<Bin> bins(detail::ratio_bin_edges().size() + 1);

    json skipped_rows = json::array();
    std::uint64_t n_rows = 0, n_ok_rows = 0;

    csv::Row row;
    while (true) {
        try {
            if (!reader.next(row)) break;
        } catch (const error& e) {
            // malformed line: quarantine and keep streaming
            skipped_rows.push_back(json{{"line", reader.line_no()},
                                        {"reason", errc_name(e.code())},
                                        {"message", e.what()}});
            ++n_rows;
            continue;
        }
        ++n_rows;

        ExperimentSummary summary;
        std::string exp_id, out_id;
        try {
            exp_id = row.fields[static_cast<std::size_t>(col_exp)];
            out_id = row.fields[static_cast<std::size_t>(col_out)];
            summary.n = reader.integer(row, col_n);
            summary.m = reader.integer(row, col_m);
            summary.mean1 = reader.real(row, col_mean1);
            summary.mean0 = reader.real(row, col_mean0);
            summary.s1sq = reader.real(row, col_s1);
            summary.s0sq = reader.real(row, col_s0);
            validate(summary);
        } catch (const error& e) {
            skipped_rows.push_back(json{{"line", row.line},
                                        {"experiment_id", exp_id},
                                        {"reason", errc_name(e.code())},
                                        {"message", e.what()}});
            continue;
        }
        ++n_ok_rows;

        std::optional<bool> neyman_reject, sato1_reject;
        for (std::size_t e = 0; e < estimands.size(); ++e) {
            const auto spec = parse_estimand(estimands[e]);
            try {
                const auto iv = detail::batch_interval(summary, spec, opt.alpha);
                writer.row({exp_id, out_id, estimands[e], "ok", csv::format_real(iv.center),
                            csv::format_real(iv.half_width), csv::format_real(iv.lower()),
                            csv::format_real(iv.upper()), csv::format_real(iv.variance),
                            iv.rejects_zero() ? "1" : "0"});
                ++tallies[e].ok;
                if (iv.rejects_zero()) ++tallies[e].rejected;
                if (estimands[e] == "sate:neyman") neyman_reject = iv.rejects_zero();
                if (estimands[e] == "sato:known:1") sato1_reject = iv.rejects_zero();
            } catch (const error& err) {
                writer.row({exp_id, out_id, estimands[e], errc_name(err.code()), "", "", "", "",
                            "", ""});
                ++tallies[e].skipped;
            }
        }

        if (summary.s0sq > 0.0) {
            const double r_sq = summary.s1sq / summary.s0sq;
            auto& bin = bins[detail::ratio_bin(r_sq)];
            ++bin.count;
            bin.gain_sum += length_gain(r_sq, summary.p(), GainBaseline::neyman());
            if (neyman_reject) {
                ++bin.neyman_ok;
                if (*neyman_reject) ++bin.neyman_rej;
            }
            if (sato1_reject) {
                ++bin.sato_ok;
                if (*sato1_reject) ++bin.sato_rej;
            }
        }
    }

    json rates;
    for (std::size_t e = 0; e < estimands.size(); ++e) {
        const auto& t = tallies[e];
        rates[estimands[e]] = json{
            {"n_ok", t.ok},
            {"n_skipped", t.skipped},
            {"rejection_rate", t.ok ? static_cast<double>(t.rejected) / static_cast<double>(t.ok)
                                    : 0.0}};
    }

    json bins_json = json::array();
    const auto& edges = detail::ratio_bin_edges();
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const auto& bin = bins[b];
        json j;
        j["r_sq_min"] = b == 0 ? 0.0 : edges[b - 1];
        if (b < edges.size()) j["r_sq_max"] = edges[b];
        j["count"] = bin.count;
        j["mean_length_gain_vs_neyman"] =
            bin.count ? bin.gain_sum / static_cast<double>(bin.count) : 0.0;
        j["reject_rate_sate_neyman"] =
            bin.neyman_ok ? static_cast<double>(bin.neyman_rej) / static_cast<double>(bin.neyman_ok)
                          : 0.0;
        j["reject_rate_sato_rho1"] =
            bin.sato_ok ? static_cast<double>(bin.sato_rej) / static_cast<double>(bin.sato_ok)
                        : 0.0;
        bins_json.push_back(j);
    }

    return json{{"alpha", opt.alpha},
                {"n_rows", n_rows},
                {"n_analyzed", n_ok_rows},
                {"skipped", skipped_rows},
                {"rejection_rates", rates},
                {"variance_ratio_bins", bins_json}};
}

// ---------------------------------------------------------------------------
// simulate: config -> coverage reports (+ serializers)
// ---------------------------------------------------------------------------

struct SimulateJob {
    std::vector<sim::DgpSpec> dgps;
    sim::ReplicationPlan plan;
};

inline sim::EstimandRequest parse_estimand_request(const std::string& text, VarianceMode mode) {
    return {parse_estimand(text), mode};
}

// Config document:
//   {"dgp": {"kind": "...", "n": ..., "seed": ...,
//            "sigma_tau": x-or-[...], "tau": x-or-[...],
//            "p0": ..., "p1": ..., "coupling": "monotone"|"independent"},
//    "plan": {"n_samples": ..., "n_assignments": ..., "p": ..., "alpha": ...,
//             "estimands": ["satt", "sate:neyman", ...], "mode": "exact"|"paper"}}
// Grid values fan out to one dgp per entry; each grid point gets its own
// derived seed.
inline SimulateJob parse_simulate_config(const json& config) {
    try {
        SimulateJob job;
        const auto& dgp_json = config.at("dgp");
        sim::DgpSpec base;
        const auto kind = dgp_json.at("kind").get<std::string>();
        if (kind == "random_coefficient")
            base.kind = sim::DgpKind::random_coefficient;
        else if (kind == "binary")
            base.kind = sim::DgpKind::binary;
        else if (kind == "tobit")
            base.kind = sim::DgpKind::tobit;
        else
            fail(errc::config_invalid, "unknown dgp kind '" + kind + "'");
        base.n = dgp_json.value("n", static_cast<std::int64_t>(1000));
        base.seed = dgp_json.value("seed", static_cast<std::uint64_t>(0));
        base.p0 = dgp_json.value("p0", 0.1);
        base.p1 = dgp_json.value("p1", 0.2);
        if (dgp_json.contains("coupling")) {
            const auto c = dgp_json.at("coupling").get<std::string>();
            if (c == "monotone")
                base.coupling = sim::BinaryCoupling::monotone;
            else if (c == "independent")
                base.coupling = sim::BinaryCoupling::independent;
            else
                fail(errc::config_invalid, "unknown binary coupling '" + c + "'");
        }

        auto grid_of = [&](const char* key, double fallback) {
            std::vector<double> values;
            if (!dgp_json.contains(key)) {
                values.push_back(fallback);
            } else if (dgp_json.at(key).is_array()) {
                for (const auto& v : dgp_json.at(key)) values.push_back(v.get<double>());
                require(!values.empty(), errc::config_invalid,
                        std::string("empty grid for '") + key + "'");
            } else {
                values.push_back(dgp_json.at(key).get<double>());
            }
            return values;
        };

        std::vector<double> grid = base.kind == sim::DgpKind::tobit ? grid_of("tau", 1.0)
                                   : base.kind == sim::DgpKind::random_coefficient
                                       ? grid_of("sigma_tau", 1.0)
                                       : std::vector<double>{0.0};
        for (std::size_t g = 0; g < grid.size(); ++g) {
            sim::DgpSpec d = base;
            if (d.kind == sim::DgpKind::random_coefficient) d.sigma_tau = grid[g];
            if (d.kind == sim::DgpKind::tobit) d.tau = grid[g];
            d.seed = grid.size() == 1 ? base.seed
                                      : rng::derive_stream(base.seed, static_cast<std::uint64_t>(g));
            sim::validate(d);
            job.dgps.push_back(d);
        }

        const auto& plan_json = config.at("plan");
        job.plan.n_samples = plan_json.value("n_samples", static_cast<std::int64_t>(100));
        job.plan.n_assignments = plan_json.value("n_assignments", static_cast<std::int64_t>(100));
        job.plan.p = plan_json.value("p", 0.5);
        job.plan.alpha = plan_json.value("alpha", 0.05);
        VarianceMode mode = VarianceMode::exact;
        if (plan_json.contains("mode")) {
            const auto m = plan_json.at("mode").get<std::string>();
            if (m == "exact")
                mode = VarianceMode::exact;
            else if (m == "paper")
                mode = VarianceMode::paper_asymptotic;
            else
                fail(errc::config_invalid, "unknown variance mode '" + m + "'");
        }
        std::vector<std::string> estimands = {"satt", "sate:neyman"};
        if (plan_json.contains("estimands")) {
            estimands.clear();
            for (const auto& e : plan_json.at("estimands"))
                estimands.push_back(e.get<std::string>());
        }
        for (const auto& e : estimands)
            job.plan.requests.push_back(parse_estimand_request(e, mode));
        return job;
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        fail(errc::config_invalid, std::string("bad simulate config: ") + e.what());
    }
}

inline json coverage_row_json(const sim::CoverageRow& row) {
    return json{{"estimand", row.estimand},
                {"mode", row.mode},
                {"n_used", row.n_used},
                {"n_skipped", row.n_skipped},
                {"cover_own", row.cover_own},
                {"cover_satt", row.cover_satt},
                {"cover_satc", row.cover_satc},
                {"cover_sate", row.cover_sate},
                {"se_cover_satt", row.se_cover_satt},
                {"se_cover_sate", row.se_cover_sate},
                {"mean_length", row.mean_length},
                {"se_mean_length", row.se_mean_length},
                {"reject_rate", row.reject_rate}};
}

inline json dgp_json(const sim::DgpSpec& dgp) {
    json j{{"kind", sim::dgp_name(dgp.kind)},
           {"parameter", sim::dgp_parameter(dgp)},
           {"n", dgp.n},
           {"seed", dgp.seed}};
    switch (dgp.kind) {
        case sim::DgpKind::random_coefficient:
            j["sigma_tau"] = dgp.sigma_tau;
            break;
        case sim::DgpKind::binary:
            j["p0"] = dgp.p0;
            j["p1"] = dgp.p1;
            j["coupling"] =
                dgp.coupling == sim::BinaryCoupling::monotone ? "monotone" : "independent";
            break;
        case sim::DgpKind::tobit:
            j["tau"] = dgp.tau;
            break;
    }
    return j;
}

inline json coverage_report_json(const std::vector<sim::CoverageReport>& reports) {
    json runs = json::array();
    for (const auto& report : reports) {
        json rows = json::array();
        for (const auto& row : report.rows) rows.push_back(coverage_row_json(row));
        runs.push_back(json{{"dgp", dgp_json(report.dgp)},
                            {"m", report.m},
                            {"plan",
                             json{{"n_samples", report.plan.n_samples},
                                  {"n_assignments", report.plan.n_assignments},
                                  {"p", report.plan.p},
                                  {"alpha", report.plan.alpha}}},
                            {"rows", rows}});
    }
    return json{{"runs", runs}};
}

inline void coverage_report_csv(std::ostream& out, const std::vector<sim::CoverageReport>& reports) {
    csv::Writer writer(out);
    writer.row({"dgp", "parameter", "n", "seed", "p", "alpha", "n_samples", "n_assignments", "m",
                "estimand", "mode", "n_used", "n_skipped", "cover_own", "cover_satt", "cover_satc",
                "cover_sate", "se_cover_satt", "se_cover_sate", "mean_length", "se_mean_length",
                "reject_rate"});
    for (const auto& report : reports) {
        for (const auto& row : report.rows) {
            writer.row({sim::dgp_name(report.dgp.kind), csv::format_real(sim::dgp_parameter(report.dgp)),
                        std::to_string(report.dgp.n), std::to_string(report.dgp.seed),
                        csv::format_real(report.plan.p), csv::format_real(report.plan.alpha),
                        std::to_string(report.plan.n_samples),
                        std::to_string(report.plan.n_assignments), std::to_string(report.m),
                        row.estimand, row.mode, std::to_string(row.n_used),
                        std::to_string(row.n_skipped), csv::format_real(row.cover_own),
                        csv::format_real(row.cover_satt), csv::format_real(row.cover_satc),
                        csv::format_real(row.cover_sate), csv::format_real(row.se_cover_satt),
                        csv::format_real(row.se_cover_sate), csv::format_real(row.mean_length),
                        csv::format_real(row.se_mean_length), csv::format_real(row.reject_rate)});
        }
    }
}

// ---------------------------------------------------------------------------
// oracle: potential-outcome table -> formula certification report
// ---------------------------------------------------------------------------

inline json oracle_report(const ScienceTable& table, std::int64_t m,
                          std::uint64_t cap = oracle::kDefaultCap) {
    const auto verdicts = oracle::verify_all(table, m, cap);
    json rows = json::array();
    bool all_exact_ok = true;
    for (const auto& v : verdicts) {
        const bool exact_mode = v.mode == VarianceMode::exact;
        if (exact_mode && v.relative_error > 1e-8) all_exact_ok = false;
        rows.push_back(json{{"formula", oracle::formula_name(v.formula_id)},
                            {"mode", variance_mode_name(v.mode)},
                            {"omega", v.omega},
                            {"exact_value", v.exact_value},
                            {"formula_value", v.formula_value},
                            {"relative_error", v.relative_error}});
    }
    return json{{"n", table.size()},
                {"m", m},
                {"n_assignments", oracle::n_assignments(table.size(), m)},
                {"all_exact_within_1e-8", all_exact_ok},
                {"verdicts", rows}};
}

inline std::string oracle_table_text(const json& report) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %-6s %-6s %16s %16s %12s\n", "formula", "mode",
                  "omega", "exact", "formula", "rel_error");
    out += line;
    for (const auto& v : report.at("verdicts")) {
        std::snprintf(line, sizeof(line), "%-18s %-6s %-6.2f %16.8g %16.8g %12.3e\n",
                      v.at("formula").get<std::string>().c_str(),
                      v.at("mode").get<std::string>().c_str(), v.at("omega").get<double>(),
                      v.at("exact_value").get<double>(), v.at("formula_value").get<double>(),
                      v.at("relative_error").get<double>());
        out += line;
    }
    return out;
}

}  // namespace satkit::cli

#endif
