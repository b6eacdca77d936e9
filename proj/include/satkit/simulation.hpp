#ifndef SATKIT_SIMULATION_HPP
#define SATKIT_SIMULATION_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "satkit/errors.hpp"
#include "satkit/estimators.hpp"
#include "satkit/normal.hpp"
#include "satkit/rng.hpp"
#include "satkit/types.hpp"

// Seeded Monte Carlo engine: three data generating processes, a two-level
// (sample x assignment) replication design, and distributional diagnostics.
namespace satkit::sim {

enum class DgpKind { random_coefficient, binary, tobit };
enum class BinaryCoupling { monotone, independent };

struct DgpSpec {
    DgpKind kind = DgpKind::random_coefficient;
    std::int64_t n = 1000;
    std::uint64_t seed = 0;
    // random_coefficient: y0 ~ N(10,1), tau ~ N(0, sigma_tau^2), y1 = y0 + tau
    double sigma_tau = 1.0;
    // binary: marginals P(y0=1)=p0, P(y1=1)=p1 under the chosen coupling
    double p0 = 0.1;
    double p1 = 0.2;
    BinaryCoupling coupling = BinaryCoupling::monotone;
    // tobit: y0 ~ N(0,1), y1 = y0 + tau * 1[y0 >= 0]
    double tau = 1.0;
};

inline std::string dgp_name(DgpKind k) {
    switch (k) {
        case DgpKind::random_coefficient: return "random_coefficient";
        case DgpKind::binary: return "binary";
        case DgpKind::tobit: return "tobit";
    }
    return "?";
}

// The scalar the coverage figures sweep over.
inline double dgp_parameter(const DgpSpec& d) {
    switch (d.kind) {
        case DgpKind::random_coefficient: return d.sigma_tau;
        case DgpKind::binary: return d.p1 - d.p0;
        case DgpKind::tobit: return d.tau;
    }
    return 0.0;
}

inline void validate(const DgpSpec& d) {
    require(d.n >= 4, errc::config_invalid, "dgp: n must be at least 4");
    switch (d.kind) {
        case DgpKind::random_coefficient:
            require(d.sigma_tau >= 0.0, errc::config_invalid, "dgp: sigma_tau must be >= 0");
            break;
        case DgpKind::binary:
            require(d.p0 >= 0.0 && d.p0 <= 0.5, errc::config_invalid, "dgp: need 0 <= p0 <= 1/2");
            require(d.p1 > d.p0 && d.p1 <= 0.5, errc::config_invalid, "dgp: need p0 < p1 <= 1/2");
            break;
        case DgpKind::tobit:
            require(d.tau > 0.0, errc::config_invalid, "dgp: tau must be positive");
            break;
    }
}

namespace detail {

inline ScienceTable generate_with(const DgpSpec& dgp, rng::Stream stream) {
    ScienceTable table;
    const auto n = static_cast<std::size_t>(dgp.n);
    table.y0.resize(n);
    table.y1.resize(n);
    switch (dgp.kind) {
        case DgpKind::random_coefficient:
            for (std::size_t i = 0; i < n; ++i) {
                table.y0[i] = 10.0 + stream.next_normal();
                table.y1[i] = table.y0[i] + dgp.sigma_tau * stream.next_normal();
            }
            break;
        case DgpKind::binary:
            if (dgp.coupling == BinaryCoupling::monotone) {
                require(dgp.p0 <= dgp.p1, errc::invalid_marginals,
                        "binary dgp: monotone coupling needs p0 <= p1");
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = stream.next_unit();
                    table.y0[i] = u < dgp.p0 ? 1.0 : 0.0;
                    table.y1[i] = u < dgp.p1 ? 1.0 : 0.0;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    table.y0[i] = stream.next_bernoulli(dgp.p0) ? 1.0 : 0.0;
                    table.y1[i] = stream.next_bernoulli(dgp.p1) ? 1.0 : 0.0;
                }
            }
            break;
        case DgpKind::tobit:
            for (std::size_t i = 0; i < n; ++i) {
                table.y0[i] = stream.next_normal();
                table.y1[i] = table.y0[i] + (table.y0[i] >= 0.0 ? dgp.tau : 0.0);
            }
            break;
    }
    return table;
}

}  // namespace detail

inline ScienceTable generate(const DgpSpec& dgp) {
    validate(dgp);
    return detail::generate_with(dgp, rng::Stream(rng::derive_stream(dgp.seed, 0)));
}

// ---------------------------------------------------------------------------
// Replication engine
// ---------------------------------------------------------------------------

struct EstimandRequest {
    EstimandSpec spec;
    VarianceMode mode = VarianceMode::exact;
};

struct ReplicationPlan {
    std::int64_t n_samples = 100;
    std::int64_t n_assignments = 100;
    double p = 0.5;
    double alpha = 0.05;
    std::vector<EstimandRequest> requests;
};

inline void validate(const ReplicationPlan& plan, std::int64_t n) {
    require(plan.n_samples >= 1 && plan.n_assignments >= 1, errc::config_invalid,
            "plan: replication counts must be >= 1");
    require(plan.p > 0.0 && plan.p < 1.0, errc::config_invalid, "plan: p must be in (0,1)");
    require(plan.alpha > 0.0 && plan.alpha < 1.0, errc::config_invalid,
            "plan: alpha must be in (0,1)");
    require(!plan.requests.empty(), errc::config_invalid, "plan: no estimands requested");
    const auto m = static_cast<std::int64_t>(std::llround(plan.p * static_cast<double>(n)));
    require(m >= 2 && n - m >= 2, errc::config_invalid,
            "plan: p leaves fewer than 2 units in a group");
}

struct CoverageRow {
    std::string estimand;
    std::string mode;
    std::uint64_t n_used = 0;
    std::uint64_t n_skipped = 0;  // degenerate-variance replications
    double cover_own = 0.0;       // coverage of the realized requested estimand
    double cover_satt = 0.0;
    double cover_satc = 0.0;
    double cover_sate = 0.0;
    double se_cover_satt = 0.0;
    double se_cover_sate = 0.0;
    double mean_length = 0.0;
    double se_mean_length = 0.0;
    double reject_rate = 0.0;  // H0: estimand = 0
};

struct CoverageReport {
    DgpSpec dgp;
    ReplicationPlan plan;
    std::int64_t m = 0;
    std::vector<CoverageRow> rows;
};

namespace detail {

struct RequestTally {
    // per-sample partial means, combined after the sample loop so the
    // reduction order is fixed regardless of any future parallel split
    std::vector<double> sample_cover_own, sample_cover_satt, sample_cover_satc, sample_cover_sate;
    std::vector<double> sample_length, sample_reject;
    std::vector<double> sample_used;
    std::uint64_t skipped = 0;
};

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double se_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// omega implied by the request for the realized-estimand coverage target
inline double resolve_own_omega(const EstimandRequest& req, const ScienceMoments& mo, double p) {
    switch (req.spec.kind) {
        case EstimandKind::sate: return p;
        case EstimandKind::satt: return 1.0;
        case EstimandKind::satc: return 0.0;
        case EstimandKind::mix: return req.spec.omega;
        case EstimandKind::sato: {
            double rho;
            if (req.spec.rho.kind == RhoKind::rho_one)
                rho = 1.0;
            else if (req.spec.rho.value)
                rho = *req.spec.rho.value;
            else {
                require(mo.rho.has_value(), errc::rho_undefined,
                        "sato request: table rho is undefined");
                rho = *mo.rho;
            }
            return optimal_omega(std::sqrt(mo.sigma0_sq), std::sqrt(mo.sigma1_sq), rho).value;
        }
    }
    return p;
}

}  // namespace detail

// Two-level replication: per sample draw a fresh table, per assignment draw a
// fresh complete randomization, build every requested interval from the
// observed data, and record coverage of the realized estimands. Degenerate
// replications are counted, never silently dropped.
inline CoverageReport run(const DgpSpec& dgp, const ReplicationPlan& plan) {
    validate(dgp);
    validate(plan, dgp.n);
    const auto n = dgp.n;
    const auto m = static_cast<std::int64_t>(std::llround(plan.p * static_cast<double>(n)));

    std::vector<detail::RequestTally> tallies(plan.requests.size());

    ObservedExperiment obs;
    obs.y.resize(static_cast<std::size_t>(n));

    for (std::int64_t s = 0; s < plan.n_samples; ++s) {
        const auto table = detail::generate_with(
            dgp, rng::Stream(rng::derive_stream(dgp.seed, 2 * static_cast<std::uint64_t>(s))));
        const auto mo = science_moments(table);
        const auto assign_root = rng::derive_stream(dgp.seed, 2 * static_cast<std::uint64_t>(s) + 1);

        // a degenerate sample (constant column) can make a sato weight
        // unresolvable; such requests are skipped for this sample and counted
        std::vector<std::optional<double>> own_omega(plan.requests.size());
        for (std::size_t r = 0; r < plan.requests.size(); ++r) {
            try {
                own_omega[r] = detail::resolve_own_omega(plan.requests[r], mo, plan.p);
            } catch (const error& e) {
                if (e.code() != errc::rho_undefined && e.code() != errc::zero_sigma &&
                    e.code() != errc::degenerate_denominator)
                    throw;
                own_omega[r] = std::nullopt;
            }
        }

        struct SampleAcc {
            double own = 0, satt = 0, satc = 0, sate = 0, length = 0, reject = 0;
            std::uint64_t used = 0;
        };
        std::vector<SampleAcc> acc(plan.requests.size());

        for (std::int64_t a = 0; a < plan.n_assignments; ++a) {
            auto stream = rng::Stream(rng::derive_stream(assign_root, static_cast<std::uint64_t>(a)));
            obs.t = rng::sample_assignment(n, m, stream);

            double satt_sum = 0.0, satc_sum = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                obs.y[u] = obs.t[u] ? table.y1[u] : table.y0[u];
                (obs.t[u] ? satt_sum : satc_sum) += table.y1[u] - table.y0[u];
            }
            const double satt = satt_sum / static_cast<double>(m);
            const double satc = satc_sum / static_cast<double>(n - m);
            const auto summary = summarize(obs);

            for (std::size_t r = 0; r < plan.requests.size(); ++r) {
                const auto& req = plan.requests[r];
                if (!own_omega[r]) {
                    ++tallies[r].skipped;
                    continue;
                }
                // requests whose rho is known-from-table read the drawn
                // table's true correlation (the oracle comparison lines)
                EstimandSpec spec = req.spec;
                if (spec.rho.kind == RhoKind::known && !spec.rho.value) {
                    if (!mo.rho.has_value()) {
                        ++tallies[r].skipped;
                        continue;
                    }
                    spec.rho = RhoSpec::known(*mo.rho);
                }
                IntervalResult iv;
                try {
                    iv = interval(summary, spec, plan.alpha, req.mode);
                } catch (const error& e) {
                    if (e.code() == errc::degenerate_variance ||
                        e.code() == errc::degenerate_denominator ||
                        e.code() == errc::zero_sigma || e.code() == errc::rho_undefined) {
                        ++tallies[r].skipped;
                        continue;
                    }
                    throw;
                }
                const double own = *own_omega[r] * satt + (1.0 - *own_omega[r]) * satc;
                auto& sa = acc[r];
                sa.own += iv.contains(own) ? 1.0 : 0.0;
                sa.satt += iv.contains(satt) ? 1.0 : 0.0;
                sa.satc += iv.contains(satc) ? 1.0 : 0.0;
                sa.sate += iv.contains(mo.sate) ? 1.0 : 0.0;
                sa.length += 2.0 * iv.half_width;
                sa.reject += iv.rejects_zero() ? 1.0 : 0.0;
                ++sa.used;
            }
        }

        for (std::size_t r = 0; r < plan.requests.size(); ++r) {
            const auto& sa = acc[r];
            auto& tally = tallies[r];
            if (sa.used == 0) continue;
            const double used = static_cast<double>(sa.used);
            tally.sample_cover_own.push_back(sa.own / used);
            tally.sample_cover_satt.push_back(sa.satt / used);
            tally.sample_cover_satc.push_back(sa.satc / used);
            tally.sample_cover_sate.push_back(sa.sate / used);
            tally.sample_length.push_back(sa.length / used);
            tally.sample_reject.push_back(sa.reject / used);
            tally.sample_used.push_back(used);
        }
    }

    CoverageReport report;
    report.dgp = dgp;
    report.plan = plan;
    report.m = m;
    for (std::size_t r = 0; r < plan.requests.size(); ++r) {
        const auto& req = plan.requests[r];
        const auto& tally = tallies[r];
        CoverageRow row;
        row.estimand = format_estimand(req.spec);
        row.mode = variance_mode_name(req.mode);
        for (double u : tally.sample_used) row.n_used += static_cast<std::uint64_t>(u);
        row.n_skipped = tally.skipped;
        row.cover_own = detail::mean_of(tally.sample_cover_own);
        row.cover_satt = detail::mean_of(tally.sample_cover_satt);
        row.cover_satc = detail::mean_of(tally.sample_cover_satc);
        row.cover_sate = detail::mean_of(tally.sample_cover_sate);
        row.se_cover_satt = detail::se_of_mean(tally.sample_cover_satt);
        row.se_cover_sate = detail::se_of_mean(tally.sample_cover_sate);
        row.mean_length = detail::mean_of(tally.sample_length);
        row.se_mean_length = detail::se_of_mean(tally.sample_length);
        row.reject_rate = detail::mean_of(tally.sample_reject);
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Distributional diagnostic: KS distance of the standardized recentered
// statistic, standardized by the table's true (exact-mode) variance, against
// the standard normal limit.
// ---------------------------------------------------------------------------

struct NormalityResult {
    double ks_statistic = 0.0;
    double p_value = 0.0;
    std::int64_t n_assignments = 0;
};

inline NormalityResult normality_diagnostic(const ScienceTable& table, std::int64_t m,
                                            std::int64_t n_assignments, const EstimandSpec& spec,
                                            std::uint64_t seed) {
    validate(table);
    const auto n = table.size();
    require(m >= 1 && m <= n - 1, errc::bad_input, "normality: need 1 <= m <= n-1");
    require(n_assignments >= 10, errc::bad_input, "normality: need at least 10 assignments");

    const auto mo = science_moments(table);
    EstimandSpec resolved = spec;
    if (resolved.rho.kind == RhoKind::known && !resolved.rho.value && mo.rho)
        resolved.rho = RhoSpec::known(*mo.rho);
    const double variance =
        recentered_variance(Moments::from_science(table, m), resolved, VarianceMode::exact);
    if (!(variance > 0.0))
        fail(errc::degenerate_variance,
             "normality: the recentered statistic has zero variance (constant outcomes)");
    const double sd = std::sqrt(variance);

    const double omega = [&] {
        switch (spec.kind) {
            case EstimandKind::satt: return 1.0;
            case EstimandKind::satc: return 0.0;
            case EstimandKind::mix: return spec.omega;
            default: return static_cast<double>(m) / static_cast<double>(n);
        }
    }();

    std::vector<double> z(static_cast<std::size_t>(n_assignments));
    auto root = rng::derive_stream(seed, 0x5a17);
    for (std::int64_t a = 0; a < n_assignments; ++a) {
        auto stream = rng::Stream(rng::derive_stream(root, static_cast<std::uint64_t>(a)));
        const auto t = rng::sample_assignment(n, m, stream);
        double sum1 = 0.0, sum0 = 0.0, satt_sum = 0.0, satc_sum = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            if (t[u]) {
                sum1 += table.y1[u];
                satt_sum += table.y1[u] - table.y0[u];
            } else {
                sum0 += table.y0[u];
                satc_sum += table.y1[u] - table.y0[u];
            }
        }
        const double tdiff =
            sum1 / static_cast<double>(m) - sum0 / static_cast<double>(n - m);
        const double satt = satt_sum / static_cast<double>(m);
        const double satc = satc_sum / static_cast<double>(n - m);
        const double estimand = omega * satt + (1.0 - omega) * satc;
        z[static_cast<std::size_t>(a)] = (tdiff - estimand) / sd;
    }

    const auto ks = ks_test_standard_normal(std::move(z));
    return {ks.statistic, ks.p_value, n_assignments};
}

inline NormalityResult normality_diagnostic(const DgpSpec& dgp, double p,
                                            std::int64_t n_assignments,
                                            const EstimandSpec& spec) {
    validate(dgp);
    require(p > 0.0 && p < 1.0, errc::config_invalid, "normality: p must be in (0,1)");
    const auto table = generate(dgp);
    const auto m = static_cast<std::int64_t>(std::llround(p * static_cast<double>(dgp.n)));
    return normality_diagnostic(table, m, n_assignments, spec,
                                rng::derive_stream(dgp.seed, 0xd1a6));
}

}  // namespace satkit::sim

#endif
