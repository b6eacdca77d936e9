#include <catch2/catch.hpp>

#include <cmath>

#include "satkit/simulation.hpp"

using namespace satkit;
using sim::BinaryCoupling;
using sim::DgpKind;
using sim::DgpSpec;

namespace {

DgpSpec rc_dgp(double sigma_tau, std::int64_t n, std::uint64_t seed) {
    DgpSpec d;
    d.kind = DgpKind::random_coefficient;
    d.sigma_tau = sigma_tau;
    d.n = n;
    d.seed = seed;
    return d;
}

}  // namespace

TEST_CASE("generate is deterministic and respects the dgp") {
    const auto dgp = rc_dgp(1.0, 500, 99u);
    const auto a = sim::generate(dgp);
    const auto b = sim::generate(dgp);
    CHECK(a.y0 == b.y0);
    CHECK(a.y1 == b.y1);

    auto other = dgp;
    other.seed = 100u;
    CHECK(sim::generate(other).y0 != a.y0);
}

TEST_CASE("zero heterogeneity collapses y1 onto y0") {
    const auto table = sim::generate(rc_dgp(0.0, 200, 7u));
    CHECK(table.y0 == table.y1);
    CHECK(science_moments(table).tau_sq == 0.0);
}

TEST_CASE("random coefficient moments approach their populations") {
    const auto table = sim::generate(rc_dgp(2.0, 200000, 11u));
    const auto mo = science_moments(table);
    CHECK(mo.sigma0_sq == Approx(1.0).margin(0.03));
    CHECK(mo.sigma1_sq == Approx(5.0).margin(0.1));
    CHECK(mo.tau_sq == Approx(4.0).margin(0.1));
}

TEST_CASE("binary monotone coupling reproduces the marginals and variance ratio") {
    DgpSpec d;
    d.kind = DgpKind::binary;
    d.p0 = 0.1;
    d.p1 = 0.2;
    d.n = 400000;
    d.seed = 12u;
    const auto table = sim::generate(d);
    double mean0 = 0.0, mean1 = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < table.y0.size(); ++i) {
        mean0 += table.y0[i];
        mean1 += table.y1[i];
        if (table.y1[i] < table.y0[i]) monotone = false;
    }
    mean0 /= static_cast<double>(d.n);
    mean1 /= static_cast<double>(d.n);
    CHECK(monotone);  // no-harm coupling: y1 >= y0 unit by unit
    CHECK(mean0 == Approx(0.1).margin(0.005));
    CHECK(mean1 == Approx(0.2).margin(0.005));
    const auto mo = science_moments(table);
    CHECK(mo.sigma1_sq / mo.sigma0_sq == Approx(0.16 / 0.09).margin(0.05));
}

TEST_CASE("binary dgp validates the marginal conditions") {
    DgpSpec d;
    d.kind = DgpKind::binary;
    d.p0 = 0.3;
    d.p1 = 0.2;  // p1 <= p0 breaks the positive-effect condition
    d.n = 100;
    CHECK_THROWS_AS(sim::generate(d), error);
    d.p1 = 0.7;  // above one half
    CHECK_THROWS_AS(sim::generate(d), error);
}

TEST_CASE("tobit variance ratio matches its closed form") {
    DgpSpec d;
    d.kind = DgpKind::tobit;
    d.tau = 1.0;
    d.n = 400000;
    d.seed = 13u;
    const auto table = sim::generate(d);
    const auto mo = science_moments(table);
    // var(y1) = var(y0) + tau^2 P(1-P) + 2 tau Cov(y0, 1[y0>=0]) with
    // P = Pr(y0>0) = 1/2 and Cov = P E[y0|y0>0] = phi(0) under N(0,1)
    const double expected =
        1.0 + 0.5 * d.tau * (d.tau * 0.5 + 2.0 * std::sqrt(2.0 / M_PI));
    CHECK(mo.sigma1_sq / mo.sigma0_sq == Approx(expected).margin(0.05));
    for (std::size_t i = 0; i < table.y0.size(); ++i)
        CHECK(table.y1[i] == (table.y0[i] >= 0.0 ? table.y0[i] + d.tau : table.y0[i]));

    // the ratio grows with the shift
    double previous = 1.0;
    for (double tau : {0.5, 1.0, 2.0}) {
        auto grid = d;
        grid.tau = tau;
        grid.n = 50000;
        const auto g = science_moments(sim::generate(grid));
        const double ratio = g.sigma1_sq / g.sigma0_sq;
        CHECK(ratio > previous);
        previous = ratio;
    }
}

TEST_CASE("run is deterministic") {
    sim::ReplicationPlan plan;
    plan.n_samples = 5;
    plan.n_assignments = 8;
    plan.requests = {{EstimandSpec::satt(), VarianceMode::exact},
                     {EstimandSpec::sate(RhoSpec::neyman()), VarianceMode::exact}};
    const auto dgp = rc_dgp(1.0, 60, 21u);
    const auto a = sim::run(dgp, plan);
    const auto b = sim::run(dgp, plan);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].cover_satt == b.rows[i].cover_satt);
        CHECK(a.rows[i].mean_length == b.rows[i].mean_length);
        CHECK(a.rows[i].reject_rate == b.rows[i].reject_rate);
    }
}

TEST_CASE("zero heterogeneity makes the satt interval cover sate at its level") {
    sim::ReplicationPlan plan;
    plan.n_samples = 30;
    plan.n_assignments = 60;
    plan.requests = {{EstimandSpec::satt(), VarianceMode::exact}};
    const auto report = sim::run(rc_dgp(0.0, 400, 31u), plan);
    const auto& row = report.rows.at(0);
    CHECK(row.n_used == 30u * 60u);
    CHECK(row.cover_satt == Approx(0.95).margin(0.02));
    CHECK(row.cover_sate == Approx(row.cover_satt));  // satt == sate when tau is constant
}

TEST_CASE("realized estimands recombine to the sample sate in every replication") {
    const auto dgp = rc_dgp(1.5, 80, 41u);
    const auto table = sim::generate(dgp);
    const auto mo = science_moments(table);
    const std::int64_t m = 40;
    auto stream = rng::Stream(77u);
    for (int rep = 0; rep < 200; ++rep) {
        const auto t = rng::sample_assignment(dgp.n, m, stream);
        double satt = 0.0, satc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double tau = table.y1[i] - table.y0[i];
            (t[i] ? satt : satc) += tau;
        }
        satt /= static_cast<double>(m);
        satc /= static_cast<double>(dgp.n - m);
        const double p = 0.5;
        CHECK(p * satt + (1 - p) * satc == Approx(mo.sate).margin(1e-10));
    }
}

TEST_CASE("heterogeneity preserves satt coverage but erodes sate coverage") {
    sim::ReplicationPlan plan;
    plan.n_samples = 40;
    plan.n_assignments = 40;
    plan.requests = {{EstimandSpec::satt(), VarianceMode::exact},
                     {EstimandSpec::sate(RhoSpec::neyman()), VarianceMode::exact}};
    const auto report = sim::run(rc_dgp(2.0, 500, 51u), plan);
    const auto& row = report.rows.at(0);
    CHECK(row.cover_satt == Approx(0.95).margin(0.02));
    CHECK(row.cover_sate < 0.92);

    // mean length ratio tracks the gain formula at the dgp's variance ratio
    // r^2 = 1 + sigma_tau^2 = 5
    const double ratio = row.mean_length / report.rows.at(1).mean_length;
    CHECK(ratio == Approx(1.0 / std::sqrt(5.0 * 0.5 + 0.5)).margin(0.02));
}

TEST_CASE("tighter sato intervals reject at least as often, replication-wise") {
    sim::ReplicationPlan plan;
    plan.n_samples = 25;
    plan.n_assignments = 25;
    plan.requests = {{EstimandSpec::sato(RhoSpec::rho_one()), VarianceMode::exact},
                     {EstimandSpec::sate(RhoSpec::neyman()), VarianceMode::exact}};
    const auto report = sim::run(rc_dgp(2.0, 300, 61u), plan);
    const auto& sato_row = report.rows.at(0);
    const auto& sate_row = report.rows.at(1);
    CHECK(sato_row.mean_length < sate_row.mean_length);
    CHECK(sato_row.reject_rate >= sate_row.reject_rate);
}

TEST_CASE("skipped replications are counted, not silently dropped") {
    // constant outcomes in every table: every interval is degenerate
    sim::ReplicationPlan plan;
    plan.n_samples = 3;
    plan.n_assignments = 4;
    plan.requests = {{EstimandSpec::satt(), VarianceMode::exact}};
    const auto report = sim::run(rc_dgp(0.0, 12, 71u), plan);
    CHECK(report.rows.at(0).n_used + report.rows.at(0).n_skipped == 12u);
    CHECK(report.rows.at(0).n_skipped == 0u);  // gaussian outcomes never degenerate

    // a binary table with tiny n can realize constant groups; force some skips
    DgpSpec d;
    d.kind = DgpKind::binary;
    d.p0 = 0.05;
    d.p1 = 0.10;
    d.n = 8;
    d.seed = 72u;
    sim::ReplicationPlan small_plan = plan;
    small_plan.n_samples = 50;
    small_plan.n_assignments = 10;
    const auto binary_report = sim::run(d, small_plan);
    CHECK(binary_report.rows.at(0).n_used + binary_report.rows.at(0).n_skipped == 500u);
    CHECK(binary_report.rows.at(0).n_skipped > 0u);
}

TEST_CASE("sato requests skip cleanly when a sample cannot resolve the weight") {
    // tiny binary samples often realize a constant column, so the table rho
    // (and hence the sato weight) is undefined there
    DgpSpec d;
    d.kind = DgpKind::binary;
    d.p0 = 0.05;
    d.p1 = 0.10;
    d.n = 8;
    d.seed = 73u;
    sim::ReplicationPlan plan;
    plan.n_samples = 40;
    plan.n_assignments = 5;
    plan.requests = {{EstimandSpec::sato(RhoSpec::known_from_table()), VarianceMode::exact}};
    const auto report = sim::run(d, plan);
    CHECK(report.rows.at(0).n_used + report.rows.at(0).n_skipped == 200u);
    CHECK(report.rows.at(0).n_skipped > 0u);
}

TEST_CASE("normality diagnostic accepts the gaussian dgp and flags heavy tails") {
    const auto good = sim::normality_diagnostic(rc_dgp(1.0, 400, 81u), 0.5, 20000,
                                                EstimandSpec::satt());
    CHECK(good.p_value > 0.01);

    // a 4-unit spike table: the max-deviation regularity condition fails
    const ScienceTable spiky{{0, 0, 0, 100}, {1, 1, 1, 101}};
    const auto bad = sim::normality_diagnostic(spiky, 2, 5000, EstimandSpec::satt(), 5u);
    CHECK(bad.ks_statistic > 0.2);

    const ScienceTable constant{{3, 3, 3, 3}, {4, 5, 6, 7}};
    CHECK_THROWS_AS(sim::normality_diagnostic(constant, 2, 1000, EstimandSpec::satt(), 6u),
                    error);
}
