#ifndef SATKIT_ESTIMATORS_HPP
#define SATKIT_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "satkit/enumeration.hpp"
#include "satkit/errors.hpp"
#include "satkit/normal.hpp"
#include "satkit/types.hpp"

namespace satkit {

// ---------------------------------------------------------------------------
// Moment set every variance formula consumes. Built either from aggregate
// summary statistics (plug-in: cov01 unknown) or from a science table (cov01
// known). All dispersions use the (N-1) denominator.
// ---------------------------------------------------------------------------
struct Moments {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double sigma0_sq = 0.0;
    double sigma1_sq = 0.0;
    std::optional<double> cov01;

    double p() const { return static_cast<double>(m) / static_cast<double>(n); }
    double sigma0() const { return std::sqrt(sigma0_sq); }
    double sigma1() const { return std::sqrt(sigma1_sq); }

    static Moments from_summary(const ExperimentSummary& s) {
        validate(s);
        return {s.n, s.m, s.s0sq, s.s1sq, std::nullopt};
    }

    static Moments from_science(const ScienceTable& table, std::int64_t m) {
        const auto mo = science_moments(table);
        require(m >= 1 && m <= table.size() - 1, errc::bad_input, "need 1 <= m <= n-1");
        return {table.size(), m, mo.sigma0_sq, mo.sigma1_sq, mo.cov01};
    }
};

inline double diff_in_means(const ExperimentSummary& s) { return s.t_diff(); }

// s1sq/m + s0sq/(n-m); the classical conservative SATE variance.
inline double neyman_variance(const Moments& mo) {
    return mo.sigma1_sq / static_cast<double>(mo.m) +
           mo.sigma0_sq / static_cast<double>(mo.n - mo.m);
}

inline double neyman_variance(const ExperimentSummary& s) {
    return neyman_variance(Moments::from_summary(s));
}

// (p*sigma0 + (1-p)*sigma1)^2 / (N p (1-p)); the rho = 1 bound.
inline double rho_one_variance(const Moments& mo) {
    const double p = mo.p();
    const double s = p * mo.sigma0() + (1.0 - p) * mo.sigma1();
    return s * s / (static_cast<double>(mo.n) * p * (1.0 - p));
}

inline double rho_one_variance(const ExperimentSummary& s) {
    return rho_one_variance(Moments::from_summary(s));
}

namespace detail {

// Variance of t_diff recentered at the omega-mix, with cov01 = rho*s0*s1.
// This closed form is exact at finite N: the recentered statistic is a linear
// statistic of the treatment indicators with per-unit weights proportional to
// (1-omega)*Y(1) + omega*Y(0).
inline double mix_variance_exact(double omega, double s0sq, double s1sq, double cov01,
                                 double n, double p) {
    const double w = omega;
    const double k = 1.0 / (n * p * (1.0 - p));
    return k * (w * w * s0sq + (1.0 - w) * (1.0 - w) * s1sq + 2.0 * w * (1.0 - w) * cov01);
}

// The displayed three-line mix variance, with its (N-1) denominators kept
// verbatim; differs from the exact value by O(1/N) relative.
inline double mix_variance_paper(double omega, double s0sq, double s1sq, double cov01,
                                 double n, double p) {
    const double w = omega;
    const double q = 1.0 - p;
    const double tau_sq = s0sq + s1sq - 2.0 * cov01;
    const double line1 =
        (p * p * s0sq + q * q * s1sq + 2.0 * p * q * cov01) / (n * p * q);
    const double line2 = tau_sq / (n - 1.0) *
                         (w * w * q / p + (1.0 - w) * (1.0 - w) * p / q - 2.0 * w * (1.0 - w));
    const double line3 = -2.0 * (w / ((n - 1.0) * p) * (s1sq - cov01) - tau_sq / (n - 1.0) +
                                 (1.0 - w) / ((n - 1.0) * q) * (s0sq - cov01));
    return line1 + line2 + line3;
}

}  // namespace detail

struct OmegaStar {
    double value = 0.5;    // clipped to [0,1]
    double raw = 0.5;      // unclipped formula value
    bool in_range = true;  // raw already inside [0,1]
};

// Accuracy-maximizing mix weight: (r^2 - rho*r) / (r^2 + 1 - 2*rho*r) with
// r = sigma1/sigma0. A function of (sigma0, sigma1, rho) only; p plays no role.
inline OmegaStar optimal_omega(double sigma0, double sigma1, double rho) {
    require(sigma0 > 0.0, errc::zero_sigma, "optimal_omega: sigma0 must be positive");
    require(sigma1 >= 0.0, errc::bad_input, "optimal_omega: sigma1 must be nonnegative");
    require(rho >= -1.0 && rho <= 1.0, errc::rho_out_of_range, "optimal_omega: rho in [-1,1]");
    const double r = sigma1 / sigma0;
    const double den = r * r + 1.0 - 2.0 * rho * r;
    if (den == 0.0)
        fail(errc::degenerate_denominator,
             "optimal_omega: constant treatment effect (rho=1, equal sigmas); "
             "the mix weight does not affect the variance");
    OmegaStar result;
    result.raw = (r * r - rho * r) / den;
    result.value = std::clamp(result.raw, 0.0, 1.0);
    result.in_range = (result.raw >= 0.0 && result.raw <= 1.0);
    return result;
}

namespace detail {

// rho resolved per the assumption in force; throws when the assumption does
// not provide one.
inline double resolve_rho(const RhoSpec& spec, const Moments& mo) {
    switch (spec.kind) {
        case RhoKind::known:
            if (spec.value) return *spec.value;
            if (mo.cov01) {
                const double sd = mo.sigma0() * mo.sigma1();
                require(sd > 0.0, errc::rho_undefined,
                        "rho is undefined: a potential-outcome column is constant");
                return *mo.cov01 / sd;
            }
            fail(errc::rho_required, "estimand needs rho: supply known:<r> or bound:<r>");
        case RhoKind::bound:
            return spec.value.value();
        case RhoKind::rho_one:
            return 1.0;
        case RhoKind::neyman:
            fail(errc::rho_required,
                 "the Neyman assumption carries no rho value; only the sate estimand supports it");
    }
    fail(errc::rho_required, "unreachable");
}

// cov(Y1,Y0) under the assumption. Prefers the table covariance for
// known-from-table so degenerate columns (sigma = 0) stay well defined.
inline double resolve_cov01(const RhoSpec& spec, const Moments& mo) {
    if (spec.kind == RhoKind::known && !spec.value && mo.cov01) return *mo.cov01;
    return resolve_rho(spec, mo) * mo.sigma0() * mo.sigma1();
}

}  // namespace detail

// Recentered SATE variance with rho replaced by the bound rho*.
inline double bounded_rho_variance(const Moments& mo, double rho_star) {
    require(rho_star >= -1.0 && rho_star <= 1.0, errc::rho_out_of_range,
            "bounded_rho_variance: rho* must be in [-1,1]");
    const double cov01 = rho_star * mo.sigma0() * mo.sigma1();
    return detail::mix_variance_exact(mo.p(), mo.sigma0_sq, mo.sigma1_sq, cov01,
                                      static_cast<double>(mo.n), mo.p());
}

inline double bounded_rho_variance(const ExperimentSummary& s, double rho_star) {
    return bounded_rho_variance(Moments::from_summary(s), rho_star);
}

// Var(t_diff - estimand) for any member of the omega-mix family.
//
// exact mode uses the finite-N-exact forms throughout; paper_asymptotic keeps
// the displayed mix expression with its (N-1) denominators. The two modes
// coincide for sate/satt/satc. Super-population specs evaluate the identical
// expressions with the moments read as super-population quantities.
inline double recentered_variance(const Moments& mo, const EstimandSpec& spec,
                                  VarianceMode mode = VarianceMode::exact) {
    require(mo.n >= 2 && mo.m >= 1 && mo.m <= mo.n - 1, errc::bad_input,
            "recentered_variance: need 1 <= m <= n-1");
    require(mo.sigma0_sq >= 0.0 && mo.sigma1_sq >= 0.0, errc::bad_input,
            "recentered_variance: negative variance input");
    const double n = static_cast<double>(mo.n);
    const double p = mo.p();
    const double k = 1.0 / (n * p * (1.0 - p));

    switch (spec.kind) {
        case EstimandKind::satt:
            return k * mo.sigma0_sq;
        case EstimandKind::satc:
            return k * mo.sigma1_sq;
        case EstimandKind::sate: {
            if (spec.rho.kind == RhoKind::neyman) return neyman_variance(mo);
            if (spec.rho.kind == RhoKind::rho_one) return rho_one_variance(mo);
            const double cov01 = detail::resolve_cov01(spec.rho, mo);
            return detail::mix_variance_exact(p, mo.sigma0_sq, mo.sigma1_sq, cov01, n, p);
        }
        case EstimandKind::mix:
        case EstimandKind::sato: {
            const double cov01 = detail::resolve_cov01(spec.rho, mo);
            double omega = spec.omega;
            if (spec.kind == EstimandKind::sato)
                omega = optimal_omega(mo.sigma0(), mo.sigma1(),
                                      detail::resolve_rho(spec.rho, mo)).value;
            return mode == VarianceMode::exact
                       ? detail::mix_variance_exact(omega, mo.sigma0_sq, mo.sigma1_sq, cov01, n, p)
                       : detail::mix_variance_paper(omega, mo.sigma0_sq, mo.sigma1_sq, cov01, n, p);
        }
    }
    fail(errc::bad_input, "unreachable");
}

inline double recentered_variance(const ExperimentSummary& s, const EstimandSpec& spec,
                                  VarianceMode mode = VarianceMode::exact) {
    return recentered_variance(Moments::from_summary(s), spec, mode);
}

// Comonotone (maximal-correlation) coupling of the two empirical marginals:
// sort each group, pair matching quantiles on a grid of min(m, n-m) points,
// and correlate. A degenerate (constant) marginal falls back to the trivial
// bound 1.
inline double empirical_rho_bound(const ObservedExperiment& obs) {
    validate(obs);
    std::vector<double> treated, control;
    for (std::int64_t i = 0; i < obs.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        (obs.t[u] ? treated : control).push_back(obs.y[u]);
    }
    require(treated.size() >= 2 && control.size() >= 2, errc::group_too_small,
            "empirical_rho_bound: each group needs at least 2 units");
    std::sort(treated.begin(), treated.end());
    std::sort(control.begin(), control.end());

    const std::size_t grid = std::min(treated.size(), control.size());
    auto quantile = [](const std::vector<double>& sorted, double u) {
        auto idx = static_cast<std::size_t>(u * static_cast<double>(sorted.size()));
        idx = std::min(idx, sorted.size() - 1);
        return sorted[idx];
    };

    double sa = 0.0, sb = 0.0;
    std::vector<double> a(grid), b(grid);
    for (std::size_t g = 0; g < grid; ++g) {
        const double u = (static_cast<double>(g) + 0.5) / static_cast<double>(grid);
        a[g] = quantile(treated, u);
        b[g] = quantile(control, u);
        sa += a[g];
        sb += b[g];
    }
    const double ma = sa / static_cast<double>(grid);
    const double mb = sb / static_cast<double>(grid);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
        saa += (a[g] - ma) * (a[g] - ma);
        sbb += (b[g] - mb) * (b[g] - mb);
        sab += (a[g] - ma) * (b[g] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 1.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Symmetric normal interval around the difference-in-means.
inline IntervalResult interval(const ExperimentSummary& s, const EstimandSpec& spec, double alpha,
                               VarianceMode mode = VarianceMode::exact) {
    require(alpha > 0.0 && alpha < 1.0, errc::bad_input, "interval: alpha must be in (0,1)");
    const double variance = recentered_variance(s, spec, mode);
    if (!(variance > 0.0))
        fail(errc::degenerate_variance,
             "interval: variance is zero; the interval would contain only the point estimate "
             "(a group with constant outcomes carries no dispersion information)");
    IntervalResult r;
    r.estimand = spec;
    r.center = diff_in_means(s);
    r.level = 1.0 - alpha;
    r.variance = variance;
    r.variance_mode = mode;
    r.half_width = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(variance);
    return r;
}

// [p*L_T + (1-p)*L_C, p*U_T + (1-p)*U_C]: a SATE confidence interval; equal to
// the rho = 1 SATE interval when the inputs come from the same summary.
inline IntervalResult combine_satt_satc(const IntervalResult& pi_satt,
                                        const IntervalResult& pi_satc, double p) {
    require(p > 0.0 && p < 1.0, errc::bad_input, "combine_satt_satc: p must be in (0,1)");
    const double center_scale = std::max({1.0, std::abs(pi_satt.center), std::abs(pi_satc.center)});
    require(std::abs(pi_satt.center - pi_satc.center) <= 1e-9 * center_scale,
            errc::mismatched_inputs, "combine_satt_satc: intervals have different centers");
    require(std::abs(pi_satt.level - pi_satc.level) <= 1e-12, errc::mismatched_inputs,
            "combine_satt_satc: intervals have different levels");

    IntervalResult r;
    r.estimand = EstimandSpec::sate(RhoSpec::rho_one());
    r.estimand.model = pi_satt.estimand.model;
    r.center = pi_satt.center;
    r.level = pi_satt.level;
    r.half_width = p * pi_satt.half_width + (1.0 - p) * pi_satc.half_width;
    r.variance_mode = pi_satt.variance_mode;
    const double z = normal_quantile(0.5 + r.level / 2.0);
    r.variance = (r.half_width / z) * (r.half_width / z);
    return r;
}

struct RhoThreshold {
    double value = 0.0;
    bool in_range = false;  // true when the threshold lies in [-1,1]
};

// The rho at which the SATE and SATT recentered variances coincide. Reported
// raw; it can fall outside [-1,1].
inline RhoThreshold rho_threshold(double sigma0, double sigma1, double p) {
    require(sigma0 > 0.0 && sigma1 > 0.0, errc::zero_sigma,
            "rho_threshold: both sigmas must be positive");
    require(p > 0.0 && p < 1.0, errc::bad_input, "rho_threshold: p must be in (0,1)");
    const double value = (sigma0 * sigma0 * (1.0 - p * p) -
                          (1.0 - p) * (1.0 - p) * sigma1 * sigma1) /
                         (2.0 * p * (1.0 - p) * sigma0 * sigma1);
    return {value, std::abs(value) <= 1.0};
}

struct RatioTestResult {
    double statistic = 0.0;
    double threshold = 0.0;  // sqrt((1-p^2)/(1-p)^2)
    double p_value = 1.0;
    bool reject = false;
};

// One-sided z test of H0: sigma1/sigma0 <= sqrt((1-p^2)/(1-p)^2) on the log
// variance ratio, with the normal-theory standard error
// sqrt(2/(m-1) + 2/(n-m-1)). Rejection indicates the threshold rho is
// negative.
inline RatioTestResult variance_ratio_test(const ExperimentSummary& s, double alpha) {
    validate(s);
    require(alpha > 0.0 && alpha < 1.0, errc::bad_input, "alpha must be in (0,1)");
    require(s.m >= 2 && s.n - s.m >= 2, errc::group_too_small,
            "variance_ratio_test: each group needs at least 2 units");
    require(s.s0sq > 0.0 && s.s1sq > 0.0, errc::degenerate_variance,
            "variance_ratio_test: both group variances must be positive");
    const double p = s.p();
    RatioTestResult r;
    r.threshold = std::sqrt((1.0 - p * p) / ((1.0 - p) * (1.0 - p)));
    const double se = std::sqrt(2.0 / static_cast<double>(s.m - 1) +
                                2.0 / static_cast<double>(s.n - s.m - 1));
    r.statistic = (std::log(s.s1sq / s.s0sq) - 2.0 * std::log(r.threshold)) / se;
    r.p_value = 1.0 - normal_cdf(r.statistic);
    r.reject = r.p_value <= alpha;
    return r;
}

// Mean squared distance between SATE and SATT: ((1-p)/m) * tau_sq.
inline double mse_sate_satt(double tau_sq, std::int64_t m, double p) {
    require(tau_sq >= 0.0, errc::bad_input, "mse_sate_satt: tau_sq must be nonnegative");
    require(m >= 1, errc::bad_input, "mse_sate_satt: m must be positive");
    require(p > 0.0 && p < 1.0, errc::bad_input, "mse_sate_satt: p must be in (0,1)");
    return (1.0 - p) / static_cast<double>(m) * tau_sq;
}

struct GainBaseline {
    enum class Kind { neyman, bounded };
    Kind kind = Kind::neyman;
    double rho_star = 0.0;

    static GainBaseline neyman() { return {Kind::neyman, 0.0}; }
    static GainBaseline bounded(double rho_star) {
        require(rho_star >= -1.0 && rho_star <= 1.0, errc::rho_out_of_range,
                "gain baseline: rho* must be in [-1,1]");
        return {Kind::bounded, rho_star};
    }
};

// Fractional length reduction of the SATT interval relative to a SATE
// interval under the given variance baseline; negative when SATT is longer.
inline double length_gain(double r_sq, double p, GainBaseline baseline = GainBaseline::neyman()) {
    require(r_sq > 0.0, errc::bad_input, "length_gain: variance ratio must be positive");
    require(p > 0.0 && p < 1.0, errc::bad_input, "length_gain: p must be in (0,1)");
    if (baseline.kind == GainBaseline::Kind::neyman)
        return 1.0 - 1.0 / std::sqrt(r_sq * (1.0 - p) + p);
    const double r = std::sqrt(r_sq);
    const double q = 1.0 - p;
    return 1.0 - 1.0 / std::sqrt(p * p + q * q * r_sq + 2.0 * p * q * baseline.rho_star * r);
}

// ---------------------------------------------------------------------------
// Var(t_diff - SATE) split into Var(SATT), Var of the scaled treated-control
// sum, and twice their covariance. Enumerated exhaustively when C(n,m) is
// small, closed-form otherwise; the two agree to certificate precision.
// ---------------------------------------------------------------------------
struct VarianceBreakdown {
    double total = 0.0;
    double var_satt_term = 0.0;
    double var_y0_sum_term = 0.0;
    double covariance_term = 0.0;
};

inline VarianceBreakdown variance_decomposition(const ScienceTable& table, std::int64_t m,
                                                std::uint64_t enumeration_cap = 1'000'000) {
    validate(table);
    const auto n = table.size();
    require(m >= 1 && m <= n - 1, errc::bad_input, "variance_decomposition: need 1 <= m <= n-1");
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    const double scale = nd / (md * (nd - md));  // N / (m (N-m))

    VarianceBreakdown out;
    if (enumeration::binomial(n, m) <= enumeration_cap) {
        enumeration::CompensatedSum sum_a, sum_b, sum_aa, sum_bb, sum_ab;
        double shift_a = 0.0, shift_b = 0.0;
        bool first = true;
        std::uint64_t count = 0;
        enumeration::for_each_subset(n, m, [&](const std::vector<std::int32_t>& treated) {
            double satt_sum = 0.0, y0_sum = 0.0;
            for (auto i : treated) {
                const auto u = static_cast<std::size_t>(i);
                satt_sum += table.y1[u] - table.y0[u];
                y0_sum += table.y0[u];
            }
            const double a = satt_sum / md;        // SATT
            const double b = scale * y0_sum;       // scaled treated Y(0) sum
            if (first) {
                shift_a = a;
                shift_b = b;
                first = false;
            }
            const double da = a - shift_a;
            const double db = b - shift_b;
            sum_a.add(da);
            sum_b.add(db);
            sum_aa.add(da * da);
            sum_bb.add(db * db);
            sum_ab.add(da * db);
            ++count;
        });
        const double kd = static_cast<double>(count);
        const double ea = sum_a.value() / kd;
        const double eb = sum_b.value() / kd;
        out.var_satt_term = std::max(0.0, sum_aa.value() / kd - ea * ea);
        out.var_y0_sum_term = std::max(0.0, sum_bb.value() / kd - eb * eb);
        out.covariance_term = 2.0 * (sum_ab.value() / kd - ea * eb);
    } else {
        const auto mo = science_moments(table);
        out.var_satt_term = (1.0 / md - 1.0 / nd) * mo.tau_sq;
        out.var_y0_sum_term = scale * mo.sigma0_sq;
        out.covariance_term = 2.0 / md * (mo.cov01 - mo.sigma0_sq);
    }
    out.total = out.var_satt_term + out.var_y0_sum_term + out.covariance_term;
    return out;
}

// ---------------------------------------------------------------------------
// Super-population bookkeeping: Var(t_diff), Var(SATE) = tau_sq/N, and their
// difference, which equals the recentered SATE variance.
// ---------------------------------------------------------------------------
struct SpDecomposition {
    double var_tdiff = 0.0;
    double var_sate = 0.0;
    double var_tdiff_minus_sate = 0.0;
};

inline SpDecomposition sp_decomposition(const Moments& mo) {
    require(mo.n >= 2 && mo.m >= 1 && mo.m <= mo.n - 1, errc::bad_input,
            "sp_decomposition: need 1 <= m <= n-1");
    require(mo.cov01.has_value(), errc::rho_required,
            "sp_decomposition: tau_sq needs the potential-outcome covariance (rho)");
    SpDecomposition out;
    out.var_tdiff = mo.sigma1_sq / static_cast<double>(mo.m) +
                    mo.sigma0_sq / static_cast<double>(mo.n - mo.m);
    const double tau_sq = mo.sigma0_sq + mo.sigma1_sq - 2.0 * *mo.cov01;
    out.var_sate = tau_sq / static_cast<double>(mo.n);
    out.var_tdiff_minus_sate = out.var_tdiff - out.var_sate;
    return out;
}

// ---------------------------------------------------------------------------
// Covariate adjustment: replace y with least-squares residuals against the
// covariate matrix (Householder QR); the treatment vector is untouched.
// ---------------------------------------------------------------------------
inline ObservedExperiment covariate_adjust(const ObservedExperiment& obs) {
    validate(obs);
    const auto n = static_cast<std::size_t>(obs.size());
    const std::size_t p = obs.n_covariates;
    require(p >= 1, errc::bad_input, "covariate_adjust: experiment has no covariates");
    require(n > p, errc::bad_input, "covariate_adjust: need more units than covariates");

    // column-major working copy of X
    std::vector<double> a(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) a[j * n + i] = obs.x[i * p + j];
    std::vector<double> qty = obs.y;

    double max_col_norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm_sq += a[j * n + i] * a[j * n + i];
        max_col_norm = std::max(max_col_norm, std::sqrt(norm_sq));
    }
    const double rank_tol = 1e-12 * static_cast<double>(n) * std::max(max_col_norm, 1.0);

    std::vector<double> v(n);
    for (std::size_t j = 0; j < p; ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = j; i < n; ++i) norm_sq += a[j * n + i] * a[j * n + i];
        const double norm = std::sqrt(norm_sq);
        require(norm > rank_tol, errc::rank_deficient,
                "covariate_adjust: covariate matrix is rank deficient");
        const double pivot = a[j * n + j];
        const double alpha = (pivot >= 0.0) ? -norm : norm;
        double vnorm_sq = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            v[i] = a[j * n + i];
            if (i == j) v[i] -= alpha;
            vnorm_sq += v[i] * v[i];
        }
        if (vnorm_sq == 0.0) continue;
        for (std::size_t col = j; col < p; ++col) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i] * a[col * n + i];
            const double f = 2.0 * dot / vnorm_sq;
            for (std::size_t i = j; i < n; ++i) a[col * n + i] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i] * qty[i];
        const double f = 2.0 * dot / vnorm_sq;
        for (std::size_t i = j; i < n; ++i) qty[i] -= f * v[i];
    }

    // back-substitute R beta = (Q^T y)_{1..p}
    std::vector<double> beta(p);
    for (std::size_t jj = p; jj-- > 0;) {
        double acc = qty[jj];
        for (std::size_t kk = jj + 1; kk < p; ++kk) acc -= a[kk * n + jj] * beta[kk];
        require(std::abs(a[jj * n + jj]) > rank_tol, errc::rank_deficient,
                "covariate_adjust: covariate matrix is rank deficient");
        beta[jj] = acc / a[jj * n + jj];
    }

    ObservedExperiment out = obs;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += obs.x[i * p + j] * beta[j];
        out.y[i] = obs.y[i] - fit;
    }
    return out;
}

}  // namespace satkit

#endif
