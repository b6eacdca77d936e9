#ifndef SATKIT_BERNOULLI_HPP
#define SATKIT_BERNOULLI_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "satkit/errors.hpp"
#include "satkit/estimators.hpp"
#include "satkit/normal.hpp"
#include "satkit/types.hpp"

// Inference on SATT when treatment is assigned by independent Bernoulli(p)
// trials instead of complete randomization. Both the treated count m and the
// treated control-outcome sum are then random, so the variance of the scaled
// recentered statistic comes from a delta-method quadratic form.
namespace satkit::bernoulli {

struct VariancePieces {
    std::array<std::array<double, 2>, 2> sigma{};  // covariance of (sum Y(0)T, m)
    std::array<double, 2> gradient{};              // (1/m, -sum Y(0)T / m^2)
    double p_hat = 0.0;
    double mean_y0_hat = 0.0;        // control mean, estimating E[Y(0)]
    double s0sq_hat = 0.0;           // control sample variance
    double y0_treated_sum_hat = 0.0; // substitute for the unobservable sum Y(0)T
    double variance = 0.0;           // Var( (1/m) sum Y(0) T )
};

// The treated-side sum of Y(0) is unobservable. The control-side sum
// sum Y(0)(1-T) is observable and consistent for (1-p) N E[Y(0)], so the
// default rescales it by m/(n-m) to target the treated-side magnitude.
// literal_substitute = true keeps the unscaled control sum for comparison;
// for p != 1/2 it aims at the wrong magnitude.
inline VariancePieces satt_variance(const ObservedExperiment& obs,
                                    bool literal_substitute = false) {
    validate(obs);
    const double n = static_cast<double>(obs.size());
    const auto m_count = obs.treated_count();
    require(obs.size() - m_count >= 2, errc::no_controls,
            "bernoulli: need at least 2 control units");
    const double m = static_cast<double>(m_count);

    double control_sum = 0.0;
    for (std::int64_t i = 0; i < obs.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (!obs.t[u]) control_sum += obs.y[u];
    }
    const double n0 = n - m;
    const double mean0 = control_sum / n0;
    double ss0 = 0.0;
    for (std::int64_t i = 0; i < obs.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (!obs.t[u]) {
            const double d = obs.y[u] - mean0;
            ss0 += d * d;
        }
    }

    VariancePieces out;
    out.p_hat = m / n;
    out.mean_y0_hat = mean0;
    out.s0sq_hat = ss0 / (n0 - 1.0);
    out.y0_treated_sum_hat = literal_substitute ? control_sum : m / n0 * control_sum;

    const double pq = out.p_hat * (1.0 - out.p_hat);
    out.sigma[0][0] = n * pq * (out.s0sq_hat + mean0 * mean0);
    out.sigma[0][1] = n * pq * mean0;
    out.sigma[1][0] = out.sigma[0][1];
    out.sigma[1][1] = n * pq;

    out.gradient[0] = 1.0 / m;
    out.gradient[1] = -out.y0_treated_sum_hat / (m * m);

    // g' Sigma g rearranged as n pq (s0 g0^2 + (mean0 g0 + g1)^2); the same
    // quadratic form, but constant control outcomes cancel to an exact zero.
    const double cross = mean0 * out.gradient[0] + out.gradient[1];
    out.variance =
        n * pq * (out.s0sq_hat * out.gradient[0] * out.gradient[0] + cross * cross);
    return out;
}

// PI for SATT under Bernoulli assignment: the normal limit applies to
// ((n-m)/n)(t_diff - SATT), so the half-width carries the n/(n-m) back-scaling.
inline IntervalResult satt_interval(const ObservedExperiment& obs, double alpha,
                                    bool literal_substitute = false) {
    require(alpha > 0.0 && alpha < 1.0, errc::bad_input, "alpha must be in (0,1)");
    const auto pieces = satt_variance(obs, literal_substitute);
    if (!(pieces.variance > 0.0))
        fail(errc::degenerate_variance,
             "bernoulli interval: variance is zero (constant control outcomes)");

    const double n = static_cast<double>(obs.size());
    const double m = static_cast<double>(obs.treated_count());

    double treated_sum = 0.0, control_sum = 0.0;
    for (std::int64_t i = 0; i < obs.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        (obs.t[u] ? treated_sum : control_sum) += obs.y[u];
    }

    IntervalResult r;
    r.estimand = EstimandSpec::satt();
    r.center = treated_sum / m - control_sum / (n - m);
    r.level = 1.0 - alpha;
    r.variance = pieces.variance;
    r.variance_mode = VarianceMode::exact;
    r.half_width =
        normal_quantile(1.0 - alpha / 2.0) * n / (n - m) * std::sqrt(pieces.variance);
    return r;
}

}  // namespace satkit::bernoulli

#endif
