#ifndef SATKIT_ORACLE_HPP
#define SATKIT_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "satkit/enumeration.hpp"
#include "satkit/errors.hpp"
#include "satkit/estimators.hpp"
#include "satkit/types.hpp"

// Exhaustive enumeration over all C(N,m) complete-randomization assignments
// of a science table. Every closed-form variance and covariance in the
// library can be certified against these moments.
namespace satkit::oracle {

using enumeration::kDefaultCap;

inline std::uint64_t n_assignments(std::int64_t n, std::int64_t m) {
    return enumeration::binomial(n, m);
}

inline void check_enumeration_size(std::int64_t n, std::int64_t m, std::uint64_t cap) {
    require(m >= 1 && m <= n - 1, errc::bad_input, "oracle: need 1 <= m <= n-1");
    const auto count = n_assignments(n, m);
    if (count > cap)
        fail(errc::enumeration_too_large,
             "oracle: C(" + std::to_string(n) + "," + std::to_string(m) + ") = " +
                 std::to_string(count) + " assignments exceeds the cap of " + std::to_string(cap));
}

// Visits every treatment vector (as the sorted treated index set) in
// lexicographic order.
template <typename Visitor>
void enumerate_assignments(std::int64_t n, std::int64_t m, Visitor&& visit,
                           std::uint64_t cap = kDefaultCap) {
    check_enumeration_size(n, m, cap);
    enumeration::for_each_subset(n, m, std::forward<Visitor>(visit));
}

enum class StatisticId {
    tdiff,
    tdiff_minus_sate,
    tdiff_minus_satt,
    tdiff_minus_satc,
    tdiff_minus_mix,  // takes the omega parameter
    satt,
    satc,
    y0_treated_sum,
    y1_treated_sum,
};

inline const char* statistic_name(StatisticId id) {
    switch (id) {
        case StatisticId::tdiff: return "tdiff";
        case StatisticId::tdiff_minus_sate: return "tdiff_minus_sate";
        case StatisticId::tdiff_minus_satt: return "tdiff_minus_satt";
        case StatisticId::tdiff_minus_satc: return "tdiff_minus_satc";
        case StatisticId::tdiff_minus_mix: return "tdiff_minus_mix";
        case StatisticId::satt: return "satt";
        case StatisticId::satc: return "satc";
        case StatisticId::y0_treated_sum: return "y0_treated_sum";
        case StatisticId::y1_treated_sum: return "y1_treated_sum";
    }
    return "?";
}

namespace detail {

struct TreatedSums {
    double y0 = 0.0;
    double y1 = 0.0;
};

inline TreatedSums treated_sums(const ScienceTable& table,
                                const std::vector<std::int32_t>& treated) {
    TreatedSums s;
    for (auto i : treated) {
        const auto u = static_cast<std::size_t>(i);
        s.y0 += table.y0[u];
        s.y1 += table.y1[u];
    }
    return s;
}

struct TableTotals {
    double y0 = 0.0;
    double y1 = 0.0;
    double sate = 0.0;
};

inline TableTotals table_totals(const ScienceTable& table) {
    TableTotals t;
    for (double v : table.y0) t.y0 += v;
    for (double v : table.y1) t.y1 += v;
    t.sate = (t.y1 - t.y0) / static_cast<double>(table.size());
    return t;
}

inline double evaluate(StatisticId id, double omega, const TreatedSums& s,
                       const TableTotals& tot, double n, double m) {
    const double tdiff = s.y1 / m - (tot.y0 - s.y0) / (n - m);
    const double satt = (s.y1 - s.y0) / m;
    const double satc = ((tot.y1 - s.y1) - (tot.y0 - s.y0)) / (n - m);
    switch (id) {
        case StatisticId::tdiff: return tdiff;
        case StatisticId::tdiff_minus_sate: return tdiff - tot.sate;
        case StatisticId::tdiff_minus_satt: return tdiff - satt;
        case StatisticId::tdiff_minus_satc: return tdiff - satc;
        case StatisticId::tdiff_minus_mix:
            return tdiff - (omega * satt + (1.0 - omega) * satc);
        case StatisticId::satt: return satt;
        case StatisticId::satc: return satc;
        case StatisticId::y0_treated_sum: return s.y0;
        case StatisticId::y1_treated_sum: return s.y1;
    }
    fail(errc::bad_input, "unreachable statistic");
}

struct PairMoments {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    double cov = 0.0;
    std::uint64_t count = 0;
};

// Moments of two statistics over the uniform assignment distribution, with
// shifted compensated accumulation.
inline PairMoments pair_moments(const ScienceTable& table, std::int64_t m, StatisticId id_a,
                                StatisticId id_b, double omega, std::uint64_t cap) {
    validate(table);
    require(table.size() >= 4, errc::bad_input, "oracle: science table needs at least 4 units");
    check_enumeration_size(table.size(), m, cap);
    const auto tot = table_totals(table);
    const double nd = static_cast<double>(table.size());
    const double md = static_cast<double>(m);

    enumeration::CompensatedSum sum_a, sum_b, sum_aa, sum_bb, sum_ab;
    double shift_a = 0.0, shift_b = 0.0;
    bool first = true;
    std::uint64_t count = 0;
    enumeration::for_each_subset(table.size(), m, [&](const std::vector<std::int32_t>& treated) {
        const auto sums = treated_sums(table, treated);
        const double a = evaluate(id_a, omega, sums, tot, nd, md);
        const double b = evaluate(id_b, omega, sums, tot, nd, md);
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
    PairMoments out;
    out.count = count;
    out.mean_a = shift_a + ea;
    out.mean_b = shift_b + eb;
    out.var_a = std::max(0.0, sum_aa.value() / kd - ea * ea);
    out.var_b = std::max(0.0, sum_bb.value() / kd - eb * eb);
    out.cov = sum_ab.value() / kd - ea * eb;
    return out;
}

}  // namespace detail

struct ExactMoments {
    StatisticId statistic_id = StatisticId::tdiff;
    double omega = 0.5;
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t n_assignments = 0;
};

inline ExactMoments exact_moments(const ScienceTable& table, std::int64_t m, StatisticId id,
                                  double omega = 0.5, std::uint64_t cap = kDefaultCap) {
    const auto pm = detail::pair_moments(table, m, id, id, omega, cap);
    return {id, omega, pm.mean_a, pm.var_a, pm.count};
}

inline double exact_cov(const ScienceTable& table, std::int64_t m, StatisticId id_a,
                        StatisticId id_b, double omega = 0.5, std::uint64_t cap = kDefaultCap) {
    return detail::pair_moments(table, m, id_a, id_b, omega, cap).cov;
}

// ---------------------------------------------------------------------------
// Formula certification: each id names one displayed equation; the verdict
// compares its value on the table's moments against the enumerated truth.
// The paper_asymptotic variants keep the (N-1) denominators appearing in the
// derivations, which differ from the exact finite-N values by N/(N-1).
// ---------------------------------------------------------------------------

enum class FormulaId {
    recentered_sate,       // k [p^2 s0 + q^2 s1 + 2 p q cov01]
    recentered_satt,       // k s0
    recentered_satc,       // k s1
    recentered_mix,        // omega-mix variance (mode selects exact vs displayed form)
    var_satt,          // exact: (1/m - 1/N) tau_sq; paper: (N-m)/(m(N-1)) tau_sq
    var_satc,          // exact: (1/(N-m) - 1/N) tau_sq
    cov_satt_satc,     // exact: -tau_sq/N; paper: -tau_sq/(N-1)
    cov_satt_y0sum,    // exact: (1-p)(cov01 - s0)
    cov_satc_y0sum,    // exact: -p (cov01 - s0)
    cov_y1sum_y0sum,   // exact: m(N-m)/N cov01
};

inline const char* formula_name(FormulaId id) {
    switch (id) {
        case FormulaId::recentered_sate: return "recentered_sate";
        case FormulaId::recentered_satt: return "recentered_satt";
        case FormulaId::recentered_satc: return "recentered_satc";
        case FormulaId::recentered_mix: return "recentered_mix";
        case FormulaId::var_satt: return "var_satt";
        case FormulaId::var_satc: return "var_satc";
        case FormulaId::cov_satt_satc: return "cov_satt_satc";
        case FormulaId::cov_satt_y0sum: return "cov_satt_y0sum";
        case FormulaId::cov_satc_y0sum: return "cov_satc_y0sum";
        case FormulaId::cov_y1sum_y0sum: return "cov_y1sum_y0sum";
    }
    return "?";
}

struct FormulaVerdict {
    FormulaId formula_id = FormulaId::recentered_sate;
    VarianceMode mode = VarianceMode::exact;
    double omega = 0.5;
    double exact_value = 0.0;
    double formula_value = 0.0;
    double relative_error = 0.0;
};

inline FormulaVerdict verify_formula(const ScienceTable& table, std::int64_t m, FormulaId id,
                                     VarianceMode mode, double omega = 0.5,
                                     std::uint64_t cap = kDefaultCap) {
    const auto mo = science_moments(table);
    const auto moments = Moments::from_science(table, m);
    const double nd = static_cast<double>(table.size());
    const double md = static_cast<double>(m);
    const double p = md / nd;
    const bool paper = (mode == VarianceMode::paper_asymptotic);
    // paper-mode covariances replace one 1/N with 1/(N-1)
    const double slip = paper ? nd / (nd - 1.0) : 1.0;

    FormulaVerdict v;
    v.formula_id = id;
    v.mode = mode;
    v.omega = omega;

    switch (id) {
        case FormulaId::recentered_sate:
            v.exact_value =
                exact_moments(table, m, StatisticId::tdiff_minus_sate, omega, cap).variance;
            v.formula_value =
                recentered_variance(moments, EstimandSpec::sate(RhoSpec::known_from_table()), mode);
            break;
        case FormulaId::recentered_satt:
            v.exact_value =
                exact_moments(table, m, StatisticId::tdiff_minus_satt, omega, cap).variance;
            v.formula_value = recentered_variance(moments, EstimandSpec::satt(), mode);
            break;
        case FormulaId::recentered_satc:
            v.exact_value =
                exact_moments(table, m, StatisticId::tdiff_minus_satc, omega, cap).variance;
            v.formula_value = recentered_variance(moments, EstimandSpec::satc(), mode);
            break;
        case FormulaId::recentered_mix:
            v.exact_value =
                exact_moments(table, m, StatisticId::tdiff_minus_mix, omega, cap).variance;
            v.formula_value = recentered_variance(
                moments, EstimandSpec::mix(omega, RhoSpec::known_from_table()), mode);
            break;
        case FormulaId::var_satt:
            v.exact_value = exact_moments(table, m, StatisticId::satt, omega, cap).variance;
            v.formula_value = paper ? (nd - md) / (md * (nd - 1.0)) * mo.tau_sq
                                    : (1.0 / md - 1.0 / nd) * mo.tau_sq;
            break;
        case FormulaId::var_satc:
            v.exact_value = exact_moments(table, m, StatisticId::satc, omega, cap).variance;
            v.formula_value = paper ? md / ((nd - md) * (nd - 1.0)) * mo.tau_sq
                                    : (1.0 / (nd - md) - 1.0 / nd) * mo.tau_sq;
            break;
        case FormulaId::cov_satt_satc:
            v.exact_value = exact_cov(table, m, StatisticId::satt, StatisticId::satc, omega, cap);
            v.formula_value = -mo.tau_sq / nd * slip;
            break;
        case FormulaId::cov_satt_y0sum:
            v.exact_value =
                exact_cov(table, m, StatisticId::satt, StatisticId::y0_treated_sum, omega, cap);
            v.formula_value = (1.0 - p) * (mo.cov01 - mo.sigma0_sq) * slip;
            break;
        case FormulaId::cov_satc_y0sum:
            v.exact_value =
                exact_cov(table, m, StatisticId::satc, StatisticId::y0_treated_sum, omega, cap);
            v.formula_value = -p * (mo.cov01 - mo.sigma0_sq) * slip;
            break;
        case FormulaId::cov_y1sum_y0sum:
            v.exact_value = exact_cov(table, m, StatisticId::y1_treated_sum,
                                      StatisticId::y0_treated_sum, omega, cap);
            v.formula_value = md * (nd - md) / nd * mo.cov01 * slip;
            break;
        default:
            fail(errc::unknown_formula, "verify_formula: unknown formula id");
    }

    v.relative_error = std::abs(v.exact_value - v.formula_value) /
                       std::max(std::abs(v.exact_value), 1e-300);
    return v;
}

// Full certification table: every formula in both modes; the mix variance on
// a fixed omega grid.
inline std::vector<FormulaVerdict> verify_all(const ScienceTable& table, std::int64_t m,
                                              std::uint64_t cap = kDefaultCap) {
    std::vector<FormulaVerdict> out;
    const FormulaId simple[] = {FormulaId::recentered_sate,    FormulaId::recentered_satt,
                                FormulaId::recentered_satc,    FormulaId::var_satt,
                                FormulaId::var_satc,       FormulaId::cov_satt_satc,
                                FormulaId::cov_satt_y0sum, FormulaId::cov_satc_y0sum,
                                FormulaId::cov_y1sum_y0sum};
    for (auto mode : {VarianceMode::exact, VarianceMode::paper_asymptotic}) {
        for (auto id : simple) out.push_back(verify_formula(table, m, id, mode, 0.5, cap));
        for (double omega : {0.0, 0.25, 0.5, 0.75, 1.0})
            out.push_back(verify_formula(table, m, FormulaId::recentered_mix, mode, omega, cap));
    }
    return out;
}

}  // namespace satkit::oracle

#endif
