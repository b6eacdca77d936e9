#ifndef SATKIT_TYPES_HPP
#define SATKIT_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satkit/errors.hpp"

namespace satkit {

// ---------------------------------------------------------------------------
// Data objects. All of these are plain immutable-by-convention value types;
// operations validate what they consume.
// ---------------------------------------------------------------------------

// Full potential-outcomes table. Observable only in simulations and
// enumeration checks; real data never has both columns.
struct ScienceTable {
    std::vector<double> y0;
    std::vector<double> y1;

    std::int64_t size() const { return static_cast<std::int64_t>(y0.size()); }
};

inline void validate(const ScienceTable& table) {
    require(table.y0.size() == table.y1.size(), errc::bad_input,
            "science table: y0 and y1 must have equal length");
    require(table.y0.size() >= 2, errc::bad_input, "science table: need at least 2 units");
    for (double v : table.y0)
        require(std::isfinite(v), errc::bad_input, "science table: non-finite y0 entry");
    for (double v : table.y1)
        require(std::isfinite(v), errc::bad_input, "science table: non-finite y1 entry");
}

// One realized experiment: observed outcome, treatment indicator, optional
// covariates (row-major n x n_covariates).
struct ObservedExperiment {
    std::vector<double> y;
    std::vector<std::uint8_t> t;
    std::size_t n_covariates = 0;
    std::vector<double> x;

    std::int64_t size() const { return static_cast<std::int64_t>(y.size()); }
    std::int64_t treated_count() const {
        std::int64_t m = 0;
        for (auto v : t) m += v;
        return m;
    }
};

inline void validate(const ObservedExperiment& obs) {
    require(obs.y.size() == obs.t.size(), errc::bad_input, "observed experiment: y/t length mismatch");
    require(obs.y.size() >= 2, errc::bad_input, "observed experiment: need at least 2 units");
    for (double v : obs.y)
        require(std::isfinite(v), errc::bad_input, "observed experiment: non-finite outcome");
    for (auto v : obs.t)
        require(v == 0 || v == 1, errc::bad_input, "observed experiment: t entries must be 0/1");
    const auto m = obs.treated_count();
    require(m >= 1 && m <= obs.size() - 1, errc::bad_input,
            "observed experiment: need at least one treated and one control unit");
    if (obs.n_covariates > 0)
        require(obs.x.size() == obs.y.size() * obs.n_covariates, errc::bad_input,
                "observed experiment: covariate matrix shape mismatch");
}

// Aggregate sufficient statistics; everything downstream of unit data needs
// only these.
struct ExperimentSummary {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double mean1 = 0.0;
    double mean0 = 0.0;
    double s1sq = 0.0;  // treated-group sample variance, (m-1) denominator
    double s0sq = 0.0;  // control-group sample variance, (n-m-1) denominator

    double p() const { return static_cast<double>(m) / static_cast<double>(n); }
    double t_diff() const { return mean1 - mean0; }
};

inline void validate(const ExperimentSummary& s) {
    require(s.n >= 2, errc::bad_input, "summary: n must be >= 2");
    require(s.m >= 1 && s.m <= s.n - 1, errc::bad_input, "summary: need 1 <= m <= n-1");
    require(std::isfinite(s.mean1) && std::isfinite(s.mean0), errc::bad_input,
            "summary: non-finite group mean");
    require(s.s1sq >= 0.0 && s.s0sq >= 0.0, errc::bad_input, "summary: negative sample variance");
}

// Finite-population moments of a science table, all with the (N-1)
// denominator. rho is absent (not NaN, not zero) when either column is
// constant.
struct ScienceMoments {
    double sate = 0.0;
    double sigma0_sq = 0.0;
    double sigma1_sq = 0.0;
    double tau_sq = 0.0;
    double cov01 = 0.0;
    std::optional<double> rho;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace detail

inline ScienceMoments science_moments(const ScienceTable& table) {
    validate(table);
    const auto n = table.size();
    const double nd = static_cast<double>(n);
    const double m0 = detail::mean_of(table.y0);
    const double m1 = detail::mean_of(table.y1);

    double ss0 = 0.0, ss1 = 0.0, ss01 = 0.0, sstau = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d0 = table.y0[static_cast<std::size_t>(i)] - m0;
        const double d1 = table.y1[static_cast<std::size_t>(i)] - m1;
        ss0 += d0 * d0;
        ss1 += d1 * d1;
        ss01 += d0 * d1;
        const double dt = d1 - d0;
        sstau += dt * dt;
    }

    ScienceMoments mo;
    mo.sate = m1 - m0;
    mo.sigma0_sq = ss0 / (nd - 1.0);
    mo.sigma1_sq = ss1 / (nd - 1.0);
    mo.cov01 = ss01 / (nd - 1.0);
    mo.tau_sq = sstau / (nd - 1.0);
    const double sd_prod = std::sqrt(mo.sigma0_sq) * std::sqrt(mo.sigma1_sq);
    if (sd_prod > 0.0) mo.rho = mo.cov01 / sd_prod;
    return mo;
}

inline ExperimentSummary summarize(const ObservedExperiment& obs) {
    validate(obs);
    const auto n = obs.size();
    const auto m = obs.treated_count();
    require(m >= 2 && n - m >= 2, errc::group_too_small,
            "summarize: each group needs at least 2 units");

    double sum1 = 0.0, sum0 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        (obs.t[u] ? sum1 : sum0) += obs.y[u];
    }
    const double mean1 = sum1 / static_cast<double>(m);
    const double mean0 = sum0 / static_cast<double>(n - m);

    double ss1 = 0.0, ss0 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (obs.t[u]) {
            const double d = obs.y[u] - mean1;
            ss1 += d * d;
        } else {
            const double d = obs.y[u] - mean0;
            ss0 += d * d;
        }
    }

    ExperimentSummary s;
    s.n = n;
    s.m = m;
    s.mean1 = mean1;
    s.mean0 = mean0;
    s.s1sq = ss1 / static_cast<double>(m - 1);
    s.s0sq = ss0 / static_cast<double>(n - m - 1);
    return s;
}

// ---------------------------------------------------------------------------
// Estimand identity: which member of the w*SATT + (1-w)*SATC family, what is
// assumed about the potential-outcome correlation, and which sampling model
// the variance is interpreted under.
// ---------------------------------------------------------------------------

enum class EstimandKind { sate, satt, satc, mix, sato };

enum class RhoKind {
    known,    // exact value supplied, or resolved from a science table
    bound,    // upper bound rho* plugged in (conservative)
    neyman,   // classical estimator s1sq/m + s0sq/(n-m); SATE only
    rho_one,  // bound at rho = 1
};

struct RhoSpec {
    RhoKind kind = RhoKind::neyman;
    std::optional<double> value;  // for known/bound; known may defer to a science table

    static RhoSpec known(double rho) {
        require(rho >= -1.0 && rho <= 1.0, errc::rho_out_of_range, "rho must be in [-1,1]");
        return {RhoKind::known, rho};
    }
    static RhoSpec known_from_table() { return {RhoKind::known, std::nullopt}; }
    static RhoSpec bound(double rho_star) {
        require(rho_star >= -1.0 && rho_star <= 1.0, errc::rho_out_of_range,
                "rho* must be in [-1,1]");
        return {RhoKind::bound, rho_star};
    }
    static RhoSpec neyman() { return {RhoKind::neyman, std::nullopt}; }
    static RhoSpec rho_one() { return {RhoKind::rho_one, std::nullopt}; }
};

enum class SamplingModel { finite_population, super_population };

struct EstimandSpec {
    EstimandKind kind = EstimandKind::sate;
    double omega = 0.0;  // mix weight on SATT; used only when kind == mix
    RhoSpec rho;
    SamplingModel model = SamplingModel::finite_population;

    static EstimandSpec sate(RhoSpec rho = RhoSpec::neyman()) {
        return {EstimandKind::sate, 0.0, rho, SamplingModel::finite_population};
    }
    static EstimandSpec satt() {
        return {EstimandKind::satt, 1.0, RhoSpec::neyman(), SamplingModel::finite_population};
    }
    static EstimandSpec satc() {
        return {EstimandKind::satc, 0.0, RhoSpec::neyman(), SamplingModel::finite_population};
    }
    static EstimandSpec mix(double omega, RhoSpec rho = RhoSpec::known_from_table()) {
        require(omega >= 0.0 && omega <= 1.0, errc::bad_input, "mix weight must be in [0,1]");
        return {EstimandKind::mix, omega, rho, SamplingModel::finite_population};
    }
    static EstimandSpec sato(RhoSpec rho) {
        return {EstimandKind::sato, 0.0, rho, SamplingModel::finite_population};
    }

    EstimandSpec super_population() const {
        EstimandSpec s = *this;
        s.model = SamplingModel::super_population;
        return s;
    }
};

enum class VarianceMode { exact, paper_asymptotic };

inline const char* variance_mode_name(VarianceMode m) {
    return m == VarianceMode::exact ? "exact" : "paper";
}

struct IntervalResult {
    EstimandSpec estimand;
    double center = 0.0;
    double half_width = 0.0;
    double level = 0.0;  // 1 - alpha
    double variance = 0.0;
    VarianceMode variance_mode = VarianceMode::exact;

    double lower() const { return center - half_width; }
    double upper() const { return center + half_width; }
    bool contains(double x) const { return x >= lower() && x <= upper(); }
    bool rejects_zero() const { return !contains(0.0); }
};

// ---------------------------------------------------------------------------
// Canonical text form, shared by CLI flags, config files and report labels.
// Grammar: kind[:rho] with kind in {sate, satt, satc, mix:<w>, sato} and rho
// in {neyman, one, known, known:<r>, bound:<r>}.
// ---------------------------------------------------------------------------

inline std::string format_rho(const RhoSpec& r) {
    switch (r.kind) {
        case RhoKind::neyman: return "neyman";
        case RhoKind::rho_one: return "one";
        case RhoKind::known: return r.value ? "known:" + std::to_string(*r.value) : "known";
        case RhoKind::bound: return "bound:" + std::to_string(r.value.value_or(0.0));
    }
    return "?";
}

inline std::string format_estimand(const EstimandSpec& e) {
    std::string s;
    switch (e.kind) {
        case EstimandKind::sate: s = "sate"; break;
        case EstimandKind::satt: return "satt";
        case EstimandKind::satc: return "satc";
        case EstimandKind::mix: s = "mix:" + std::to_string(e.omega); break;
        case EstimandKind::sato: s = "sato"; break;
    }
    return s + ":" + format_rho(e.rho);
}

namespace detail {

inline double parse_real(const std::string& s, errc code, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        require(pos == s.size() && std::isfinite(v), code, what + ": '" + s + "'");
        return v;
    } catch (const error&) {
        throw;
    } catch (...) {
        fail(code, what + ": '" + s + "'");
    }
}

}  // namespace detail

inline RhoSpec parse_rho(const std::string& text) {
    if (text == "neyman") return RhoSpec::neyman();
    if (text == "one") return RhoSpec::rho_one();
    if (text == "known") return RhoSpec::known_from_table();
    if (text.rfind("known:", 0) == 0)
        return RhoSpec::known(detail::parse_real(text.substr(6), errc::config_invalid, "bad rho value"));
    if (text.rfind("bound:", 0) == 0)
        return RhoSpec::bound(detail::parse_real(text.substr(6), errc::config_invalid, "bad rho bound"));
    fail(errc::config_invalid, "unknown rho assumption '" + text + "'");
}

// Parses "satt", "sate:neyman", "mix:0.25:known:0.7", "sato:bound:1", ...
inline EstimandSpec parse_estimand(const std::string& text) {
    auto split_head = [](const std::string& s) -> std::pair<std::string, std::string> {
        const auto pos = s.find(':');
        if (pos == std::string::npos) return {s, ""};
        return {s.substr(0, pos), s.substr(pos + 1)};
    };
    auto [head, rest] = split_head(text);
    if (head == "satt") {
        require(rest.empty(), errc::config_invalid, "satt takes no rho assumption");
        return EstimandSpec::satt();
    }
    if (head == "satc") {
        require(rest.empty(), errc::config_invalid, "satc takes no rho assumption");
        return EstimandSpec::satc();
    }
    if (head == "sate")
        return EstimandSpec::sate(rest.empty() ? RhoSpec::neyman() : parse_rho(rest));
    if (head == "sato")
        return EstimandSpec::sato(rest.empty() ? RhoSpec::known_from_table() : parse_rho(rest));
    if (head == "mix") {
        auto [w, rho] = split_head(rest);
        require(!w.empty(), errc::config_invalid, "mix requires a weight, e.g. mix:0.5");
        const double omega = detail::parse_real(w, errc::config_invalid, "bad mix weight");
        return EstimandSpec::mix(omega, rho.empty() ? RhoSpec::known_from_table() : parse_rho(rho));
    }
    fail(errc::config_invalid, "unknown estimand '" + text + "'");
}

}  // namespace satkit

#endif
