#ifndef SATKIT_ERRORS_HPP
#define SATKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace satkit {

// Every failure mode the library can raise. The CLI maps each value to a
// distinct process exit code (see exit_code below).
enum class errc {
    parse_error,
    degenerate_variance,
    enumeration_too_large,
    config_invalid,
    group_too_small,
    rho_required,
    rho_undefined,
    rho_out_of_range,
    zero_sigma,
    degenerate_denominator,
    mismatched_inputs,
    rank_deficient,
    no_controls,
    invalid_marginals,
    unknown_formula,
    bad_input,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::parse_error: return "parse_error";
        case errc::degenerate_variance: return "degenerate_variance";
        case errc::enumeration_too_large: return "enumeration_too_large";
        case errc::config_invalid: return "config_invalid";
        case errc::group_too_small: return "group_too_small";
        case errc::rho_required: return "rho_required";
        case errc::rho_undefined: return "rho_undefined";
        case errc::rho_out_of_range: return "rho_out_of_range";
        case errc::zero_sigma: return "zero_sigma";
        case errc::degenerate_denominator: return "degenerate_denominator";
        case errc::mismatched_inputs: return "mismatched_inputs";
        case errc::rank_deficient: return "rank_deficient";
        case errc::no_controls: return "no_controls";
        case errc::invalid_marginals: return "invalid_marginals";
        case errc::unknown_formula: return "unknown_formula";
        case errc::bad_input: return "bad_input";
    }
    return "unknown";
}

// 0 = success, 1 = reserved for verification failures (cmd_oracle).
inline int exit_code(errc c) {
    switch (c) {
        case errc::parse_error: return 2;
        case errc::degenerate_variance: return 3;
        case errc::enumeration_too_large: return 4;
        case errc::config_invalid: return 5;
        case errc::group_too_small: return 6;
        case errc::rho_required: return 7;
        case errc::rho_undefined: return 8;
        case errc::rho_out_of_range: return 9;
        case errc::zero_sigma: return 10;
        case errc::degenerate_denominator: return 11;
        case errc::mismatched_inputs: return 12;
        case errc::rank_deficient: return 13;
        case errc::no_controls: return 14;
        case errc::invalid_marginals: return 15;
        case errc::unknown_formula: return 16;
        case errc::bad_input: return 17;
    }
    return 1;
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace satkit

#endif
