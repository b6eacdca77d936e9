#ifndef SATKIT_CSV_HPP
#define SATKIT_CSV_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "satkit/errors.hpp"

// Minimal CSV dialect: comma separators, mandatory header row, '.' decimals,
// UTF-8, no quoting. Floats are written with 17 significant digits so a
// round trip reproduces every bit.
namespace satkit::csv {

struct Row {
    std::size_t line = 0;  // 1-based line number in the input
    std::vector<std::string> fields;
};

class Reader {
public:
    explicit Reader(std::istream& in, std::string source = "input") : in_(in), source_(std::move(source)) {
        std::string line;
        if (!std::getline(in_, line))
            fail(errc::parse_error, source_ + ": empty input, expected a header row");
        ++line_no_;
        header_ = split(line);
    }

    const std::vector<std::string>& header() const { return header_; }

    // 1-based number of the line read most recently (header included)
    std::size_t line_no() const { return line_no_; }

    // column index lookup; parse_error when required and absent
    std::int64_t column(const std::string& name, bool required = true) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return static_cast<std::int64_t>(i);
        if (required)
            fail(errc::parse_error, source_ + ": line 1: missing required column '" + name + "'");
        return -1;
    }

    bool next(Row& row) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty() || line == "\r") continue;
            row.line = line_no_;
            row.fields = split(line);
            if (row.fields.size() != header_.size())
                fail(errc::parse_error,
                     source_ + ": line " + std::to_string(line_no_) + ": expected " +
                         std::to_string(header_.size()) + " fields, got " +
                         std::to_string(row.fields.size()));
            return true;
        }
        return false;
    }

    double real(const Row& row, std::int64_t col) const {
        const auto& s = row.fields[static_cast<std::size_t>(col)];
        double value = 0.0;
        const auto* begin = s.data();
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end)
            fail(errc::parse_error, source_ + ": line " + std::to_string(row.line) +
                                        ", column '" + header_[static_cast<std::size_t>(col)] +
                                        "': cannot parse '" + s + "' as a real number");
        return value;
    }

    std::int64_t integer(const Row& row, std::int64_t col) const {
        const auto& s = row.fields[static_cast<std::size_t>(col)];
        std::int64_t value = 0;
        const auto* begin = s.data();
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end)
            fail(errc::parse_error, source_ + ": line " + std::to_string(row.line) +
                                        ", column '" + header_[static_cast<std::size_t>(col)] +
                                        "': cannot parse '" + s + "' as an integer");
        return value;
    }

private:
    static std::vector<std::string> split(std::string line) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            if (pos == std::string::npos) {
                out.push_back(line.substr(start));
                break;
            }
            out.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        return out;
    }

    std::istream& in_;
    std::string source_;
    std::vector<std::string> header_;
    std::size_t line_no_ = 0;
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

}  // namespace satkit::csv

#endif
