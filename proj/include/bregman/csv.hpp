#pragma once

// CSV output: comma separated, '.' decimal point, LF endings, scientific
// notation for |x| < 1e-4 or |x| > 1e6.

#include "bregman/core.hpp"

#include <cstdio>
#include <ostream>

namespace bregman {

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const double a = std::abs(x);
    if (a < 1e-4 || a > 1e6) std::snprintf(buf, sizeof buf, "%.12e", x);
    else std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Coordinates joined by spaces.
inline std::string format_point(const Vector& x) {
    std::string s;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i) s += ' ';
        s += format_number(x[i]);
    }
    return s;
}

/// Points joined by ';'.
inline std::string format_points(const std::vector<Vector>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ';';
        s += format_point(xs[i]);
    }
    return s;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw InvalidArgument("CSV row width differs from the header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
    std::size_t columns_;
};

}  // namespace bregman
