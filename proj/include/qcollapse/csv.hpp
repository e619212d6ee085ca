#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qcollapse {

/// Locale-independent double formatting with 17 significant digits.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Comma-separated writer; one header line, '.' decimals.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& names) {
        for (const auto& n : names) raw(n);
        end_row();
    }
    void field(double x) { raw(format_double(x)); }
    void field(long long x) { raw(std::to_string(x)); }
    void field(std::size_t x) { raw(std::to_string(x)); }
    void field(int x) { raw(std::to_string(x)); }
    void field(std::string_view s) { raw(std::string(s)); }
    void end_row() {
        os_ << '\n';
        first_ = true;
    }

private:
    void raw(const std::string& s) {
        if (!first_) os_ << ',';
        os_ << s;
        first_ = false;
    }

    std::ostream& os_;
    bool first_ = true;
};

}  // namespace qcollapse
