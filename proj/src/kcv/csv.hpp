#pragma once

#include <charconv>
#include <cstring>
#include <ostream>
#include <string>

namespace kcv {

// Shortest locale-independent representation that round-trips a double and
// carries 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::string& line) { os_ << line << '\n'; }

    CsvWriter& col(double x) {
        if (!first_) os_ << ',';
        os_ << format_double(x);
        first_ = false;
        return *this;
    }
    CsvWriter& col(const std::string& s) {
        if (!first_) os_ << ',';
        os_ << s;
        first_ = false;
        return *this;
    }
    void endrow() {
        os_ << '\n';
        first_ = true;
    }

private:
    std::ostream& os_;
    bool first_{true};
};

} // namespace kcv
