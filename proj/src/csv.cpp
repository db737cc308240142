#include "smj/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace smj {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out_ << ',';
        out_ << header[k];
    }
    out_ << '\n';
}

void CsvWriter::field(const std::string& x) {
    if (line_started_) out_ << ',';
    out_ << x;
    line_started_ = true;
}

void CsvWriter::field(double x) { field(format_double(x)); }

void CsvWriter::end_row() {
    out_ << '\n';
    line_started_ = false;
}

}  // namespace smj
