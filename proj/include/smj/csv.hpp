#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace smj {

// RFC-4180-style CSV with a header row, '.' decimal separator, and a fixed
// %.17g float format so identical runs produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void field(const std::string& x);
    void field(const char* x) { field(std::string(x)); }
    void field(double x);
    void field(int x) { field(std::to_string(x)); }
    void field(long x) { field(std::to_string(x)); }
    void field(unsigned long long x) { field(std::to_string(x)); }
    void end_row();

    template <typename... Ts>
    void row(const Ts&... xs) {
        (field(xs), ...);
        end_row();
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    bool line_started_ = false;
};

std::string format_double(double x);

}  // namespace smj
