#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace caplab {

/// Minimal CSV writer: UTF-8, '.' decimal separator, header row mandatory.
/// Doubles are written with 17 significant digits so files round-trip and
/// regenerate byte-identically.
class CsvWriter {
   public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void field(const std::string& v);
    void field(double v);
    void field(long long v);
    void field(int v) { field(static_cast<long long>(v)); }
    void end_row();
    void close();
    long long rows() const { return rows_; }

   private:
    std::ofstream out_;
    bool row_open_ = false;
    long long rows_ = 0;
};

std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace caplab
