#include "caplab/io/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace caplab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::field(const std::string& v) {
    if (row_open_) out_ << ',';
    out_ << v;
    row_open_ = true;
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long long v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
    ++rows_;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("csv write failed");
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("csv: missing column " + name);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        std::vector<std::string> fields;
        std::string cur;
        std::stringstream ss(line);
        while (std::getline(ss, cur, ',')) fields.push_back(cur);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) throw std::runtime_error("csv: missing header row in " + path);
    return table;
}

}  // namespace caplab
