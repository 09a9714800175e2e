#include "jumpstats/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace jumpstats {

// Shortest representation that round-trips exactly.
std::string csv_num(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("csv_num: refusing to emit a non-finite value");
    }
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

std::string csv_num(long long v) { return std::to_string(v); }
std::string csv_num(std::uint64_t v) { return std::to_string(v); }

std::string csv_opt(std::optional<double> v) { return v ? csv_num(*v) : "NA"; }

CsvWriter::CsvWriter(std::filesystem::path path) : final_path_(std::move(path)) {
    if (final_path_.has_parent_path()) {
        std::filesystem::create_directories(final_path_.parent_path());
    }
    temp_path_ = final_path_;
    temp_path_ += ".tmp";
    out_.open(temp_path_, std::ios::out | std::ios::trunc);
    if (!out_) {
        throw std::runtime_error("CsvWriter: cannot open " + temp_path_.string());
    }
}

CsvWriter::~CsvWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(temp_path_, ec);
    }
}

void CsvWriter::metadata(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw std::logic_error("CsvWriter: row width " + std::to_string(cells.size()) +
                               " does not match header width " + std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }
}

void CsvWriter::commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("CsvWriter: write failed for " + temp_path_.string());
    out_.close();
    std::filesystem::rename(temp_path_, final_path_);
    committed_ = true;
}

} // namespace jumpstats
