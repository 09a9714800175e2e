// csv.hpp — Schema-versioned CSV emission: '#' metadata lines, fixed header,
// atomic write (temp file + rename), explicit NA sentinel for undefined
// quantities.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace jumpstats {

std::string csv_num(double v);        // round-trip exact; throws on non-finite
std::string csv_num(long long v);
std::string csv_num(std::uint64_t v);
std::string csv_opt(std::optional<double> v); // "NA" when absent

class CsvWriter {
  public:
    explicit CsvWriter(std::filesystem::path path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void metadata(const std::string& line);              // emitted as "# line"
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);     // must match header width
    void commit();                                       // rename into place

  private:
    std::filesystem::path final_path_;
    std::filesystem::path temp_path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    bool committed_ = false;
};

} // namespace jumpstats
