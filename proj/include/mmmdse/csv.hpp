#pragma once

/// @file csv.hpp
/// @brief Minimal RFC 4180 tables: every CSV the tools emit reads back through read_csv.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mmmdse {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; throws ParseError when absent.
    std::size_t column(const std::string& name) const;
    friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

void write_csv(std::ostream& os, const CsvTable& table);
void save_csv(const std::filesystem::path& path, const CsvTable& table);
/// Throws ParseError on unbalanced quotes or rows whose width differs from the header.
CsvTable read_csv(std::istream& is);
CsvTable load_csv(const std::filesystem::path& path);

}  // namespace mmmdse
