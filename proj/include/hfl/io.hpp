#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hfl::io {

// Table of pre-formatted cells; numbers go through fmt() so output is reproducible.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

// Shortest round-trip decimal for finite values; "nan", "inf", "-inf" otherwise.
std::string fmt(double v);
std::string fmt(long long v);
inline std::string fmt(int v) { return fmt(static_cast<long long>(v)); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }

// RFC 4180: CRLF records, fields quoted when they contain comma, quote, CR or LF.
std::string csv_field(const std::string& s);
std::string to_csv(const Table& t);
// Whitespace columns for gnuplot, header as a comment line.
std::string to_plot_data(const Table& t);

void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace hfl::io
