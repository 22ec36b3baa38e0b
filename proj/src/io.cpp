#include "hfl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hfl/error.hpp"

namespace hfl::io {

void Table::add(std::vector<std::string> row) {
    if (!header.empty() && row.size() != header.size())
        throw UsageError("table '" + name + "': row width does not match the header");
    rows.push_back(std::move(row));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += csv_field(r[i]);
        }
        out += "\r\n";
    };
    if (!t.header.empty()) line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

namespace {

std::string plot_cell(const std::string& s) {
    if (s.empty()) return "\"\"";
    if (s.find_first_of(" \t\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? '\'' : c;
    return out + "\"";
}

}  // namespace

std::string to_plot_data(const Table& t) {
    std::ostringstream os;
    if (!t.header.empty()) {
        os << '#';
        for (const auto& h : t.header) os << ' ' << plot_cell(h);
        os << '\n';
    }
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << plot_cell(r[i]);
        os << '\n';
    }
    return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw UsageError("cannot open " + p.string() + " for writing");
    f << content;
    if (!f) throw UsageError("write failed for " + p.string());
}

}  // namespace hfl::io
