// Write a RunResult to disk.
//
// Files, all under <dir>/<prefix>:
//   series.csv            time,value,label        (long format)
//   <grid>_heatmap.csv    time,site,value         (one per grid)
//   <table>.csv           table header + rows
//   metadata.json         resolved config and per-series max_imag
// Numbers use %.12g; NaN is written as `nan`. No timestamps, so reruns are byte-identical.

#pragma once

#include "scramble/cli/runner.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace scramble::cli {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

// F[site=2|lambda=1] -> F_site2_lambda1
inline std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') out += c;
        else if (c == '[' || c == '|') out += '_';
        else if (c == '_' && (out.empty() || out.back() != '_')) out += '_';
    }
    return out;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
}

}  // namespace detail

// Returns the paths written, in order.
inline std::vector<std::filesystem::path> write_outputs(const RunResult& r, const std::filesystem::path& dir, const std::string& prefix) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    if (!r.series.empty()) {
        const auto p = dir / (prefix + "series.csv");
        auto f = detail::open_out(p);
        f << "time,value,label\n";
        for (const auto& s : r.series)
            for (std::size_t k = 0; k < s.times.size(); ++k)
                f << format_number(s.times[k]) << ',' << format_number(s.values[k]) << ',' << csv_field(s.label) << '\n';
        written.push_back(p);
    }

    for (const auto& g : r.grids) {
        const auto p = dir / (prefix + file_stem(g.name) + "_heatmap.csv");
        auto f = detail::open_out(p);
        f << "time,site,value\n";
        for (std::size_t k = 0; k < g.times.size(); ++k)
            for (std::size_t s = 0; s < g.sites.size(); ++s)
                f << format_number(g.times[k]) << ',' << g.sites[s] << ',' << format_number(g.values[s][k]) << '\n';
        written.push_back(p);
    }

    for (const auto& t : r.tables) {
        const auto p = dir / (prefix + t.name + ".csv");
        auto f = detail::open_out(p);
        for (std::size_t c = 0; c < t.header.size(); ++c) f << (c ? "," : "") << csv_field(t.header[c]);
        f << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << csv_field(row[c]);
            f << '\n';
        }
        written.push_back(p);
    }

    const auto p = dir / (prefix + "metadata.json");
    auto f = detail::open_out(p);
    f << r.metadata.dump(2) << '\n';
    written.push_back(p);
    return written;
}

}  // namespace scramble::cli
