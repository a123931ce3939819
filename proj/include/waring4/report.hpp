// JSON report envelope and CSV row files.
//
// Every report is one JSON object that starts with its schema id, the
// library version and the effective configuration of the run. Numbers are
// written in shortest round-trip form, so identical inputs give identical
// bytes. 128-bit integers and exact rationals are written as strings.
#pragma once

#include "waring4/int128.hpp"
#include "waring4/params.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#ifndef WARING4_VERSION
#define WARING4_VERSION "0.1.0"
#endif

namespace waring4 {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = WARING4_VERSION;

/// {"schema": "waring4.<kind>/<n>", "version": ..., "config": ...}
inline Json report_header(const std::string& kind, int schema_version, const Json& config) {
    Json j = Json::object();
    j["schema"] = "waring4." + kind + "/" + std::to_string(schema_version);
    j["version"] = kVersion;
    j["config"] = config;
    return j;
}

inline Json u128_json(u128 v) { return to_string(v); }

inline Json complex_json(std::complex<double> z) {
    return Json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

inline Json parameters_json(const Parameters& P) {
    Json j = Json::object();
    for (const auto& [k, v] : P.record()) j[k] = v;
    j["range_condition"] = P.satisfies_range_condition();
    if (P.gamma()) j["gamma_in_window"] = P.gamma_in_window();
    return j;
}

/// Rows for a CSV file: one JSON object per row, cells picked by column name.
struct Table {
    std::vector<std::string> columns;
    std::vector<Json> rows;
};

inline std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    return s;
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const Json& row : t.rows) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const auto it = row.find(t.columns[i]);
            os << (i ? "," : "") << (it == row.end() ? std::string() : csv_cell(*it));
        }
        os << '\n';
    }
}

/// Pretty-printed report text, newline terminated.
inline std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace waring4
