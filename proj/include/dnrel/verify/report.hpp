#pragma once

#include "dnrel/relcore/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace dnrel::verify {

/// Outcome of one named identity check. passed == (residual <= tolerance).
struct CheckReport {
    std::string name;
    std::string context;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<std::pair<std::string, double>> details;
    std::string note;
};

inline CheckReport make_report(std::string name, std::string context, double residual, double tolerance,
                               std::vector<std::pair<std::string, double>> details = {}, std::string note = {})
{
    CheckReport r;
    r.name = std::move(name);
    r.context = std::move(context);
    r.residual = std::max(0.0, residual);
    r.tolerance = tolerance;
    r.passed = r.residual <= tolerance;
    r.details = std::move(details);
    r.note = std::move(note);
    return r;
}

/// Shortest round-trip decimal form; identical doubles print identically.
inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_scalar(double x) { return format_double(x); }
inline std::string format_scalar(const Complex& z)
{
    return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

inline Json to_json(const CheckReport& r)
{
    Json j;
    j["name"] = r.name;
    j["context"] = r.context;
    j["residual"] = r.residual;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    Json d = Json::object();
    for (const auto& [k, v] : r.details) d[k] = v;
    j["details"] = std::move(d);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline Json to_json(const std::vector<CheckReport>& reports)
{
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<CheckReport>& reports)
{
    os << "name,context,residual,tolerance,passed\r\n";
    for (const auto& r : reports)
        os << csv_field(r.name) << ',' << csv_field(r.context) << ',' << format_double(r.residual) << ','
           << format_double(r.tolerance) << ',' << (r.passed ? "true" : "false") << "\r\n";
}

inline bool all_passed(const std::vector<CheckReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed; });
}

inline void sort_by_name(std::vector<CheckReport>& reports)
{
    std::stable_sort(reports.begin(), reports.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
}

}  // namespace dnrel::verify
