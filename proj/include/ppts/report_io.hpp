#pragma once

#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppts/distribution.hpp"
#include "ppts/solver.hpp"

namespace ppts {

/// One solved problem, flattened for serialization.
struct SolveRecord {
    std::string distribution;
    std::map<std::string, double> parameters;
    int n = 0;
    std::vector<double> points;
    double distortion = 0.0;
    double residual_inf_norm = 0.0;
    int iterations = 0;
    std::string path;
};

inline SolveRecord make_record(const DistributionModel& model, const SolverReport& report) {
    SolveRecord rec;
    rec.distribution = model.name();
    rec.parameters = model.parameters();
    rec.n = static_cast<int>(report.points.size());
    rec.points = report.points;
    rec.distortion = report.distortion;
    rec.residual_inf_norm = report.residual_inf_norm;
    rec.iterations = report.iterations;
    rec.path = to_string(report.path);
    return rec;
}

enum class OutputFormat { csv, json, table, latex };

inline OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    if (name == "table") return OutputFormat::table;
    if (name == "latex") return OutputFormat::latex;
    throw std::invalid_argument("unknown output format '" + name +
                                "' (expected csv, json, table, or latex)");
}

namespace detail {

// Round-trippable decimal form, independent of any installed locale.
inline std::string shortest(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

inline std::string compact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline void json_object(std::string& out, const SolveRecord& rec, const std::string& indent) {
    out += indent + "{\n";
    out += indent + "  \"distribution\": \"" + json_escape(rec.distribution) + "\",\n";
    out += indent + "  \"parameters\": {";
    bool first = true;
    for (const auto& [key, value] : rec.parameters) {
        if (!first) out += ", ";
        first = false;
        out += "\"" + json_escape(key) + "\": " + shortest(value);
    }
    out += "},\n";
    out += indent + "  \"n\": " + std::to_string(rec.n) + ",\n";
    out += indent + "  \"points\": [";
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        if (i > 0) out += ", ";
        out += shortest(rec.points[i]);
    }
    out += "],\n";
    out += indent + "  \"distortion\": " + shortest(rec.distortion) + ",\n";
    out += indent + "  \"residual_inf_norm\": " + shortest(rec.residual_inf_norm) + ",\n";
    out += indent + "  \"iterations\": " + std::to_string(rec.iterations) + ",\n";
    out += indent + "  \"path\": \"" + json_escape(rec.path) + "\"\n";
    out += indent + "}";
}

}  // namespace detail

/// One row per point; full precision.
inline std::string to_csv(const std::vector<SolveRecord>& records) {
    std::string out = "distribution,n,j,a_j,V_n,residual,iterations\n";
    for (const SolveRecord& rec : records) {
        for (std::size_t j = 0; j < rec.points.size(); ++j) {
            out += rec.distribution + ',' + std::to_string(rec.n) + ',' +
                   std::to_string(j + 1) + ',' + detail::shortest(rec.points[j]) + ',' +
                   detail::shortest(rec.distortion) + ',' +
                   detail::shortest(rec.residual_inf_norm) + ',' +
                   std::to_string(rec.iterations) + '\n';
        }
    }
    return out;
}

/// A single record renders as one object, several as an array; full precision.
inline std::string to_json(const std::vector<SolveRecord>& records) {
    std::string out;
    if (records.size() == 1) {
        detail::json_object(out, records.front(), "");
        out += '\n';
        return out;
    }
    out += "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        detail::json_object(out, records[i], "  ");
        out += (i + 1 < records.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

/// Aligned human-readable summary, points at four decimals.
inline std::string to_table(const std::vector<SolveRecord>& records) {
    std::string out = "distribution          n         V_n  points\n";
    for (const SolveRecord& rec : records) {
        char head[80];
        std::snprintf(head, sizeof head, "%-18s %4d  %10s ", rec.distribution.c_str(), rec.n,
                      detail::compact(rec.distortion).c_str());
        out += head;
        for (double p : rec.points) {
            char cell[32];
            std::snprintf(cell, sizeof cell, " %9.4f", p);
            out += cell;
        }
        out += '\n';
    }
    return out;
}

/// Rows of a tabular environment, points at four decimals.
inline std::string to_latex(const std::vector<SolveRecord>& records) {
    std::string out =
        "\\begin{tabular}{lrrl}\n"
        "\\hline\n"
        "distribution & $n$ & $V_n$ & points \\\\\n"
        "\\hline\n";
    for (const SolveRecord& rec : records) {
        out += rec.distribution + " & " + std::to_string(rec.n) + " & " +
               detail::compact(rec.distortion) + " & $";
        for (std::size_t i = 0; i < rec.points.size(); ++i) {
            if (i > 0) out += ", ";
            out += detail::fixed(rec.points[i], 4);
        }
        out += "$ \\\\\n";
    }
    out += "\\hline\n\\end{tabular}\n";
    return out;
}

inline std::string render(const std::vector<SolveRecord>& records, OutputFormat format) {
    switch (format) {
        case OutputFormat::csv: return to_csv(records);
        case OutputFormat::json: return to_json(records);
        case OutputFormat::table: return to_table(records);
        case OutputFormat::latex: return to_latex(records);
    }
    throw std::invalid_argument("render: unhandled format");
}

}  // namespace ppts
