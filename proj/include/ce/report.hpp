#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ce/scenario.hpp"

// Report emission. The structured format is the JSON document itself and
// round-trips losslessly (doubles keep their exact value through
// dump/parse). The tabular format prints one row per position with a
// fixed column set; numbers carry 17 significant digits.

namespace ce {

enum class ReportFormat { structured, tabular };

inline std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "structured") return ReportFormat::structured;
    if (name == "tabular") return ReportFormat::tabular;
    return std::nullopt;
}

/// A finished command report: an ordered JSON document whose "positions"
/// array (when present) backs the tabular view.
struct Report {
    Json data;
};

namespace detail {

inline std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

inline std::string tabular_cell(const Json& row, const char* key) {
    if (!row.contains(key) || row[key].is_null()) return "-";
    const Json& cell = row[key];
    if (cell.is_number_float()) return format_double(cell.get<double>());
    if (cell.is_number_integer() || cell.is_number_unsigned())
        return std::to_string(cell.get<long long>());
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
}

} // namespace detail

/// Structured: the JSON document, 2-space indent. Tabular: header plus
/// one tab-separated row per position.
inline std::string format_report(const Report& report, ReportFormat format) {
    if (format == ReportFormat::structured) return report.data.dump(2) + "\n";

    static constexpr const char* kColumns[] = {"position", "id",         "score",
                                               "price",    "click_prob", "contribution"};
    std::ostringstream out;
    for (std::size_t i = 0; i < std::size(kColumns); ++i)
        out << (i == 0 ? "" : "\t") << kColumns[i];
    out << '\n';
    if (report.data.contains("positions")) {
        for (const Json& row : report.data["positions"]) {
            for (std::size_t i = 0; i < std::size(kColumns); ++i)
                out << (i == 0 ? "" : "\t") << detail::tabular_cell(row, kColumns[i]);
            out << '\n';
        }
    }
    return out.str();
}

inline void write_report(const Report& report, const std::filesystem::path& path,
                         ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("report: cannot write '" + path.string() + "'");
    out << format_report(report, format);
}

/// Parses a structured report back into its JSON document.
inline Report load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("report: cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return Report{Json::parse(buffer.str())};
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(std::string("report: parse error: ") + e.what());
    }
}

} // namespace ce
