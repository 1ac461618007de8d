#pragma once

// Report rows and their CSV / JSON-lines serialisation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratlab {

/// One check outcome. Field-level rows leave mode_k, mode_l and eta unset.
struct ReportRow {
    std::string scenario;
    std::optional<std::int64_t> mode_k;
    std::optional<std::int64_t> mode_l;
    std::optional<double> eta;
    std::string check;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double wall_ms = 0.0;
    /// Error text of a failed task; not serialised.
    std::string note;

    bool operator==(const ReportRow& o) const;
};

inline constexpr std::string_view csv_header = "scenario,mode_k,mode_l,eta,check,statistic,threshold,pass,wall_ms";

enum class ReportFormat { csv, jsonl };

/// %.17g formatting; nan/inf spelled "nan", "inf", "-inf".
std::string format_double(double v);

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format);

/// Inverse of emit_report (notes are not round-tripped). Throws ParseError.
std::vector<ReportRow> parse_report(std::string_view text, ReportFormat format);

} // namespace stratlab
