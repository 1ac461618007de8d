#include "stratlab/report.hpp"

#include "stratlab/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace stratlab {

namespace {

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(std::string_view s, int line) {
    const std::string buf(s);
    if (buf == "nan") return NAN;
    if (buf == "inf") return INFINITY;
    if (buf == "-inf") return -INFINITY;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) throw ParseError(line, "malformed number '" + buf + "'");
    return v;
}

std::int64_t parse_int(std::string_view s, int line) {
    const std::string buf(s);
    char* end = nullptr;
    const long long v = std::strtoll(buf.c_str(), &end, 10);
    if (buf.empty() || end != buf.c_str() + buf.size()) throw ParseError(line, "malformed integer '" + buf + "'");
    return v;
}

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

double json_double(const nlohmann::json& j) { return j.is_null() ? NAN : j.get<double>(); }

} // namespace

bool ReportRow::operator==(const ReportRow& o) const {
    const bool eta_eq = eta.has_value() == o.eta.has_value() && (!eta || same_double(*eta, *o.eta));
    return scenario == o.scenario && mode_k == o.mode_k && mode_l == o.mode_l && eta_eq && check == o.check &&
           same_double(statistic, o.statistic) && same_double(threshold, o.threshold) && pass == o.pass &&
           same_double(wall_ms, o.wall_ms);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << csv_header << '\n';
        for (const auto& r : rows) {
            out << r.scenario << ',' << (r.mode_k ? std::to_string(*r.mode_k) : "") << ','
                << (r.mode_l ? std::to_string(*r.mode_l) : "") << ',' << (r.eta ? format_double(*r.eta) : "") << ','
                << r.check << ',' << format_double(r.statistic) << ',' << format_double(r.threshold) << ','
                << (r.pass ? "true" : "false") << ',' << format_double(r.wall_ms) << '\n';
        }
        return out.str();
    }
    for (const auto& r : rows) {
        out << "{\"scenario\":" << nlohmann::json(r.scenario).dump()
            << ",\"mode_k\":" << (r.mode_k ? std::to_string(*r.mode_k) : "null")
            << ",\"mode_l\":" << (r.mode_l ? std::to_string(*r.mode_l) : "null")
            << ",\"eta\":" << (r.eta ? json_number(*r.eta) : "null") << ",\"check\":" << nlohmann::json(r.check).dump()
            << ",\"statistic\":" << json_number(r.statistic) << ",\"threshold\":" << json_number(r.threshold)
            << ",\"pass\":" << (r.pass ? "true" : "false") << ",\"wall_ms\":" << json_number(r.wall_ms) << "}\n";
    }
    return out.str();
}

std::vector<ReportRow> parse_report(std::string_view text, ReportFormat format) {
    std::vector<ReportRow> rows;
    int line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (format == ReportFormat::csv) {
            if (!header_seen) {
                if (line != csv_header) throw ParseError(line_no, "unexpected CSV header");
                header_seen = true;
                continue;
            }
            const auto f = split_csv(line);
            if (f.size() != 9) throw ParseError(line_no, "expected 9 fields, got " + std::to_string(f.size()));
            ReportRow r;
            r.scenario = std::string(f[0]);
            if (!f[1].empty()) r.mode_k = parse_int(f[1], line_no);
            if (!f[2].empty()) r.mode_l = parse_int(f[2], line_no);
            if (!f[3].empty()) r.eta = parse_double(f[3], line_no);
            r.check = std::string(f[4]);
            r.statistic = parse_double(f[5], line_no);
            r.threshold = parse_double(f[6], line_no);
            if (f[7] != "true" && f[7] != "false") throw ParseError(line_no, "pass must be true or false");
            r.pass = f[7] == "true";
            r.wall_ms = parse_double(f[8], line_no);
            rows.push_back(std::move(r));
        } else {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
                ReportRow r;
                r.scenario = j.at("scenario").get<std::string>();
                if (!j.at("mode_k").is_null()) r.mode_k = j.at("mode_k").get<std::int64_t>();
                if (!j.at("mode_l").is_null()) r.mode_l = j.at("mode_l").get<std::int64_t>();
                if (!j.at("eta").is_null()) r.eta = j.at("eta").get<double>();
                r.check = j.at("check").get<std::string>();
                r.statistic = json_double(j.at("statistic"));
                r.threshold = json_double(j.at("threshold"));
                r.pass = j.at("pass").get<bool>();
                r.wall_ms = json_double(j.at("wall_ms"));
                rows.push_back(std::move(r));
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(line_no, e.what());
            }
        }
    }
    if (format == ReportFormat::csv && !header_seen && !text.empty()) throw ParseError(1, "missing CSV header");
    return rows;
}

} // namespace stratlab
