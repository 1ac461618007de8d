#include "oracles.hpp"

#include "stratlab/errors.hpp"
#include "stratlab/report.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

using namespace stratlab;

namespace {

ReportRow mode_row() {
    ReportRow r;
    r.scenario = "s1";
    r.mode_k = 1;
    r.mode_l = -2;
    r.eta = 0.5;
    r.check = "energy_identity";
    r.statistic = 1.25e-7;
    r.threshold = 1e-4;
    r.pass = true;
    r.wall_ms = 0.0;
    return r;
}

ReportRow aggregate_row() {
    ReportRow r;
    r.scenario = "s1";
    r.check = "theorem1";
    r.statistic = 0.125;
    r.threshold = 0.2;
    r.pass = true;
    return r;
}

} // namespace

TEST_CASE("csv layout") {
    const std::string one = emit_report({mode_row()}, ReportFormat::csv);
    CHECK(one == "scenario,mode_k,mode_l,eta,check,statistic,threshold,pass,wall_ms\n"
                 "s1,1,-2,0.5,energy_identity,1.2499999999999999e-07,0.0001,true,0\n");
    CHECK(emit_report({aggregate_row()}, ReportFormat::csv) ==
          "scenario,mode_k,mode_l,eta,check,statistic,threshold,pass,wall_ms\n"
          "s1,,,,theorem1,0.125,0.20000000000000001,true,0\n");
    CHECK(emit_report({}, ReportFormat::csv) == std::string(csv_header) + "\n");
    CHECK(emit_report({}, ReportFormat::jsonl).empty());
}

TEST_CASE("jsonl layout") {
    CHECK(emit_report({aggregate_row()}, ReportFormat::jsonl) ==
          "{\"scenario\":\"s1\",\"mode_k\":null,\"mode_l\":null,\"eta\":null,\"check\":\"theorem1\","
          "\"statistic\":0.125,\"threshold\":0.20000000000000001,\"pass\":true,\"wall_ms\":0}\n");
}

TEST_CASE("round trip") {
    ReportRow failed = mode_row();
    failed.statistic = std::numeric_limits<double>::quiet_NaN();
    failed.pass = false;
    ReportRow inf = aggregate_row();
    inf.statistic = -std::numeric_limits<double>::infinity();
    const std::vector<ReportRow> rows{mode_row(), aggregate_row(), failed, inf};
    for (auto fmt : {ReportFormat::csv, ReportFormat::jsonl}) {
        const auto back = parse_report(emit_report(rows, fmt), fmt);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            // JSON has no infinities; they come back as NaN.
            if (fmt == ReportFormat::jsonl && std::isinf(rows[i].statistic)) {
                CHECK(std::isnan(back[i].statistic));
                continue;
            }
            CHECK(back[i] == rows[i]);
        }
    }
}

TEST_CASE("doubles survive serialisation exactly") {
    auto gen = oracle::rng(17);
    std::uniform_int_distribution<std::uint64_t> bits;
    std::vector<ReportRow> rows;
    while (rows.size() < 5000) {
        const double v = std::bit_cast<double>(bits(gen));
        if (!std::isfinite(v)) continue;
        ReportRow r = mode_row();
        r.statistic = v;
        r.eta = -v;
        r.threshold = v * 0.5;
        rows.push_back(r);
    }
    for (auto fmt : {ReportFormat::csv, ReportFormat::jsonl}) {
        const auto back = parse_report(emit_report(rows, fmt), fmt);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(std::bit_cast<std::uint64_t>(back[i].statistic) == std::bit_cast<std::uint64_t>(rows[i].statistic));
            CHECK(std::bit_cast<std::uint64_t>(*back[i].eta) == std::bit_cast<std::uint64_t>(*rows[i].eta));
        }
    }
}

TEST_CASE("parse errors cite the line") {
    const std::string header(csv_header);
    try {
        parse_report(header + "\ns1,1,0,0,x,1,1,true,0\ns1,1,0,zz,x,1,1,true,0\n", ReportFormat::csv);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_report("a,b\n", ReportFormat::csv), ParseError);
    CHECK_THROWS_AS(parse_report(header + "\ns1,1,0,0,x,1,1,maybe,0\n", ReportFormat::csv), ParseError);
    CHECK_THROWS_AS(parse_report("{\"scenario\":1}\n", ReportFormat::jsonl), ParseError);
    CHECK(parse_report(header + "\n", ReportFormat::csv).empty());
}
