#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace hkvar;
using namespace hkvar::testing;

TEST_CASE("grid files round-trip bit for bit") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto part = random_partition(random_rect(n, gen, -1e3, 1e3), gen);
        std::vector<double> values(part.vertex_count());
        for (auto& v : values) v = uniform(gen, -1e6, 1e6) * std::pow(10.0, uniform(gen, -200.0, 200.0));
        const GridSample s(part, values);
        std::stringstream io;
        write_grid(s, io);
        const auto back = read_grid(io);
        CHECK(back.partition() == s.partition());
        CHECK(back.values() == s.values());
    }
}

TEST_CASE("grid reader diagnostics") {
    const auto fails = [](const std::string& text, std::size_t line, const std::string& needle) {
        std::istringstream in(text);
        try {
            read_grid(in);
        } catch (const FormatError& e) {
            CHECK(e.line() == line);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            return;
        }
        FAIL("expected FormatError");
    };
    fails("hkgrid 1\ndim 1\naxis 0 2\n0 1\nvalues 2\n1\n", 6, "length mismatch: expected 2 values, found 1");
    fails("hkgrid 1\ndim 1\naxis 0 2\n0 1\nvalues 3\n1\n2\n3\n", 5, "length mismatch");
    fails("hkgrid 2\n", 1, "version");
    fails("# c\nhkgrid 1\ndim 1\naxis 0 2\n1 0\n", 5, "strictly increasing");
    fails("hkgrid 1\ndim 1\naxis 0 2\n0 1\nvalues 2\n1\nx\n", 7, "invalid value");
    fails("hkgrid 1\ndim 1\naxis 0 2\n0 1\nvalues 2\n1\ninf\n", 7, "non-finite");
    fails("", 0, "unexpected end");
}

TEST_CASE("comments and blank lines are ignored") {
    std::istringstream in("# header\nhkgrid 1\n\ndim 2\naxis 0 2\n0 1\naxis 1 2\n0 1\nvalues 4\n0 0 0 1\n");
    const auto s = read_grid(in);
    CHECK(s.values() == std::vector<double>{0, 0, 0, 1});
    CHECK(joint_increment(FuncSource::sampled(s), Rect::unit(2)) == 1.0);
}

TEST_CASE("empty report lists") {
    std::ostringstream js, cs;
    emit_report({}, ReportFormat::JSON, js);
    CHECK(js.str() == "[]\n");
    emit_report({}, ReportFormat::CSV, cs);
    CHECK(cs.str() ==
          "schema_version,theorem,function,pass,relation,lhs,rhs,slack,side_conditions_passed,"
          "side_conditions_total,precondition,trace_lengths\n");
}

TEST_CASE("reports are sorted and non-finite numbers become null") {
    TheoremReport a, b;
    a.theorem = "zeta";
    a.function = "f";
    b.theorem = "alpha";
    b.function = "g";
    b.lhs = std::nan("");
    b.notes["precondition"] = "not monotone, cell [0, 1]";
    const auto text = reports_to_json({a, b});
    CHECK(text.find("alpha") < text.find("zeta"));
    CHECK(text.find("\"lhs\": null") != std::string::npos);
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
    std::ostringstream cs;
    emit_report({a, b}, ReportFormat::CSV, cs);
    const auto csv = cs.str();
    CHECK(csv.find("alpha") < csv.find("zeta"));
    CHECK(csv.find("\"not monotone, cell [0, 1]\"") != std::string::npos);
}
