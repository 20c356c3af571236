#include "hkvar/io.hpp"

#include "hkvar/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace hkvar {

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

class TokenStream {
public:
    explicit TokenStream(std::istream& in) {
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            std::string t;
            while (ls >> t) tokens_.push_back({t, no});
        }
        last_line_ = no;
    }

    bool done() const { return pos_ == tokens_.size(); }
    std::size_t remaining() const { return tokens_.size() - pos_; }
    std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }

    const Token& next(const char* what) {
        if (done()) throw FormatError(std::string("unexpected end of file, expected ") + what, last_line_);
        return tokens_[pos_++];
    }

    void expect(const std::string& keyword) {
        const auto& t = next(keyword.c_str());
        if (t.text != keyword)
            throw FormatError("expected '" + keyword + "', found '" + t.text + "'", t.line);
    }

    std::size_t count(const char* what) {
        const auto& t = next(what);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(t.text.c_str(), &end, 10);
        if (errno != 0 || end != t.text.c_str() + t.text.size() || t.text[0] == '-')
            throw FormatError(std::string("invalid ") + what + " '" + t.text + "'", t.line);
        return static_cast<std::size_t>(v);
    }

    double number(const char* what) {
        const auto& t = next(what);
        char* end = nullptr;
        const double v = std::strtod(t.text.c_str(), &end);
        if (end != t.text.c_str() + t.text.size())
            throw FormatError(std::string("invalid ") + what + " '" + t.text + "'", t.line);
        if (!std::isfinite(v))
            throw FormatError(std::string("non-finite ") + what + " '" + t.text + "'", t.line);
        return v;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t last_line_ = 0;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

json to_json(const TheoremReport& r) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["theorem"] = r.theorem;
    j["function"] = r.function;
    j["pass"] = r.pass;
    j["relation"] = to_string(r.relation);
    j["lhs"] = num(r.lhs);
    j["rhs"] = num(r.rhs);
    j["slack"] = num(r.slack);

    json inputs;
    if (r.rect) inputs["rect"] = {{"lo", vec(r.rect->lo())}, {"hi", vec(r.rect->hi())}};
    else inputs["rect"] = nullptr;
    inputs["grid"] = r.grid;
    if (r.schedule)
        inputs["schedule"] = {{"h0", num(r.schedule->h0)},
                              {"ratio", num(r.schedule->ratio)},
                              {"max_steps", r.schedule->max_steps},
                              {"rtol", num(r.schedule->rtol)},
                              {"atol", num(r.schedule->atol)}};
    else
        inputs["schedule"] = nullptr;
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = num(v);
    inputs["parameters"] = params;
    j["inputs"] = inputs;

    json sides = json::array();
    for (const auto& c : r.side_conditions)
        sides.push_back({{"name", c.name},
                         {"relation", to_string(c.relation)},
                         {"lhs", num(c.lhs)},
                         {"rhs", num(c.rhs)},
                         {"slack", num(c.slack)},
                         {"pass", c.pass}});
    j["side_conditions"] = sides;

    json diag;
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = num(v);
    diag["metrics"] = metrics;
    json notes = json::object();
    for (const auto& [k, v] : r.notes) notes[k] = v;
    diag["notes"] = notes;
    json traces = json::object();
    for (const auto& [k, v] : r.traces) traces[k] = vec(v);
    diag["traces"] = traces;
    j["diagnostics"] = diag;
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void sort_reports(std::vector<TheoremReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const TheoremReport& a, const TheoremReport& b) {
                         return std::tie(a.theorem, a.function) < std::tie(b.theorem, b.function);
                     });
}

void write_csv(const std::vector<TheoremReport>& reports, std::ostream& out) {
    out << "schema_version,theorem,function,pass,relation,lhs,rhs,slack,side_conditions_passed,"
           "side_conditions_total,precondition,trace_lengths\n";
    for (const auto& r : reports) {
        std::size_t side_ok = 0;
        for (const auto& c : r.side_conditions) side_ok += c.pass ? 1 : 0;
        std::string traces;
        for (const auto& [k, v] : r.traces) {
            if (!traces.empty()) traces += ';';
            traces += k + "=" + std::to_string(v.size());
        }
        const auto pre = r.notes.find("precondition");
        out << kReportSchemaVersion << ',' << csv_field(r.theorem) << ',' << csv_field(r.function)
            << ',' << (r.pass ? "true" : "false") << ',' << to_string(r.relation) << ','
            << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ',' << fmt17(r.slack) << ',' << side_ok
            << ',' << r.side_conditions.size() << ','
            << csv_field(pre == r.notes.end() ? "" : pre->second) << ',' << csv_field(traces)
            << '\n';
    }
}

} // namespace

GridSample read_grid(std::istream& in) {
    TokenStream ts(in);
    ts.expect("hkgrid");
    {
        const std::size_t line = ts.line();
        const auto version = ts.count("format version");
        if (version != 1)
            throw FormatError("unsupported grid format version " + std::to_string(version), line);
    }
    ts.expect("dim");
    const std::size_t dim_line = ts.line();
    const std::size_t n = ts.count("dimension");
    if (n < 1 || n > kMaxDimension)
        throw FormatError("dimension must be in 1.." + std::to_string(kMaxDimension), dim_line);

    std::vector<std::vector<double>> axes(n);
    std::size_t expected = 1;
    for (std::size_t i = 0; i < n; ++i) {
        ts.expect("axis");
        const std::size_t axis_line = ts.line();
        const std::size_t idx = ts.count("axis index");
        if (idx != i)
            throw FormatError("expected axis " + std::to_string(i) + ", found axis " +
                                  std::to_string(idx),
                              axis_line);
        const std::size_t count = ts.count("breakpoint count");
        if (count < 2) throw FormatError("axis needs at least 2 breakpoints", axis_line);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t line = ts.line();
            const double v = ts.number("breakpoint");
            if (!axes[i].empty() && !(v > axes[i].back()))
                throw FormatError("breakpoints on axis " + std::to_string(i) +
                                      " must be strictly increasing",
                                  line);
            axes[i].push_back(v);
        }
        expected *= count;
    }
    ts.expect("values");
    const std::size_t values_line = ts.line();
    const std::size_t declared = ts.count("value count");
    if (declared != expected)
        throw FormatError("length mismatch: expected " + std::to_string(expected) +
                              " values, header declares " + std::to_string(declared),
                          values_line);
    if (ts.remaining() != expected)
        throw FormatError("length mismatch: expected " + std::to_string(expected) +
                              " values, found " + std::to_string(ts.remaining()),
                          ts.line());
    std::vector<double> values;
    values.reserve(expected);
    for (std::size_t k = 0; k < expected; ++k) values.push_back(ts.number("value"));
    return GridSample(GridPartition(std::move(axes)), std::move(values));
}

GridSample read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open grid file '" + path + "'", 0);
    try {
        return read_grid(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
    }
}

void write_grid(const GridSample& sample, std::ostream& out) {
    const auto& p = sample.partition();
    out << "hkgrid 1\n" << "dim " << p.dimension() << '\n';
    for (std::size_t i = 0; i < p.dimension(); ++i) {
        out << "axis " << i << ' ' << p.axis(i).size() << '\n';
        for (std::size_t k = 0; k < p.axis(i).size(); ++k)
            out << (k ? " " : "") << fmt17(p.axis(i)[k]);
        out << '\n';
    }
    const auto& v = sample.values();
    out << "values " << v.size() << '\n';
    for (double x : v) out << fmt17(x) << '\n';
}

void write_grid(const GridSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    write_grid(sample, out);
    if (!out.flush()) throw FormatError("write to '" + path + "' failed", 0);
}

std::string reports_to_json(std::vector<TheoremReport> reports) {
    sort_reports(reports);
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

void emit_report(std::vector<TheoremReport> reports, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::JSON) {
        out << reports_to_json(std::move(reports));
    } else {
        sort_reports(reports);
        write_csv(reports, out);
    }
}

void emit_report(std::vector<TheoremReport> reports, ReportFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    emit_report(std::move(reports), format, out);
    if (!out.flush()) throw FormatError("write to '" + path + "' failed", 0);
}

} // namespace hkvar
