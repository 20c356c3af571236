#include "cli.hpp"

#include <hkvar/hkvar.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

namespace hkvar::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double parse_double(const std::string& text, const std::string& flag) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || !std::isfinite(v))
        throw UsageError(flag + ": invalid number '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(parse_double(p, flag));
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

Rect parse_rect(const std::string& s) {
    const auto halves = split(s, ':');
    if (halves.size() != 2) throw UsageError("--rect: expected lo1,...,lon:hi1,...,hin, got '" + s + "'");
    auto lo = parse_list(halves[0], "--rect");
    auto hi = parse_list(halves[1], "--rect");
    if (lo.size() != hi.size()) throw UsageError("--rect: corner lists differ in length");
    try {
        return Rect(std::move(lo), std::move(hi));
    } catch (const DomainError& e) {
        throw UsageError(std::string("--rect: ") + e.what());
    }
}

std::vector<std::size_t> parse_counts(const std::string& s, const std::string& flag) {
    std::vector<std::size_t> out;
    for (const auto& p : split(s, ',')) {
        std::size_t v = 0;
        const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
        if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size() || v == 0)
            throw UsageError(flag + ": invalid positive count '" + p + "'");
        out.push_back(v);
    }
    return out;
}

QuadrantSign parse_quadrant(const std::string& s, std::size_t n) {
    std::vector<int> dirs;
    for (const auto& p : split(s, ',')) {
        if (p == "+" || p == "1" || p == "+1") dirs.push_back(1);
        else if (p == "-" || p == "-1") dirs.push_back(-1);
        else throw UsageError("--quadrant: expected + or - entries, got '" + p + "'");
    }
    if (dirs.size() == 1 && n > 1) dirs.assign(n, dirs[0]);
    if (dirs.size() != n)
        throw UsageError("--quadrant: expected " + std::to_string(n) + " entries");
    return QuadrantSign(std::move(dirs));
}

struct Globals {
    std::string rect;
    std::string grid;
    std::optional<double> tol;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<int> max_refine;
    std::optional<std::size_t> cell_budget;
    std::string format;
    std::string out;
    std::uint64_t seed = 0;
    std::optional<unsigned> jobs;
};

struct SourceOpts {
    std::string function;
    std::string grid_file;
    std::string interp = "vertex";
    std::size_t dim = 0;
    int depth = 20;
    std::vector<std::string> atoms;
    std::size_t terms = 0;
};

struct ScheduleOpts {
    std::optional<double> h0;
    std::optional<double> ratio;
    std::optional<int> max_steps;
    std::optional<int> window;
};

struct PolicyOpts {
    std::string mode = "uniform";
    std::optional<double> stall_rtol;
};

void add_source_options(CLI::App* cmd, SourceOpts& s) {
    cmd->add_option("--function", s.function, "Zoo function id (see 'zoo list')");
    cmd->add_option("--grid-file", s.grid_file, "Tabulated function in hkgrid format");
    cmd->add_option("--interp", s.interp, "Off-vertex policy for grid files")
        ->check(CLI::IsMember({"vertex", "nearest", "multilinear"}));
    cmd->add_option("--dim", s.dim, "Dimension for zoo families that accept one");
    cmd->add_option("--depth", s.depth, "Ternary depth of the Cantor function");
    cmd->add_option("--atom", s.atoms, "Atom x1,...,xn:mass for atom_cdf (repeatable)");
    cmd->add_option("--terms", s.terms, "Series terms (0 applies the tail-bound rule)");
}

void add_schedule_options(CLI::App* cmd, ScheduleOpts& s) {
    cmd->add_option("--h0", s.h0, "Initial step");
    cmd->add_option("--ratio", s.ratio, "Step decay ratio in (0, 1)");
    cmd->add_option("--max-steps", s.max_steps, "Schedule length");
    cmd->add_option("--window", s.window, "Consecutive agreeing quotients required");
}

void add_policy_options(CLI::App* cmd, PolicyOpts& p) {
    cmd->add_option("--mode", p.mode, "Refinement mode")->check(CLI::IsMember({"uniform", "adaptive"}));
    cmd->add_option("--stall-rtol", p.stall_rtol, "Relative gain treated as a stall");
}

struct Source {
    FuncSource f;
    std::optional<Rect> natural_rect;
    std::string id;
};

Source make_source(const SourceOpts& s) {
    if (s.function.empty() == s.grid_file.empty())
        throw UsageError("exactly one of --function or --grid-file is required");
    if (!s.grid_file.empty()) {
        const auto policy = s.interp == "nearest"       ? Interpolation::Nearest
                            : s.interp == "multilinear" ? Interpolation::Multilinear
                                                        : Interpolation::VertexOnly;
        auto sample = read_grid(s.grid_file);
        const Rect r = sample.partition().rect();
        return {FuncSource::sampled(std::move(sample), policy), r, s.grid_file};
    }
    ZooParams p;
    p.n = s.dim;
    p.depth = s.depth;
    p.terms = s.terms;
    for (const auto& a : s.atoms) {
        const auto parts = split(a, ':');
        if (parts.size() != 2) throw UsageError("--atom: expected x1,...,xn:mass, got '" + a + "'");
        p.atoms.push_back({parse_list(parts[0], "--atom"), parse_double(parts[1], "--atom")});
    }
    try {
        auto z = zoo_build(s.function, p);
        return {z.f, z.entry.rect, z.entry.label};
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--function: ") + e.what());
    }
}

Rect resolve_rect(const Globals& g, const Source& src) {
    if (!g.rect.empty()) {
        Rect r = parse_rect(g.rect);
        if (r.dimension() != src.f.dimension())
            throw UsageError("--rect has dimension " + std::to_string(r.dimension()) +
                             " but the function has dimension " + std::to_string(src.f.dimension()));
        return r;
    }
    if (src.natural_rect) return *src.natural_rect;
    throw UsageError("--rect is required");
}

GridPartition resolve_grid(const Globals& g, const Rect& rect, std::size_t fallback) {
    if (g.grid.empty()) return GridPartition::uniform(rect, fallback);
    auto counts = parse_counts(g.grid, "--grid");
    if (counts.size() == 1) counts.assign(rect.dimension(), counts[0]);
    if (counts.size() != rect.dimension())
        throw UsageError("--grid: expected " + std::to_string(rect.dimension()) + " counts");
    return GridPartition::uniform(rect, counts);
}

HSchedule resolve_schedule(const Globals& g, const ScheduleOpts& s, const Rect& rect) {
    auto h = HSchedule::for_rect(rect);
    if (s.h0) h.h0 = *s.h0;
    if (s.ratio) h.ratio = *s.ratio;
    if (s.max_steps) h.max_steps = *s.max_steps;
    if (s.window) h.window = *s.window;
    if (g.rtol) h.rtol = *g.rtol;
    if (g.atol) h.atol = *g.atol;
    h.validate();
    return h;
}

RefinePolicy resolve_policy(const Globals& g, const PolicyOpts& p, std::size_t n) {
    RefinePolicy pol;
    pol.mode = p.mode == "adaptive" ? RefineMode::AdaptiveWorstCell : RefineMode::UniformBisect;
    if (g.max_refine) pol.max_rounds = *g.max_refine;
    if (g.cell_budget) pol.cell_budget = *g.cell_budget;
    if (p.stall_rtol) pol.stall_rtol = *p.stall_rtol;
    pol.validate(n);
    return pol;
}

unsigned resolve_jobs(const Globals& g) {
    if (g.jobs) return std::max(1u, *g.jobs);
    if (const char* env = std::getenv("HKVAR_JOBS")) {
        unsigned v = 0;
        const std::string s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0) return v;
        throw UsageError("HKVAR_JOBS: invalid job count '" + s + "'");
    }
    return 1;
}

std::string output_format(const Globals& g, const std::string& fallback,
                          std::initializer_list<const char*> allowed) {
    const std::string f = g.format.empty() ? fallback : g.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw UsageError("--format '" + f + "' is not supported by this command");
}

// Writes text to --out when given, else to out.
void deliver(const Globals& g, const std::string& text, std::ostream& out) {
    if (g.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(g.out);
    if (!file || !(file << text) || !file.flush())
        throw FormatError("cannot write '" + g.out + "'", 0);
}

json rect_json(const Rect& r) { return {{"lo", r.lo()}, {"hi", r.hi()}}; }

std::string to_string(VariationStop s) {
    switch (s) {
    case VariationStop::Converged: return "Converged";
    case VariationStop::BudgetExhausted: return "BudgetExhausted";
    case VariationStop::RoundLimit: return "RoundLimit";
    }
    return "?";
}

std::string to_string(ACClass c) {
    switch (c) {
    case ACClass::AbsolutelyContinuous: return "AbsolutelyContinuous";
    case ACClass::SingularPartDetected: return "SingularPartDetected";
    case ACClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

json monotonicity_json(const MonotonicityReport& m) {
    json j;
    j["verdict"] = m.passed() ? "Pass" : "Fail";
    j["tolerance"] = num(m.tolerance);
    j["cells_checked"] = m.cells_checked;
    j["violations"] = m.violations;
    if (m.witness)
        j["witness"] = {{"cell", rect_json(m.witness->cell)}, {"increment", num(m.witness->increment)}};
    else
        j["witness"] = nullptr;
    return j;
}

std::string monotonicity_text(const std::string& name, const MonotonicityReport& m) {
    std::ostringstream os;
    os << name << ": " << (m.passed() ? "Pass" : "Fail") << " (" << m.cells_checked
       << " checked, " << m.violations << " violations, tol " << fmt(m.tolerance) << ")\n";
    if (m.witness)
        os << "  witness: [" << format_point(m.witness->cell.lo()) << ", "
           << format_point(m.witness->cell.hi()) << "] increment " << fmt(m.witness->increment)
           << '\n';
    return os.str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hardy-Krause variation and joint-derivative toolkit", "hkvar"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--rect", g.rect, "Rectangle lo1,...,lon:hi1,...,hin");
    app.add_option("--grid", g.grid, "Cells per axis k1,...,kn (one value broadcasts)");
    app.add_option("--tol", g.tol, "Check or classification tolerance");
    app.add_option("--rtol", g.rtol, "Derivative relative tolerance");
    app.add_option("--atol", g.atol, "Derivative absolute tolerance");
    app.add_option("--max-refine", g.max_refine, "Maximum refinement rounds");
    app.add_option("--cell-budget", g.cell_budget, "Maximum cells per partition");
    app.add_option("--format", g.format, "Output format: text, json or csv");
    app.add_option("--out", g.out, "Write output to this path");
    app.add_option("--seed", g.seed, "Seed for randomized point sets");
    app.add_option("--jobs", g.jobs, "Worker threads (default: HKVAR_JOBS or 1)");

    SourceOpts src_inc, src_der, src_var, src_dec, src_cls;
    ScheduleOpts sch_der, sch_cls;
    PolicyOpts pol_var, pol_dec, pol_cls;

    auto* inc = app.add_subcommand("increment", "Joint increment over --rect");
    add_source_options(inc, src_inc);
    bool recursive = false;
    inc->add_flag("--recursive", recursive, "Use the recursive definition");

    auto* der = app.add_subcommand("derivative", "Quadrant joint derivative at a point");
    add_source_options(der, src_der);
    add_schedule_options(der, sch_der);
    std::string point_text, quadrant_text = "+";
    der->add_option("--point", point_text, "Point x1,...,xn")->required();
    der->add_option("--quadrant", quadrant_text, "Directions, e.g. +,- (one value broadcasts)");

    auto* var = app.add_subcommand("variation", "Certified lower bound on the total variation");
    add_source_options(var, src_var);
    add_policy_options(var, pol_var);

    auto* dec = app.add_subcommand("decompose", "Jordan decomposition f = g - h on a grid");
    add_source_options(dec, src_dec);
    add_policy_options(dec, pol_dec);
    std::string g_path, h_path;
    dec->add_option("--out-g", g_path, "Grid file for g")->required();
    dec->add_option("--out-h", h_path, "Grid file for h")->required();

    auto* cls = app.add_subcommand("classify", "Monotonicity and absolute-continuity verdicts");
    add_source_options(cls, src_cls);
    add_schedule_options(cls, sch_cls);
    add_policy_options(cls, pol_cls);
    std::string what = "all";
    cls->add_option("--what", what, "monotone, componentwise, ac or all")
        ->check(CLI::IsMember({"monotone", "componentwise", "ac", "all"}));

    auto* ver = app.add_subcommand("verify", "Run theorem checks on zoo functions");
    std::vector<std::string> theorems, functions;
    ver->add_option("--theorem", theorems, "Theorem id (repeatable; default all)")->delimiter(',');
    ver->add_option("--function", functions, "Zoo id or instance label (repeatable; default all)")
        ->delimiter(',');

    auto* zoo = app.add_subcommand("zoo", "Built-in function families");
    zoo->require_subcommand(1);
    auto* zoo_list = zoo->add_subcommand("list", "List zoo families");

    for (auto* sub : {inc, der, var, dec, cls, ver, zoo, zoo_list}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (*inc) {
            const auto src = make_source(src_inc);
            const Rect rect = resolve_rect(g, src);
            const double d = recursive ? joint_increment_recursive(src.f, rect) : joint_increment(src.f, rect);
            const auto f = output_format(g, "text", {"text", "json"});
            if (f == "json")
                deliver(g, json{{"function", src.id}, {"rect", rect_json(rect)}, {"increment", num(d)}}.dump(2) + "\n", out);
            else
                deliver(g, fmt(d) + "\n", out);
            return kAllPass;
        }
        if (*der) {
            const auto src = make_source(src_der);
            const Point x = parse_list(point_text, "--point");
            if (x.size() != src.f.dimension())
                throw UsageError("--point: expected " + std::to_string(src.f.dimension()) + " coordinates");
            const Rect rect = resolve_rect(g, src);
            const auto sched = resolve_schedule(g, sch_der, rect);
            const auto q = parse_quadrant(quadrant_text, x.size());
            const auto est = joint_derivative(restrict_to(src.f, rect), x, q, sched);
            const auto f = output_format(g, "text", {"text", "json"});
            if (f == "json") {
                json trace = json::array();
                for (const auto& s : est.trace) trace.push_back({{"h", num(s.h)}, {"quotient", num(s.quotient)}});
                deliver(g, json{{"function", src.id},
                                {"point", x},
                                {"quadrant", q.dirs()},
                                {"value", est.value ? num(*est.value) : json(nullptr)},
                                {"converged", est.converged()},
                                {"extrapolated", est.extrapolated},
                                {"dini_upper", num(est.dini_upper)},
                                {"dini_lower", num(est.dini_lower)},
                                {"trace", trace}}
                                   .dump(2) + "\n",
                        out);
            } else {
                std::ostringstream os;
                os << "value: " << (est.value ? fmt(*est.value) : "nonconvergent") << '\n'
                   << "dini_upper: " << fmt(est.dini_upper) << '\n'
                   << "dini_lower: " << fmt(est.dini_lower) << '\n'
                   << "steps: " << est.trace.size() << '\n';
                deliver(g, os.str(), out);
            }
            return kAllPass;
        }
        if (*var) {
            const auto src = make_source(src_var);
            const Rect rect = resolve_rect(g, src);
            const auto res = total_variation(src.f, rect, resolve_policy(g, pol_var, rect.dimension()));
            const auto f = output_format(g, "text", {"text", "json"});
            if (f == "json") {
                json trace = json::array();
                for (const auto& r : res.trace)
                    trace.push_back({{"cells", r.cells}, {"sum", num(r.sum)}, {"raw_sum", num(r.raw_sum)}});
                deliver(g, json{{"function", src.id},
                                {"rect", rect_json(rect)},
                                {"lower_bound", num(res.lower_bound)},
                                {"stopped", to_string(res.stopped)},
                                {"exact", res.exact},
                                {"trace", trace}}
                                   .dump(2) + "\n",
                        out);
            } else {
                std::ostringstream os;
                os << "lower_bound: " << fmt(res.lower_bound) << '\n'
                   << "stopped: " << to_string(res.stopped) << '\n'
                   << "exact: " << (res.exact ? "true" : "false") << '\n'
                   << "rounds:\n";
                for (std::size_t k = 0; k < res.trace.size(); ++k)
                    os << "  " << k + 1 << " cells=" << res.trace[k].cells << " sum=" << fmt(res.trace[k].sum)
                       << " raw=" << fmt(res.trace[k].raw_sum) << '\n';
                deliver(g, os.str(), out);
            }
            return kAllPass;
        }
        if (*dec) {
            const auto src = make_source(src_dec);
            const Rect rect = resolve_rect(g, src);
            const auto grid = src.f.is_sampled() && g.grid.empty() ? src.f.sample()->partition()
                                                                   : resolve_grid(g, rect, 16);
            const auto pair = jordan_decompose(src.f, rect, grid, resolve_policy(g, pol_dec, rect.dimension()));
            write_grid(pair.g, g_path);
            write_grid(pair.h, h_path);
            std::ostringstream os;
            os << "g: " << g_path << '\n'
               << "h: " << h_path << '\n'
               << "unconverged_cells: " << pair.unconverged_cells << '\n';
            out << os.str();
            return kAllPass;
        }
        if (*cls) {
            const auto src = make_source(src_cls);
            const Rect rect = resolve_rect(g, src);
            const auto grid = resolve_grid(g, rect, 16);
            const double mono_tol = g.tol.value_or(kMonotoneEpsilon);
            const auto f = output_format(g, "text", {"text", "json"});
            json j;
            j["function"] = src.id;
            j["rect"] = rect_json(rect);
            std::string text;
            const FuncSource on_rect = restrict_to(src.f, rect);
            if (what == "monotone" || what == "all") {
                const auto m = is_jointly_monotone(on_rect, grid, mono_tol);
                j["jointly_monotone"] = monotonicity_json(m);
                text += monotonicity_text("jointly_monotone", m);
            }
            if (what == "componentwise" || what == "all") {
                const auto m = is_componentwise_monotone(on_rect, grid, mono_tol);
                j["componentwise_monotone"] = monotonicity_json(m);
                text += monotonicity_text("componentwise_monotone", m);
            }
            if (what == "ac" || what == "all") {
                const auto ac_grid = resolve_grid(g, rect, default_cells_per_axis(rect.dimension()));
                const auto v = classify_ac(on_rect, rect, ac_grid, resolve_schedule(g, sch_cls, rect),
                                           resolve_policy(g, pol_cls, rect.dimension()),
                                           g.tol.value_or(kDefaultACTolerance), resolve_jobs(g));
                j["absolute_continuity"] = {{"verdict", to_string(v.verdict)},
                                            {"integral_of_abs_derivative", num(v.integral_of_abs_derivative)},
                                            {"variation_lower_bound", num(v.variation_lower_bound)},
                                            {"gap", num(v.gap)},
                                            {"tolerance", num(v.tolerance)},
                                            {"nonconvergent_cells", v.nonconvergent_cells},
                                            {"variation_stop", to_string(v.variation_stop)}};
                text += "absolute_continuity: " + to_string(v.verdict) + " (gap " + fmt(v.gap) +
                        ", integral " + fmt(v.integral_of_abs_derivative) + ", variation " +
                        fmt(v.variation_lower_bound) + ")\n";
            }
            deliver(g, f == "json" ? j.dump(2) + "\n" : text, out);
            return kAllPass;
        }
        if (*ver) {
            VerifyConfig cfg;
            cfg.theorems = theorems;
            cfg.functions = functions;
            cfg.seed = g.seed;
            cfg.jobs = resolve_jobs(g);
            if (!g.grid.empty()) cfg.grid = parse_counts(g.grid, "--grid");
            if (!g.rect.empty()) cfg.rect = parse_rect(g.rect);
            cfg.tol = g.tol;
            cfg.rtol = g.rtol;
            cfg.atol = g.atol;
            if (g.max_refine) cfg.policy.max_rounds = *g.max_refine;
            if (g.cell_budget) cfg.policy.cell_budget = *g.cell_budget;
            const auto f = output_format(g, "json", {"json", "csv"});
            std::vector<TheoremReport> reports;
            try {
                reports = run_verification(cfg);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            if (reports.empty()) throw UsageError("no applicable (theorem, function) pairs selected");
            std::ostringstream os;
            emit_report(reports, f == "csv" ? ReportFormat::CSV : ReportFormat::JSON, os);
            deliver(g, os.str(), out);
            const bool all_pass =
                std::all_of(reports.begin(), reports.end(), [](const TheoremReport& r) { return r.pass; });
            return all_pass ? kAllPass : kCheckFailed;
        }
        if (*zoo_list) {
            const auto f = output_format(g, "text", {"text", "json"});
            json arr = json::array();
            std::ostringstream os;
            for (const auto& id : zoo_ids()) {
                const auto z = zoo_build(id);
                std::vector<std::string> tags;
                for (auto t : {ZooTag::JointlyMonotone, ZooTag::AC, ZooTag::Singular,
                               ZooTag::AdditiveSeparable, ZooTag::Series})
                    if (z.entry.has(t)) tags.push_back(hkvar::to_string(t));
                json e{{"id", id},
                       {"dimension", z.entry.dimension},
                       {"tags", tags},
                       {"rect", rect_json(z.entry.rect)},
                       {"known_increment", z.entry.known_increment ? num(*z.entry.known_increment) : json(nullptr)},
                       {"known_variation", z.entry.known_variation ? num(*z.entry.known_variation) : json(nullptr)},
                       {"description", z.entry.description}};
                arr.push_back(e);
                os << id << "  n=" << z.entry.dimension << "  [";
                for (std::size_t i = 0; i < tags.size(); ++i) os << (i ? "," : "") << tags[i];
                os << "]  " << z.entry.description << '\n';
            }
            deliver(g, f == "json" ? arr.dump(2) + "\n" : os.str(), out);
            return kAllPass;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    err << app.help();
    return kUsageError;
}

} // namespace hkvar::cli
