#include "hkvar/batch.hpp"

#include "hkvar/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <tuple>

namespace hkvar {

namespace {

constexpr std::size_t kQuadrantPoints = 100;
constexpr std::size_t kDensityPoints = 200;
constexpr double kContinuityMargin = 1e-3;
constexpr std::size_t kQuadCellsPerAxis = 8;
constexpr double kFtcTol = 1e-3;
constexpr double kRigidityAtol = 1e-12;

const std::vector<std::string>& all_theorems() {
    static const std::vector<std::string> ids = {
        "fubini_series",          "ftc",           "integral_differentiation",
        "l1_mean_convergence",    "lebesgue_bv",   "lebesgue_monotone",
        "quadrant_agreement",     "zero_derivative_rigidity",
    };
    return ids;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Uniform [0, 1) from the top 53 bits; the std distributions are not
// specified bit-exactly across library implementations.
double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::vector<Point> interior_points(const Rect& rect, std::size_t count, std::mt19937_64& gen) {
    std::vector<Point> pts(count, Point(rect.dimension()));
    for (auto& p : pts)
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = rect.lo()[i] + rect.side(i) * (0.05 + 0.9 * unit_draw(gen));
    return pts;
}

GridPartition verification_grid(const Rect& rect, const VerifyConfig& cfg) {
    const std::size_t n = rect.dimension();
    std::vector<std::size_t> counts;
    if (cfg.grid.empty())
        counts.assign(n, default_cells_per_axis(n));
    else if (cfg.grid.size() == 1)
        counts.assign(n, cfg.grid[0]);
    else if (cfg.grid.size() == n)
        counts = cfg.grid;
    else
        throw DomainError("grid has " + std::to_string(cfg.grid.size()) +
                          " entries for a function of dimension " + std::to_string(n));
    return GridPartition::uniform(rect, counts);
}

// Uniform quadrature grid with the density's breakpoints inserted.
GridPartition quadrature_grid(const Rect& rect, const ZooEntry& entry) {
    auto axes = GridPartition::uniform(rect, kQuadCellsPerAxis).axes();
    for (std::size_t i = 0; i < axes.size(); ++i) {
        for (double b : entry.density_breaks)
            if (b > rect.lo()[i] && b < rect.hi()[i]) axes[i].push_back(b);
        std::sort(axes[i].begin(), axes[i].end());
        axes[i].erase(std::unique(axes[i].begin(), axes[i].end()), axes[i].end());
    }
    return GridPartition(std::move(axes));
}

HSchedule schedule_for(const Rect& rect, const VerifyConfig& cfg) {
    auto s = HSchedule::for_rect(rect);
    if (cfg.rtol) s.rtol = *cfg.rtol;
    if (cfg.atol) s.atol = *cfg.atol;
    s.validate();
    return s;
}

TheoremReport dispatch(const std::string& theorem, const ZooFunction& fn, const Rect& rect,
                       const VerifyConfig& cfg, std::mt19937_64& gen) {
    const auto& e = fn.entry;
    CheckOptions opts;
    opts.function_id = e.label;
    const auto sched = schedule_for(rect, cfg);

    if (theorem == "lebesgue_monotone")
        return check_lebesgue_monotone(fn.f, rect, verification_grid(rect, cfg), sched, opts);
    if (theorem == "lebesgue_bv")
        return check_lebesgue_bv(fn.f, rect, verification_grid(rect, cfg), sched, cfg.policy, opts);
    if (theorem == "quadrant_agreement")
        return check_quadrant_agreement(fn.f, interior_points(rect, kQuadrantPoints, gen), sched, opts);
    if (theorem == "fubini_series")
        return check_fubini_series(e.series_terms, rect, verification_grid(rect, cfg), sched,
                                   e.series_terms.size(), cfg.tol.value_or(e.fubini_tol), opts);
    if (theorem == "integral_differentiation") {
        auto pts = interior_points(rect, kDensityPoints, gen);
        if (e.discontinuity_distance)
            std::erase_if(pts, [&](const Point& p) {
                return e.discontinuity_distance(p) < kContinuityMargin;
            });
        auto rep = check_integral_differentiation(*e.density, rect, pts, sched,
                                                  quadrature_grid(rect, e),
                                                  cfg.tol.value_or(e.integral_tol), opts);
        rep.parameters["sampled_points"] = static_cast<double>(kDensityPoints);
        return rep;
    }
    if (theorem == "l1_mean_convergence")
        return check_l1_mean_convergence(*e.density, rect, {0.1, 0.05, 0.025, 0.0125},
                                         quadrature_grid(rect, e), cfg.tol.value_or(e.l1_tol), opts);
    if (theorem == "ftc")
        return check_ftc(fn.f, rect, verification_grid(rect, cfg), sched, cfg.tol.value_or(kFtcTol),
                         true, cfg.policy, opts);
    if (theorem == "zero_derivative_rigidity")
        return check_zero_derivative_rigidity(fn.f, rect, cfg.tol.value_or(kRigidityAtol), opts);
    throw std::invalid_argument("unknown theorem id: " + theorem);
}

std::vector<ZooFunction> select_functions(const VerifyConfig& cfg) {
    auto defaults = zoo_default_instances();
    if (cfg.functions.empty()) {
        // An explicit rect selects the instances of matching dimension.
        if (cfg.rect)
            std::erase_if(defaults, [&](const ZooFunction& z) {
                return z.entry.dimension != cfg.rect->dimension();
            });
        return defaults;
    }
    std::vector<ZooFunction> out;
    for (const auto& name : cfg.functions) {
        auto it = std::find_if(defaults.begin(), defaults.end(),
                               [&](const ZooFunction& z) { return z.entry.label == name; });
        out.push_back(it != defaults.end() ? *it : zoo_build(name));
    }
    return out;
}

} // namespace

std::vector<std::string> theorem_ids() { return all_theorems(); }

std::size_t default_cells_per_axis(std::size_t n) {
    if (n <= 3) return 32;
    if (n <= 5) return 8;
    return 4;
}

bool theorem_applies(const std::string& theorem, const ZooEntry& e) {
    if (theorem == "lebesgue_monotone") return e.has(ZooTag::JointlyMonotone);
    if (theorem == "lebesgue_bv" || theorem == "quadrant_agreement") return true;
    if (theorem == "fubini_series") return e.has(ZooTag::Series) && !e.series_terms.empty();
    if (theorem == "integral_differentiation" || theorem == "l1_mean_convergence")
        return e.density.has_value();
    if (theorem == "ftc") return e.has(ZooTag::AC);
    if (theorem == "zero_derivative_rigidity") return e.has(ZooTag::AdditiveSeparable);
    throw std::invalid_argument("unknown theorem id: " + theorem);
}

TheoremReport run_theorem(const std::string& theorem, const ZooFunction& fn,
                          const VerifyConfig& cfg) {
    const Rect rect = cfg.rect.value_or(fn.entry.rect);
    if (rect.dimension() != fn.entry.dimension)
        throw DomainError("rectangle dimension " + std::to_string(rect.dimension()) +
                          " does not match " + fn.entry.label + " (n=" +
                          std::to_string(fn.entry.dimension) + ")");
    std::mt19937_64 gen(cfg.seed ^ fnv1a(theorem + "|" + fn.entry.label));
    try {
        auto rep = dispatch(theorem, fn, rect, cfg, gen);
        rep.notes["seed"] = std::to_string(cfg.seed);
        return rep;
    } catch (const PreconditionError& err) {
        TheoremReport rep;
        rep.theorem = theorem;
        rep.function = fn.entry.label;
        rep.rect = rect;
        rep.lhs = std::numeric_limits<double>::quiet_NaN();
        rep.rhs = std::numeric_limits<double>::quiet_NaN();
        rep.notes["precondition"] = err.what();
        rep.finalize();
        return rep;
    }
}

std::vector<TheoremReport> run_verification(const VerifyConfig& cfg) {
    std::vector<std::string> theorems = cfg.theorems.empty() ? all_theorems() : cfg.theorems;
    for (const auto& t : theorems)
        if (std::find(all_theorems().begin(), all_theorems().end(), t) == all_theorems().end())
            throw std::invalid_argument("unknown theorem id: " + t);
    std::sort(theorems.begin(), theorems.end());
    theorems.erase(std::unique(theorems.begin(), theorems.end()), theorems.end());

    const auto functions = select_functions(cfg);
    std::vector<std::pair<const std::string*, const ZooFunction*>> tasks;
    for (const auto& t : theorems)
        for (const auto& f : functions)
            if (theorem_applies(t, f.entry)) tasks.emplace_back(&t, &f);

    std::vector<TheoremReport> reports(tasks.size());
    detail::parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        reports[i] = run_theorem(*tasks[i].first, *tasks[i].second, cfg);
    });
    std::sort(reports.begin(), reports.end(), [](const TheoremReport& a, const TheoremReport& b) {
        return std::tie(a.theorem, a.function) < std::tie(b.theorem, b.function);
    });
    reports.erase(std::unique(reports.begin(), reports.end(),
                              [](const TheoremReport& a, const TheoremReport& b) {
                                  return a.theorem == b.theorem && a.function == b.function;
                              }),
                  reports.end());
    return reports;
}

} // namespace hkvar
