#include "support.hpp"

#include <hkvar/hkvar.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>

using namespace hkvar;
using namespace hkvar::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const std::vector<TheoremReport>& batch() {
    static const std::vector<TheoremReport> reports = run_verification(VerifyConfig{});
    return reports;
}

std::vector<const TheoremReport*> reports_for(const std::string& theorem) {
    std::vector<const TheoremReport*> out;
    for (const auto& r : batch())
        if (r.theorem == theorem) out.push_back(&r);
    return out;
}

const TheoremReport* find_report(const std::string& theorem, const std::string& function) {
    for (const auto& r : batch())
        if (r.theorem == theorem && r.function == function) return &r;
    return nullptr;
}

/// Every family at n = 2 and, where the family supports it, n = 3.
std::vector<ZooFunction> members_2_3() {
    std::vector<ZooFunction> out;
    for (const auto& id : zoo_ids()) {
        for (std::size_t n : {2u, 3u}) {
            ZooParams p;
            p.n = n;
            try {
                auto z = zoo_build(id, p);
                if (z.entry.dimension == n) out.push_back(std::move(z));
            } catch (const DomainError&) {
            }
        }
    }
    return out;
}

Outcome increment_cross_oracle() {
    std::mt19937_64 gen(101);
    double worst = 0.0;
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + k % 6;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const double a = joint_increment(f, r), b = joint_increment_recursive(f, r);
        const double scale = std::max({std::abs(a), std::abs(b), 1e-3});
        const double rel = std::abs(a - b) / scale;
        worst = std::max(worst, rel);
        if (rel > 1e-10) ++bad;
    }
    return {bad == 0, "1000 pairs, worst relative difference " + fmt(worst)};
}

Outcome degenerate_rule() {
    std::mt19937_64 gen(102);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + k % 6;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        Point hi = r.hi();
        const std::size_t axis = uniform_index(gen, n);
        hi[axis] = r.lo()[axis];
        const Rect d(r.lo(), hi);
        if (joint_increment(f, d) != 0.0 || joint_increment_recursive(f, d) != 0.0) ++bad;
    }
    return {bad == 0, "100 degenerate rectangles, " + std::to_string(bad) + " nonzero"};
}

Outcome increment_additivity() {
    std::mt19937_64 gen(103);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + k % 4;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const auto part = random_partition(r, gen);
        CompensatedSum s;
        for (const Rect& c : subrects(part)) s.add(joint_increment(f, c));
        const double whole = joint_increment(f, r);
        worst = std::max(worst, std::abs(s.value() - whole) / std::max({std::abs(whole), std::abs(s.value()), 1e-3}));
    }
    return {worst <= 1e-10, "500 partitions, worst relative difference " + fmt(worst)};
}

Outcome tilde_componentwise() {
    int checked = 0, bad = 0;
    std::string failed;
    for (const auto& z : members_2_3()) {
        if (!z.entry.has(ZooTag::JointlyMonotone)) continue;
        const auto t = tilde_transform(z.f, z.entry.rect.lo());
        const auto rep = is_componentwise_monotone(t, GridPartition::uniform(z.entry.rect, 16), 1e-9);
        ++checked;
        if (!rep.passed()) {
            ++bad;
            failed += " " + z.entry.label;
        }
    }
    return {bad == 0 && checked > 0, std::to_string(checked) + " monotone members checked" +
                                         (bad ? ", failed:" + failed : "")};
}

Outcome refinement_monotonicity() {
    std::mt19937_64 gen(105);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + k % 3;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const auto p = random_partition(r, gen);
        Point x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = uniform(gen, r.lo()[i], r.hi()[i]);
        const auto q = refine(p, x);
        worst = std::max(worst, variation_on_partition(f, p) - variation_on_partition(f, q));
    }
    return {worst <= 1e-10, "500 refinement pairs, largest decrease " + fmt(std::max(worst, 0.0))};
}

Outcome variation_additivity() {
    std::mt19937_64 gen(106);
    double worst = 0.0;
    bool ok = true;
    for (const char* id : {"coordinate_product", "kink", "additive_separable"}) {
        const auto z = zoo_build(id);
        for (int k = 0; k < 5; ++k) {
            Point s(z.entry.dimension);
            for (std::size_t i = 0; i < s.size(); ++i)
                s[i] = z.entry.rect.lo()[i] + uniform(gen, 0.05, 0.95) * (z.entry.rect.hi()[i] - z.entry.rect.lo()[i]);
            const auto c = check_additivity(z.f, z.entry.rect, s, RefinePolicy{});
            const double diff = std::abs(c.whole - c.parts_sum);
            worst = std::max(worst, diff);
            if (diff > std::max(1e-8, 1e-6 * c.whole)) ok = false;
        }
    }
    return {ok, "3 members x 5 split points, worst |whole - parts| " + fmt(worst)};
}

Outcome jordan() {
    bool ok = true;
    double worst = 0.0;
    int members = 0;
    for (const auto& z : zoo_default_instances()) {
        if (z.entry.dimension > 2) continue;
        const auto grid = GridPartition::uniform(z.entry.rect, 4);
        const auto jp = jordan_decompose(z.f, z.entry.rect, grid, RefinePolicy{});
        ok = ok && is_jointly_monotone(jp.g, kMonotoneEpsilon).passed() &&
             is_jointly_monotone(jp.h, kMonotoneEpsilon).passed();
        for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
            const double e = std::abs(jp.g.values()[v] - jp.h.values()[v] - z.f(grid.vertex(v)));
            worst = std::max(worst, e);
        }
        ++members;
    }
    const auto grid = GridPartition::uniform(Rect::unit(2), 8);
    const auto jp = jordan_decompose(product_oracle(2, -1.0), Rect::unit(2), grid, RefinePolicy{});
    double truth = 0.0;
    for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
        const Point x = grid.vertex(v);
        truth = std::max({truth, std::abs(jp.g.values()[v] - x[0] * x[1]),
                          std::abs(jp.h.values()[v] - 2.0 * x[0] * x[1])});
    }
    return {ok && worst <= 1e-9 && truth <= 1e-8,
            std::to_string(members) + " members, reconstruction error " + fmt(worst) +
                ", -xy ground-truth error " + fmt(truth)};
}

Outcome all_pass(const std::string& theorem, std::size_t min_count) {
    const auto reps = reports_for(theorem);
    std::string failed;
    for (const auto* r : reps)
        if (!r->pass) failed += " " + r->function;
    return {failed.empty() && reps.size() >= min_count,
            std::to_string(reps.size()) + " reports" + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome lebesgue_monotone() {
    auto o = all_pass("lebesgue_monotone", 1);
    for (const char* id : {"cantor_product", "atom_cdf"}) {
        const auto* r = find_report("lebesgue_monotone", id);
        const bool strict = r && r->lhs <= 0.05 && std::abs(r->rhs - 1.0) <= 1e-12 && r->rhs - r->lhs >= 0.9;
        o.pass = o.pass && strict;
        o.detail += std::string(", ") + id + " lhs " + (r ? fmt(r->lhs) : "missing") + " rhs " +
                    (r ? fmt(r->rhs) : "missing");
    }
    return o;
}

Outcome lebesgue_bv() {
    auto o = all_pass("lebesgue_bv", 1);
    for (const char* id : {"kink", "power_minus_product"}) {
        const auto* r = find_report("lebesgue_bv", id);
        o.pass = o.pass && r && r->pass;
        o.detail += std::string(", ") + id + (r ? " lhs " + fmt(r->lhs) + " rhs " + fmt(r->rhs) : " missing");
    }
    return o;
}

Outcome ac_characterization() {
    int ac = 0, sing = 0, wrong = 0;
    std::string failed;
    for (const auto& z : zoo_default_instances()) {
        const auto rect = z.entry.rect;
        const auto grid = GridPartition::uniform(rect, default_cells_per_axis(z.entry.dimension));
        const auto v = classify_ac(z.f, rect, grid, HSchedule::for_rect(rect), RefinePolicy{});
        if (z.entry.has(ZooTag::AC)) {
            ++ac;
            if (v.verdict != ACClass::AbsolutelyContinuous || v.gap > 1e-3 * std::max(1.0, v.variation_lower_bound)) {
                ++wrong;
                failed += " " + z.entry.label;
            }
        } else if (z.entry.has(ZooTag::Singular)) {
            ++sing;
            if (v.verdict != ACClass::SingularPartDetected || v.gap < 0.5) {
                ++wrong;
                failed += " " + z.entry.label;
            }
        }
    }
    return {wrong == 0, std::to_string(ac) + " AC and " + std::to_string(sing) + " singular members" +
                            (wrong ? ", misclassified:" + failed : "")};
}

Outcome quadrant_agreement() {
    std::mt19937_64 gen(111);
    double worst = 0.0;
    int missing = 0;
    for (const char* id : {"power_product", "sin_product"}) {
        const auto z = zoo_build(id);
        const auto f = restrict_to(z.f, z.entry.rect);
        const auto sched = HSchedule::for_rect(z.entry.rect);
        for (int k = 0; k < 100; ++k) {
            Point x(2);
            for (std::size_t i = 0; i < 2; ++i)
                x[i] = z.entry.rect.lo()[i] + uniform(gen, 0.05, 0.95) * (z.entry.rect.hi()[i] - z.entry.rect.lo()[i]);
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& q : QuadrantSign::all(2)) {
                const auto est = joint_derivative(f, x, q, sched);
                if (!est.value) {
                    ++missing;
                    continue;
                }
                lo = std::min(lo, *est.value);
                hi = std::max(hi, *est.value);
            }
            if (lo <= hi) worst = std::max(worst, (hi - lo) / std::max(1.0, std::abs(hi)));
        }
    }
    return {missing == 0 && worst <= 1e-5,
            "200 points, worst spread " + fmt(worst) + ", non-convergent estimates " + std::to_string(missing)};
}

Outcome fubini() {
    bool ok = true;
    std::string detail;
    for (const auto& [id, tol] : {std::pair{"geometric_series", 1e-6}, std::pair{"jump_atom_series", 1e-4}}) {
        const auto* r = find_report("fubini_series", id);
        ok = ok && r && r->pass && r->lhs <= tol;
        detail += std::string(detail.empty() ? "" : ", ") + id +
                  (r ? " median " + fmt(r->lhs) + " K=" + fmt(r->parameters.at("K")) : " missing");
    }
    return {ok, detail};
}

Outcome integral_differentiation() {
    const auto* lin = find_report("integral_differentiation", "density_linear");
    const auto* ind = find_report("integral_differentiation", "density_indicator");
    const bool ok = lin && ind && lin->pass && ind->pass && lin->rhs <= 1e-4 &&
                    lin->metrics.at("within_tol_fraction") >= 0.95 && ind->rhs <= 1e-6;
    return {ok, std::string("x+y within-tol fraction ") +
                    (lin ? fmt(lin->metrics.at("within_tol_fraction")) : "missing") + ", indicator p95 error " +
                    (ind ? fmt(ind->lhs) : "missing")};
}

Outcome l1_mean_convergence() {
    const auto* r = find_report("l1_mean_convergence", "density_linear");
    if (!r) return {false, "report missing"};
    const auto& d = r->traces.at("l1_distance");
    bool ok = r->pass && d.size() == 4 && d.back() <= 0.02;
    for (std::size_t k = 1; k < d.size(); ++k) ok = ok && d[k] <= 1.1 * d[k - 1];
    std::string detail = "distances";
    for (double x : d) detail += " " + fmt(x);
    return {ok, detail};
}

Outcome ftc() {
    bool ok = true;
    std::string detail;
    for (const char* id : {"power_product", "sin_product"}) {
        const auto* r = find_report("ftc", id);
        ok = ok && r && r->pass && std::abs(r->lhs - 1.0) <= 1e-3 && std::abs(r->rhs - 1.0) <= 1e-3;
        detail += std::string(detail.empty() ? "" : ", ") + id +
                  (r ? " increment " + fmt(r->lhs) + " integral " + fmt(r->rhs) : " missing");
    }
    return {ok, detail};
}

Outcome rigidity() {
    auto o = all_pass("zero_derivative_rigidity", 2);
    for (const auto* r : reports_for("zero_derivative_rigidity")) {
        o.pass = o.pass && std::abs(r->lhs) <= 1e-12;
        o.detail += ", " + r->function + " |increment| " + fmt(std::abs(r->lhs));
    }
    return o;
}

Outcome determinism() {
    const auto first = reports_to_json(batch());
    VerifyConfig cfg;
    cfg.jobs = 2;
    const auto second = reports_to_json(run_verification(cfg));
    return {first == second, std::to_string(first.size()) + " bytes, second run with 2 jobs " +
                                 (first == second ? "identical" : "differs")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"increment cross-oracle", increment_cross_oracle},
        {"degenerate rectangles", degenerate_rule},
        {"increment additivity", increment_additivity},
        {"tilde transform componentwise monotone", tilde_componentwise},
        {"refinement monotonicity", refinement_monotonicity},
        {"variation additivity", variation_additivity},
        {"jordan decomposition", jordan},
        {"lebesgue inequality, monotone", lebesgue_monotone},
        {"lebesgue inequality, BV", lebesgue_bv},
        {"absolute continuity classification", ac_characterization},
        {"quadrant agreement", quadrant_agreement},
        {"fubini series", fubini},
        {"integral differentiation", integral_differentiation},
        {"L1 mean convergence", l1_mean_convergence},
        {"fundamental theorem of calculus", ftc},
        {"zero-derivative rigidity", rigidity},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
