#include "hkvar/verify.hpp"

#include "hkvar/error.hpp"
#include "hkvar/increment.hpp"
#include "hkvar/summation.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace hkvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 5-point Gauss-Legendre on [-1, 1]; exact through degree 9.
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

using Interval = std::pair<double, double>;

// Pieces of [lo, hi] cut at the breakpoints strictly inside it.
std::vector<Interval> split_interval(double lo, double hi, const std::vector<double>& breaks) {
    std::vector<Interval> out;
    double start = lo;
    for (double b : breaks) {
        if (b > lo && b < hi) {
            out.emplace_back(start, b);
            start = b;
        }
    }
    out.emplace_back(start, hi);
    return out;
}

// Tensor Gauss-Legendre over the product of per-axis interval lists.
double integrate_pieces(const FuncSource& density, const std::vector<std::vector<Interval>>& pieces) {
    const std::size_t n = pieces.size();
    CompensatedSum total;
    std::vector<std::size_t> piece(n, 0);
    std::array<double, kMaxDimension> x{};
    for (;;) {
        double jac = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [a, b] = pieces[i][piece[i]];
            jac *= 0.5 * (b - a);
        }
        std::vector<std::size_t> node(n, 0);
        for (;;) {
            double w = jac;
            for (std::size_t i = 0; i < n; ++i) {
                const auto [a, b] = pieces[i][piece[i]];
                x[i] = 0.5 * (a + b) + 0.5 * (b - a) * kGaussNodes[node[i]];
                w *= kGaussWeights[node[i]];
            }
            const double v = density(std::span<const double>(x.data(), n));
            if (!std::isfinite(v))
                throw EvaluationError("non-finite density value during quadrature",
                                      Point(x.begin(), x.begin() + n));
            total.add(w * v);
            std::size_t i = n;
            while (i-- > 0) {
                if (++node[i] < kGaussNodes.size()) break;
                node[i] = 0;
            }
            if (i == static_cast<std::size_t>(-1)) break;
        }
        std::size_t i = n;
        while (i-- > 0) {
            if (++piece[i] < pieces[i].size()) break;
            piece[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    return total.value();
}

double percentile95(std::vector<double> xs) {
    if (xs.empty()) return kInf;
    std::sort(xs.begin(), xs.end());
    const auto m = xs.size();
    const auto k = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(m)));
    return xs[std::max<std::size_t>(k, 1) - 1];
}

double median(std::vector<double> xs) {
    if (xs.empty()) return kInf;
    std::sort(xs.begin(), xs.end());
    const auto m = xs.size();
    return m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

TheoremReport make_report(std::string theorem, const CheckOptions& opts) {
    TheoremReport r;
    r.theorem = std::move(theorem);
    r.function = opts.function_id;
    return r;
}

void record_grid(TheoremReport& r, const GridPartition& grid) { r.grid = grid.cells_per_axis(); }

std::string witness_text(const MonotonicityReport& m) {
    std::ostringstream os;
    os.precision(17);
    if (m.witness)
        os << "cell [" << format_point(m.witness->cell.lo()) << ", "
           << format_point(m.witness->cell.hi()) << "] has increment " << m.witness->increment;
    return os.str();
}

// Distance from [lo, hi] to 0: a conservative |D| for a bracket.
double bracket_abs_lower(double lo, double hi) {
    if (lo > 0.0) return lo;
    if (hi < 0.0) return -hi;
    return 0.0;
}

// Joint derivatives at the 2^n two-point Gauss nodes of each grid cell.
struct NodeField {
    std::vector<double> weight;
    std::vector<std::optional<double>> value;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> tolerance;
    std::size_t nonconvergent = 0;
};

NodeField gauss_derivative_field(const FuncSource& f, const GridPartition& grid,
                                 const HSchedule& sched, unsigned jobs) {
    const std::size_t n = grid.dimension();
    const std::size_t per_cell = std::size_t{1} << n;
    const std::size_t total = grid.cell_count() * per_cell;
    const double offset = 0.5 / std::sqrt(3.0);
    const auto quadrant = QuadrantSign::positive(n);
    NodeField out;
    out.weight.resize(total);
    out.value.resize(total);
    out.lower.resize(total);
    out.upper.resize(total);
    out.tolerance.resize(total);
    detail::parallel_for(total, jobs, [&](std::size_t k) {
        const Rect cell = grid.cell(k >> n);
        const std::size_t bits = k & (per_cell - 1);
        Point x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = cell.lo()[i] + cell.side(i) * (0.5 + (((bits >> i) & 1u) ? offset : -offset));
        const auto est = joint_derivative(f, x, quadrant, sched);
        out.weight[k] = cell.volume() / static_cast<double>(per_cell);
        out.value[k] = est.value;
        out.lower[k] = est.dini_lower;
        out.upper[k] = est.dini_upper;
        out.tolerance[k] = est.tolerance;
    });
    out.nonconvergent = static_cast<std::size_t>(
        std::count_if(out.value.begin(), out.value.end(), [](const auto& v) { return !v; }));
    return out;
}

} // namespace

std::string to_string(Relation r) { return r == Relation::LE ? "LE" : "EQ"; }

bool relation_holds(double lhs, double rhs, Relation rel, double slack) noexcept {
    if (rel == Relation::LE) return lhs <= rhs + slack;
    return std::abs(lhs - rhs) <= slack;
}

bool TheoremReport::recompute_pass() const noexcept {
    bool ok = relation_holds(lhs, rhs, relation, slack);
    for (const auto& c : side_conditions)
        ok = ok && c.pass && relation_holds(c.lhs, c.rhs, c.relation, c.slack);
    return ok;
}

void TheoremReport::add_side_condition(std::string name, double l, double r, Relation rel,
                                       double s) {
    side_conditions.push_back({std::move(name), l, r, rel, s, relation_holds(l, r, rel, s)});
}

void TheoremReport::finalize() { pass = recompute_pass(); }

TheoremReport check_lebesgue_monotone(const FuncSource& f, const Rect& rect,
                                      const GridPartition& grid, const HSchedule& sched,
                                      const CheckOptions& opts) {
    if (grid.rect() != rect) throw DomainError("verification grid must span the rectangle");
    const auto mono = is_jointly_monotone(f, grid, opts.monotone_tol);
    if (!mono.passed())
        throw PreconditionError("function is not jointly monotone on the grid: " +
                                witness_text(mono));

    auto rep = make_report("lebesgue_monotone", opts);
    rep.rect = rect;
    record_grid(rep, grid);
    rep.schedule = sched;

    const auto field = gauss_derivative_field(restrict_to(f, rect), grid, sched, opts.jobs);
    CompensatedSum integral;
    // Largest amount by which a converged node lies below zero beyond its
    // own estimation tolerance.
    double worst_negative = 0.0;
    for (std::size_t k = 0; k < field.value.size(); ++k) {
        if (field.value[k]) {
            integral.add(*field.value[k] * field.weight[k]);
            worst_negative = std::max(worst_negative, -*field.value[k] - field.tolerance[k]);
        } else {
            integral.add(field.lower[k] * field.weight[k]);
        }
    }
    rep.lhs = integral.value();
    rep.rhs = joint_increment(f, rect);
    rep.relation = Relation::LE;
    rep.slack = 1e-6 * std::max(1.0, std::abs(rep.rhs));
    rep.add_side_condition("derivative_nonnegative", worst_negative, 0.0, Relation::LE, sched.atol);
    rep.metrics["cells"] = static_cast<double>(grid.cell_count());
    rep.metrics["quadrature_nodes"] = static_cast<double>(field.value.size());
    rep.metrics["nonconvergent_nodes"] = static_cast<double>(field.nonconvergent);
    rep.metrics["gap"] = rep.rhs - rep.lhs;
    rep.finalize();
    return rep;
}

TheoremReport check_lebesgue_bv(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                                const HSchedule& sched, const RefinePolicy& policy,
                                const CheckOptions& opts) {
    if (grid.rect() != rect) throw DomainError("verification grid must span the rectangle");
    const auto var = total_variation(f, rect, policy);
    if (var.stopped != VariationStop::Converged)
        throw PreconditionError("variation refinement did not converge (" +
                                std::string(var.stopped == VariationStop::BudgetExhausted
                                                ? "cell budget exhausted"
                                                : "round limit reached") +
                                ")");

    auto rep = make_report("lebesgue_bv", opts);
    rep.rect = rect;
    record_grid(rep, grid);
    rep.schedule = sched;
    rep.parameters["stall_rtol"] = policy.stall_rtol;
    rep.parameters["max_rounds"] = policy.max_rounds;
    rep.parameters["cell_budget"] = static_cast<double>(policy.cell_budget);

    const auto field = gauss_derivative_field(restrict_to(f, rect), grid, sched, opts.jobs);
    CompensatedSum integral;
    for (std::size_t k = 0; k < field.value.size(); ++k)
        integral.add(field.weight[k] * (field.value[k] ? std::abs(*field.value[k])
                                                       : bracket_abs_lower(field.lower[k], field.upper[k])));
    rep.lhs = integral.value();
    rep.rhs = var.lower_bound;
    rep.relation = Relation::LE;
    rep.slack = 1e-6 * std::max(1.0, rep.rhs);
    rep.metrics["cells"] = static_cast<double>(grid.cell_count());
    rep.metrics["quadrature_nodes"] = static_cast<double>(field.value.size());
    rep.metrics["nonconvergent_nodes"] = static_cast<double>(field.nonconvergent);
    rep.metrics["variation_rounds"] = static_cast<double>(var.trace.size());
    rep.metrics["gap"] = rep.rhs - rep.lhs;
    std::vector<double> sums;
    for (const auto& r : var.trace) sums.push_back(r.sum);
    rep.traces["variation_sums"] = std::move(sums);
    rep.notes["variation_bound"] = var.exact ? "exact (sampled source)" : "certified lower bound";
    rep.finalize();
    return rep;
}

TheoremReport check_quadrant_agreement(const FuncSource& f, const std::vector<Point>& points,
                                       const HSchedule& sched, const CheckOptions& opts) {
    auto rep = make_report("quadrant_agreement", opts);
    rep.schedule = sched;
    rep.parameters["points"] = static_cast<double>(points.size());
    const auto quadrants = QuadrantSign::all(f.dimension());

    std::vector<std::optional<double>> spread(points.size());
    detail::parallel_for(points.size(), opts.jobs, [&](std::size_t p) {
        double lo = kInf, hi = -kInf;
        for (const auto& q : quadrants) {
            const auto est = joint_derivative(f, points[p], q, sched);
            if (!est.value) return;
            lo = std::min(lo, *est.value);
            hi = std::max(hi, *est.value);
        }
        spread[p] = (hi - lo) / std::max({1.0, std::abs(lo), std::abs(hi)});
    });

    std::vector<double> convergent;
    for (const auto& s : spread)
        if (s) convergent.push_back(*s);
    rep.lhs = percentile95(convergent);
    rep.rhs = 10.0 * sched.rtol;
    rep.relation = Relation::LE;
    rep.slack = 0.0;
    rep.metrics["convergent_points"] = static_cast<double>(convergent.size());
    rep.metrics["max_spread"] = convergent.empty() ? kInf : *std::max_element(convergent.begin(), convergent.end());
    rep.finalize();
    return rep;
}

TheoremReport check_fubini_series(const std::vector<FuncSource>& terms, const Rect& rect,
                                  const GridPartition& grid, const HSchedule& sched, std::size_t K,
                                  double tol, const CheckOptions& opts) {
    if (K == 0 || K > terms.size()) throw DomainError("series truncation K out of range");
    if (grid.rect() != rect) throw DomainError("verification grid must span the rectangle");
    const std::size_t n = rect.dimension();
    for (std::size_t i = 0; i < K; ++i) {
        const auto mono = is_jointly_monotone(terms[i], grid, opts.monotone_tol);
        if (!mono.passed())
            throw PreconditionError("series term " + std::to_string(i + 1) +
                                    " is not jointly monotone: " + witness_text(mono));
    }
    std::vector<FuncSource> used(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(K));
    const auto partial = FuncSource::oracle(n, [used](std::span<const double> x) {
        CompensatedSum s;
        for (const auto& t : used) s.add(t(x));
        return s.value();
    });

    auto rep = make_report("fubini_series", opts);
    rep.rect = rect;
    record_grid(rep, grid);
    rep.schedule = sched;
    rep.parameters["K"] = static_cast<double>(K);
    rep.parameters["tol"] = tol;

    const auto q = QuadrantSign::positive(n);
    const auto sum_field = derivative_field(restrict_to(partial, rect), grid, q, sched, opts.jobs);
    std::vector<DerivativeField> term_fields;
    for (const auto& t : used) term_fields.push_back(derivative_field(restrict_to(t, rect), grid, q, sched, opts.jobs));

    std::vector<double> disc(grid.cell_count(), kInf);
    std::size_t excluded = 0;
    for (std::size_t c = 0; c < disc.size(); ++c) {
        bool ok = sum_field.values[c].has_value();
        CompensatedSum s;
        for (const auto& tf : term_fields) {
            ok = ok && tf.values[c].has_value();
            if (ok) s.add(*tf.values[c]);
        }
        if (ok)
            disc[c] = std::abs(*sum_field.values[c] - s.value());
        else
            ++excluded;
    }
    rep.lhs = median(disc);
    rep.rhs = tol;
    rep.relation = Relation::LE;
    rep.slack = 0.0;
    rep.add_side_condition("p95_within_10tol", percentile95(disc), 10.0 * tol, Relation::LE, 0.0);
    rep.metrics["nonconvergent_cells"] = static_cast<double>(excluded);
    rep.metrics["cells"] = static_cast<double>(disc.size());
    rep.finalize();
    return rep;
}

FuncSource antiderivative(const FuncSource& density, const Rect& rect, const GridPartition& quad_grid) {
    if (quad_grid.rect() != rect) throw DomainError("quadrature grid must span the rectangle");
    const std::size_t n = rect.dimension();
    return FuncSource::oracle(n, [density, rect, quad_grid](std::span<const double> x) {
        std::vector<std::vector<Interval>> pieces(x.size());
        double sign = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = rect.lo()[i];
            if (x[i] == a) return 0.0;
            if (x[i] > a) {
                pieces[i] = split_interval(a, x[i], quad_grid.axis(i));
            } else {
                pieces[i] = split_interval(x[i], a, quad_grid.axis(i));
                sign = -sign;
            }
        }
        return sign * integrate_pieces(density, pieces);
    });
}

TheoremReport check_integral_differentiation(const FuncSource& density, const Rect& rect,
                                             const std::vector<Point>& points,
                                             const HSchedule& sched,
                                             const GridPartition& quad_grid, double tol,
                                             const CheckOptions& opts) {
    const auto F = restrict_to(antiderivative(density, rect, quad_grid), rect);
    auto rep = make_report("integral_differentiation", opts);
    rep.rect = rect;
    rep.grid = quad_grid.cells_per_axis();
    rep.schedule = sched;
    rep.parameters["points"] = static_cast<double>(points.size());
    rep.parameters["tol"] = tol;

    const auto q = QuadrantSign::positive(rect.dimension());
    std::vector<double> err(points.size(), kInf);
    detail::parallel_for(points.size(), opts.jobs, [&](std::size_t p) {
        const auto est = joint_derivative(F, points[p], q, sched);
        if (est.value) err[p] = std::abs(*est.value - density(points[p]));
    });
    const auto nonconv = std::count(err.begin(), err.end(), kInf);
    rep.lhs = percentile95(err);
    rep.rhs = tol;
    rep.relation = Relation::LE;
    rep.slack = 0.0;
    rep.metrics["nonconvergent_points"] = static_cast<double>(nonconv);
    rep.metrics["within_tol_fraction"] =
        points.empty() ? 0.0
                       : static_cast<double>(std::count_if(err.begin(), err.end(),
                                                           [tol](double e) { return e <= tol; })) /
                             static_cast<double>(points.size());
    rep.notes["quadrature"] = "5-point Gauss-Legendre per clipped grid cell";
    rep.finalize();
    return rep;
}

TheoremReport check_l1_mean_convergence(const FuncSource& density, const Rect& rect,
                                        const std::vector<double>& h_list,
                                        const GridPartition& quad_grid, double tol,
                                        const CheckOptions& opts) {
    if (h_list.empty()) throw DomainError("h list is empty");
    for (std::size_t k = 0; k < h_list.size(); ++k)
        if (!(h_list[k] > 0.0) || (k > 0 && !(h_list[k] < h_list[k - 1])))
            throw DomainError("h list must be positive and strictly decreasing");
    if (quad_grid.rect() != rect) throw DomainError("quadrature grid must span the rectangle");
    const std::size_t n = rect.dimension();

    auto rep = make_report("l1_mean_convergence", opts);
    rep.rect = rect;
    rep.grid = quad_grid.cells_per_axis();
    rep.parameters["tol"] = tol;

    std::vector<double> distances(h_list.size());
    detail::parallel_for(h_list.size(), opts.jobs, [&](std::size_t k) {
        const double h = h_list[k];
        const double inv_vol = std::pow(h, -static_cast<double>(n));
        // F_h(x) = h^-n * integral of density over [x, x + h].
        const auto averaged = FuncSource::oracle(n, [&, h, inv_vol](std::span<const double> x) {
            std::vector<std::vector<Interval>> pieces(n);
            for (std::size_t i = 0; i < n; ++i)
                pieces[i] = split_interval(x[i], x[i] + h, quad_grid.axis(i));
            return inv_vol * integrate_pieces(density, pieces);
        });
        const auto deviation = FuncSource::oracle(n, [&](std::span<const double> x) {
            return std::abs(averaged(x) - density(x));
        });
        // F_h changes form where x + h crosses a breakpoint, so the outer rule
        // also splits at breakpoint - h.
        std::vector<std::vector<Interval>> pieces(n);
        CompensatedSum total;
        std::vector<std::vector<double>> outer(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& a = outer[i];
            a = quad_grid.axis(i);
            for (double b : quad_grid.axis(i)) a.push_back(b - h);
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
            pieces[i] = split_interval(rect.lo()[i], rect.hi()[i], a);
        }
        distances[k] = integrate_pieces(deviation, pieces);
    });

    // Largest excess of a step over 1.1 times its predecessor.
    double worst_excess = -kInf;
    for (std::size_t k = 1; k < distances.size(); ++k)
        worst_excess = std::max(worst_excess, distances[k] - 1.1 * distances[k - 1]);
    if (distances.size() == 1) worst_excess = 0.0;
    rep.lhs = distances.back();
    rep.rhs = tol;
    rep.relation = Relation::LE;
    rep.slack = 0.0;
    rep.add_side_condition("non_increasing_10pct", worst_excess, 0.0, Relation::LE, 1e-12);
    rep.traces["h"] = h_list;
    rep.traces["l1_distance"] = distances;
    rep.finalize();
    return rep;
}

TheoremReport check_ftc(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                        const HSchedule& sched, double tol, bool known_ac,
                        const RefinePolicy& policy, const CheckOptions& opts) {
    if (grid.rect() != rect) throw DomainError("verification grid must span the rectangle");
    auto rep = make_report("ftc", opts);
    if (!known_ac) {
        const auto v = classify_ac(f, rect, grid, sched, policy, kDefaultACTolerance, opts.jobs);
        if (v.verdict != ACClass::AbsolutelyContinuous) {
            std::ostringstream os;
            os.precision(17);
            os << "function is not classified absolutely continuous (gap " << v.gap
               << ", integral " << v.integral_of_abs_derivative << ", variation "
               << v.variation_lower_bound << ")";
            throw PreconditionError(os.str());
        }
        rep.notes["ac_source"] = "classified";
    } else {
        rep.notes["ac_source"] = "declared";
    }
    rep.rect = rect;
    record_grid(rep, grid);
    rep.schedule = sched;
    rep.parameters["tol"] = tol;

    const auto field = gauss_derivative_field(restrict_to(f, rect), grid, sched, opts.jobs);
    CompensatedSum integral;
    for (std::size_t k = 0; k < field.value.size(); ++k)
        if (field.value[k]) integral.add(*field.value[k] * field.weight[k]);
    rep.lhs = integral.value();
    rep.rhs = joint_increment(f, rect);
    rep.relation = Relation::EQ;
    rep.slack = tol * std::max(1.0, std::abs(rep.rhs));
    rep.metrics["excluded_nodes"] = static_cast<double>(field.nonconvergent);
    rep.finalize();
    return rep;
}

TheoremReport check_zero_derivative_rigidity(const FuncSource& f, const Rect& rect, double atol,
                                             const CheckOptions& opts) {
    auto rep = make_report("zero_derivative_rigidity", opts);
    rep.rect = rect;
    const double d = joint_increment(f, rect);
    rep.lhs = std::abs(d);
    rep.rhs = 0.0;
    rep.relation = Relation::LE;
    rep.slack = atol;
    rep.metrics["increment"] = d;
    rep.finalize();
    return rep;
}

} // namespace hkvar
