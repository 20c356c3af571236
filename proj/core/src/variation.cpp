#include "hkvar/variation.hpp"

#include "hkvar/error.hpp"
#include "hkvar/increment.hpp"
#include "hkvar/summation.hpp"

#include <algorithm>
#include <cmath>

namespace hkvar {

namespace {

double abs_sum(const std::vector<double>& increments) {
    CompensatedSum s;
    for (double d : increments) s.add(std::abs(d));
    return s.value();
}

// Every cell split in half along every axis.
GridPartition bisect_all(const GridPartition& p) {
    auto axes = p.axes();
    for (auto& a : axes) {
        std::vector<double> out;
        out.reserve(2 * a.size() - 1);
        for (std::size_t k = 0; k + 1 < a.size(); ++k) {
            out.push_back(a[k]);
            out.push_back(a[k] + 0.5 * (a[k + 1] - a[k]));
        }
        out.push_back(a.back());
        a = std::move(out);
    }
    return GridPartition(std::move(axes));
}

std::size_t cells_after_bisect(const GridPartition& p) {
    std::size_t c = 1;
    for (const auto& a : p.axes()) c *= 2 * (a.size() - 1);
    return c;
}

std::size_t cells_after_insert(const GridPartition& p, std::span<const double> point) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < p.dimension(); ++i) {
        const auto& a = p.axis(i);
        const bool present = std::binary_search(a.begin(), a.end(), point[i]);
        c *= a.size() - 1 + (present ? 0 : 1);
    }
    return c;
}

// Breakpoints of a sampled source that fall inside rect, with rect's own
// bounds added.
GridPartition sample_partition_within(const GridSample& sample, const Rect& rect) {
    std::vector<std::vector<double>> axes(rect.dimension());
    for (std::size_t i = 0; i < rect.dimension(); ++i) {
        auto& a = axes[i];
        a.push_back(rect.lo()[i]);
        for (double v : sample.partition().axis(i))
            if (v > rect.lo()[i] && v < rect.hi()[i]) a.push_back(v);
        a.push_back(rect.hi()[i]);
    }
    return GridPartition(std::move(axes));
}

bool stalled(const std::vector<VariationRound>& trace, double rtol, double atol) {
    if (trace.size() < 3) return false;
    const std::size_t e = trace.size() - 1;
    for (std::size_t k = e - 1; k <= e; ++k) {
        const double gain = trace[k].sum - trace[k - 1].sum;
        if (gain > std::max(rtol * trace[k].sum, atol)) return false;
    }
    return true;
}

} // namespace

void RefinePolicy::validate(std::size_t n) const {
    if (max_rounds < 1) throw DomainError("refine policy needs at least one round");
    if (!(stall_rtol > 0.0)) throw DomainError("refine policy stall_rtol must be positive");
    if (!(stall_atol >= 0.0)) throw DomainError("refine policy stall_atol must be non-negative");
    if (n < 64 && cell_budget < (std::size_t{1} << n))
        throw DomainError("refine policy cell budget must be at least 2^n");
}

double variation_on_partition(const FuncSource& f, const GridPartition& partition) {
    return abs_sum(cell_increments(f.tabulate(partition)));
}

VariationResult total_variation(const FuncSource& f, const Rect& rect, const RefinePolicy& policy) {
    if (rect.dimension() != f.dimension())
        throw DomainError("rectangle dimension does not match the function");
    policy.validate(rect.dimension());

    VariationResult result{0.0, {}, VariationStop::RoundLimit, GridPartition::identity(rect), false};
    if (rect.is_degenerate()) {
        result.trace.push_back({1, 0.0, 0.0});
        result.stopped = VariationStop::Converged;
        return result;
    }

    if (const GridSample* s = f.sample();
        s && f.interpolation() != Interpolation::Nearest) {
        // Vertex-only and multilinear sources carry no information between
        // vertices, so the finest vertex partition attains the supremum.
        auto part = sample_partition_within(*s, rect);
        const double v = variation_on_partition(f, part);
        result.trace.push_back({part.cell_count(), v, v});
        result.lower_bound = v;
        result.partition = std::move(part);
        result.stopped = VariationStop::Converged;
        result.exact = true;
        return result;
    }

    GridPartition part = GridPartition::identity(rect);
    double best = 0.0;
    for (int round = 1;; ++round) {
        const auto incs = cell_increments(f.tabulate(part));
        const double raw = abs_sum(incs);
        best = std::max(best, raw);
        result.trace.push_back({part.cell_count(), best, raw});
        result.partition = part;

        if (stalled(result.trace, policy.stall_rtol, policy.stall_atol)) {
            result.stopped = VariationStop::Converged;
            break;
        }
        if (round >= policy.max_rounds) {
            result.stopped = VariationStop::RoundLimit;
            break;
        }
        if (policy.mode == RefineMode::UniformBisect) {
            if (cells_after_bisect(part) > policy.cell_budget) {
                result.stopped = VariationStop::BudgetExhausted;
                break;
            }
            part = bisect_all(part);
        } else {
            std::size_t worst = 0;
            for (std::size_t c = 1; c < incs.size(); ++c)
                if (std::abs(incs[c]) > std::abs(incs[worst])) worst = c;
            const Point mid = part.cell(worst).midpoint();
            if (cells_after_insert(part, mid) > policy.cell_budget) {
                result.stopped = VariationStop::BudgetExhausted;
                break;
            }
            part = refine(part, mid);
        }
    }
    result.lower_bound = best;
    return result;
}

AdditivityCheck check_additivity(const FuncSource& f, const Rect& rect,
                                 std::span<const double> split_point, const RefinePolicy& policy) {
    const std::size_t n = rect.dimension();
    if (split_point.size() != n) throw DomainError("split point has wrong dimension");
    for (std::size_t i = 0; i < n; ++i)
        if (!(split_point[i] > rect.lo()[i] && split_point[i] < rect.hi()[i]))
            throw DomainError("split point must lie strictly inside the rectangle");

    AdditivityCheck out{0.0, 0.0, {}, total_variation(f, rect, policy)};
    out.whole = out.whole_result.lower_bound;
    CompensatedSum parts;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Point lo(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool upper = (bits >> i) & 1u;
            lo[i] = upper ? split_point[i] : rect.lo()[i];
            hi[i] = upper ? rect.hi()[i] : split_point[i];
        }
        out.parts.push_back(total_variation(f, Rect(std::move(lo), std::move(hi)), policy));
        parts.add(out.parts.back().lower_bound);
    }
    out.parts_sum = parts.value();
    return out;
}

JordanPair jordan_decompose(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                            const RefinePolicy& policy) {
    if (grid.rect() != rect)
        throw DomainError("Jordan grid must span exactly the requested rectangle");
    const std::size_t n = grid.dimension();
    const GridSample fv = f.tabulate(grid);

    // Cumulative variation lives on vertices; vertex index 0 along an axis
    // is the anchor face where g vanishes.
    const auto vcounts = grid.vertices_per_axis();
    const auto strides = grid.vertex_strides();
    std::vector<double> g(grid.vertex_count(), 0.0);

    JordanPair out{fv, fv, 0, 0};
    std::vector<std::size_t> vidx;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const auto r = total_variation(f, grid.cell(c), policy);
        if (r.stopped != VariationStop::Converged) ++out.unconverged_cells;
        if (r.stopped == VariationStop::BudgetExhausted) ++out.budget_exhausted_cells;
        vidx = grid.cell_index(c);
        std::size_t flat = 0;
        for (std::size_t i = 0; i < n; ++i) flat += (vidx[i] + 1) * strides[i];
        g[flat] = r.lower_bound;
    }
    // Prefix sums along each axis in turn turn per-cell masses into
    // variations over [a, vertex].
    for (std::size_t axis = 0; axis < n; ++axis) {
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            const std::size_t k = (flat / strides[axis]) % vcounts[axis];
            if (k > 0) g[flat] += g[flat - strides[axis]];
        }
    }
    std::vector<double> h(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) h[k] = g[k] - fv.values()[k];
    out.g = GridSample(grid, std::move(g));
    out.h = GridSample(grid, std::move(h));
    return out;
}

} // namespace hkvar
