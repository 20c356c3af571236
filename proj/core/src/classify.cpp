#include "hkvar/classify.hpp"

#include "hkvar/error.hpp"
#include "hkvar/increment.hpp"
#include "hkvar/summation.hpp"

#include <cmath>

namespace hkvar {

MonotonicityReport is_jointly_monotone(const GridSample& sample, double tol) {
    const auto incs = cell_increments(sample);
    MonotonicityReport rep;
    rep.tolerance = tol;
    rep.cells_checked = incs.size();
    std::size_t worst = 0;
    for (std::size_t c = 0; c < incs.size(); ++c) {
        if (incs[c] < -tol) ++rep.violations;
        if (incs[c] < incs[worst]) worst = c;
    }
    if (rep.violations > 0) {
        rep.verdict = Verdict::Fail;
        rep.witness = MonotonicityWitness{sample.partition().cell(worst), incs[worst]};
    }
    return rep;
}

MonotonicityReport is_jointly_monotone(const FuncSource& f, const GridPartition& grid, double tol) {
    return is_jointly_monotone(f.tabulate(grid), tol);
}

MonotonicityReport is_componentwise_monotone(const FuncSource& f, const GridPartition& grid,
                                             double tol) {
    const GridSample s = f.tabulate(grid);
    const std::size_t n = grid.dimension();
    const auto strides = grid.vertex_strides();
    const auto counts = grid.vertices_per_axis();
    const auto& v = s.values();

    MonotonicityReport rep;
    rep.tolerance = tol;
    double worst = 0.0;
    std::size_t worst_flat = 0, worst_axis = 0;
    bool have = false;
    for (std::size_t axis = 0; axis < n; ++axis) {
        for (std::size_t flat = 0; flat < v.size(); ++flat) {
            const std::size_t k = (flat / strides[axis]) % counts[axis];
            if (k + 1 >= counts[axis]) continue;
            const double d = v[flat + strides[axis]] - v[flat];
            ++rep.cells_checked;
            if (d < -tol) ++rep.violations;
            if (!have || d < worst) {
                worst = d;
                worst_flat = flat;
                worst_axis = axis;
                have = true;
            }
        }
    }
    if (rep.violations > 0) {
        Point lo = grid.vertex(worst_flat);
        Point hi = grid.vertex(worst_flat + strides[worst_axis]);
        rep.verdict = Verdict::Fail;
        rep.witness = MonotonicityWitness{Rect(std::move(lo), std::move(hi)), worst};
    }
    return rep;
}

ACVerdict classify_ac(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                      const HSchedule& sched, const RefinePolicy& policy, double tol,
                      unsigned jobs) {
    if (grid.rect() != rect) throw DomainError("classification grid must span the rectangle");
    ACVerdict out;
    out.tolerance = tol;

    const auto field = derivative_field(restrict_to(f, rect), grid, QuadrantSign::positive(f.dimension()), sched, jobs);
    CompensatedSum integral;
    for (std::size_t c = 0; c < field.size(); ++c)
        if (field.values[c]) integral.add(std::abs(*field.values[c]) * grid.cell(c).volume());
    out.integral_of_abs_derivative = integral.value();
    out.derivative_cells = field.size();
    out.nonconvergent_cells = field.nonconvergent;

    const auto var = total_variation(f, rect, policy);
    out.variation_lower_bound = var.lower_bound;
    out.variation_stop = var.stopped;
    out.gap = out.variation_lower_bound - out.integral_of_abs_derivative;

    const double threshold = tol * std::max(1.0, out.variation_lower_bound);
    if (var.stopped != VariationStop::Converged ||
        field.missing_fraction() > kMaxMissingDerivativeFraction) {
        out.verdict = ACClass::Inconclusive;
    } else if (std::abs(out.gap) <= threshold) {
        out.verdict = ACClass::AbsolutelyContinuous;
    } else if (out.gap > threshold) {
        out.verdict = ACClass::SingularPartDetected;
    } else {
        // The integral exceeds the variation: quadrature or refinement error
        // dominates and neither side can be trusted.
        out.verdict = ACClass::Inconclusive;
    }
    return out;
}

} // namespace hkvar
