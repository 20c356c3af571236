#pragma once

#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"

#include <cstddef>
#include <vector>

namespace hkvar {

enum class RefineMode {
    UniformBisect,     ///< bisect every cell along every axis each round
    AdaptiveWorstCell, ///< insert the midpoint of the cell with the largest |increment|
};

struct RefinePolicy {
    RefineMode mode = RefineMode::UniformBisect;
    int max_rounds = 16;
    double stall_rtol = 1e-5;
    /// Gains below this count as stalled; keeps rounding noise on functions
    /// with zero variation from driving refinement to the budget.
    double stall_atol = 1e-12;
    std::size_t cell_budget = std::size_t{1} << 22;

    void validate(std::size_t n) const;
};

enum class VariationStop {
    Converged,
    BudgetExhausted,
    RoundLimit,
};

struct VariationRound {
    std::size_t cells;
    /// Best partition sum seen so far; non-decreasing across rounds.
    double sum;
    /// Sum for this round's partition alone.
    double raw_sum;
};

/// Certified lower bound on the total variation with its refinement history.
struct VariationResult {
    double lower_bound = 0.0;
    std::vector<VariationRound> trace;
    VariationStop stopped = VariationStop::RoundLimit;
    GridPartition partition;
    /// Set for grid-sampled sources, where the finest vertex partition
    /// attains the supremum.
    bool exact = false;
};

/// Sum over the cells of |joint increment|.
double variation_on_partition(const FuncSource& f, const GridPartition& partition);

/// Refines from the single-cell partition of rect until two consecutive
/// rounds each raise the sum by at most max(stall_rtol * sum, stall_atol), or until the
/// round or cell budget runs out.
VariationResult total_variation(const FuncSource& f, const Rect& rect, const RefinePolicy& policy);

struct AdditivityCheck {
    double whole;
    double parts_sum;
    std::vector<VariationResult> parts;
    VariationResult whole_result;
};

/// Variation of rect against the sum over the 2^n blocks cut by split_point.
AdditivityCheck check_additivity(const FuncSource& f, const Rect& rect,
                                 std::span<const double> split_point, const RefinePolicy& policy);

/// Default tolerance for monotonicity certification of the Jordan pair.
inline constexpr double kMonotoneEpsilon = 1e-9;

/// f = g - h on the vertices of a grid, with g(x) the variation of f over
/// [a, x] and h = g - f.
struct JordanPair {
    GridSample g;
    GridSample h;
    /// Cells whose variation stopped on the budget or round limit.
    std::size_t unconverged_cells = 0;
    std::size_t budget_exhausted_cells = 0;
};

/// Computes per-cell variations once and accumulates them with an n-dimensional
/// prefix sum, so g at a vertex is the variation over [a, vertex].
JordanPair jordan_decompose(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                            const RefinePolicy& policy);

} // namespace hkvar
