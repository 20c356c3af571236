#pragma once

#include "hkvar/classify.hpp"
#include "hkvar/differentiation.hpp"
#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"
#include "hkvar/variation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hkvar {

enum class Relation { LE, EQ };

std::string to_string(Relation r);

/// lhs <= rhs + slack, or |lhs - rhs| <= slack. NaN never holds.
bool relation_holds(double lhs, double rhs, Relation rel, double slack) noexcept;

/// Extra inequality a check must satisfy besides its headline relation.
struct SideCondition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::LE;
    double slack = 0.0;
    bool pass = false;
};

struct TheoremReport {
    std::string theorem;
    std::string function;

    // Inputs.
    std::optional<Rect> rect;
    std::vector<std::size_t> grid;
    std::optional<HSchedule> schedule;
    std::map<std::string, double> parameters;

    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::LE;
    double slack = 0.0;
    bool pass = false;
    std::vector<SideCondition> side_conditions;

    std::map<std::string, double> metrics;
    std::map<std::string, std::string> notes;
    std::map<std::string, std::vector<double>> traces;

    /// Recomputes pass from the recorded relations.
    bool recompute_pass() const noexcept;
    void add_side_condition(std::string name, double lhs, double rhs, Relation rel, double slack);
    /// Sets pass from the headline relation and all side conditions.
    void finalize();
};

struct CheckOptions {
    std::string function_id = "user";
    unsigned jobs = 1;
    /// Tolerance for the grid monotonicity precondition.
    double monotone_tol = kMonotoneEpsilon;
};

/// Integral of the joint derivative against the joint increment for a
/// jointly monotone f. The integral uses two-point Gauss nodes per grid
/// cell; nodes without a converged estimate contribute their Dini lower
/// bound. A side condition requires converged nodes to be >= -atol beyond
/// their estimation tolerance. Throws PreconditionError with the witness
/// cell if f is not monotone on grid.
TheoremReport check_lebesgue_monotone(const FuncSource& f, const Rect& rect,
                                      const GridPartition& grid, const HSchedule& sched,
                                      const CheckOptions& opts = {});

/// Integral of |f^(n)| against the variation lower bound, with slack
/// 1e-6 * max(1, V) for the bound's underestimate. Throws PreconditionError
/// unless the variation refinement converged.
TheoremReport check_lebesgue_bv(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                                const HSchedule& sched, const RefinePolicy& policy,
                                const CheckOptions& opts = {});

/// Largest pairwise spread of all 2^n quadrant derivatives per point, scaled
/// by max(1, |D|). Headline: 95th percentile over convergent points <= 10 rtol.
TheoremReport check_quadrant_agreement(const FuncSource& f, const std::vector<Point>& points,
                                       const HSchedule& sched, const CheckOptions& opts = {});

/// Derivative of the K-term partial sum against the sum of term derivatives
/// at cell centres. Headline: median discrepancy <= tol; side: 95th
/// percentile <= 10 tol. Non-convergent cells count as failures.
TheoremReport check_fubini_series(const std::vector<FuncSource>& terms, const Rect& rect,
                                  const GridPartition& grid, const HSchedule& sched,
                                  std::size_t K, double tol, const CheckOptions& opts = {});

/// x -> integral of density over [rect.lo, x], by tensor Gauss-Legendre on
/// the cells of quad_grid clipped to the box.
FuncSource antiderivative(const FuncSource& density, const Rect& rect,
                          const GridPartition& quad_grid);

/// Joint derivative of the antiderivative against the density at points.
/// Headline: 95th percentile of the error <= tol.
TheoremReport check_integral_differentiation(const FuncSource& density, const Rect& rect,
                                             const std::vector<Point>& points,
                                             const HSchedule& sched,
                                             const GridPartition& quad_grid, double tol,
                                             const CheckOptions& opts = {});

/// L1 distance between the cube average F_h and the density for each h in
/// the strictly decreasing h_list. Headline: last distance <= tol; side:
/// every step at most 1.1 times the previous one.
TheoremReport check_l1_mean_convergence(const FuncSource& density, const Rect& rect,
                                        const std::vector<double>& h_list,
                                        const GridPartition& quad_grid, double tol,
                                        const CheckOptions& opts = {});

/// Joint increment against the Gauss-node integral of the derivative over
/// converged nodes. When known_ac is false, f is classified first and a
/// verdict other than AbsolutelyContinuous throws PreconditionError.
TheoremReport check_ftc(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                        const HSchedule& sched, double tol, bool known_ac,
                        const RefinePolicy& policy = {}, const CheckOptions& opts = {});

/// |joint increment| <= atol for an absolutely continuous f whose joint
/// derivative vanishes almost everywhere.
TheoremReport check_zero_derivative_rigidity(const FuncSource& f, const Rect& rect, double atol,
                                             const CheckOptions& opts = {});

} // namespace hkvar
