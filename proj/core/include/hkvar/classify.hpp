#pragma once

#include "hkvar/differentiation.hpp"
#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"
#include "hkvar/variation.hpp"

#include <optional>

namespace hkvar {

enum class Verdict { Pass, Fail };

struct MonotonicityWitness {
    Rect cell;
    double increment;
};

struct MonotonicityReport {
    Verdict verdict = Verdict::Pass;
    /// Worst cell; present on Fail.
    std::optional<MonotonicityWitness> witness;
    double tolerance = 0.0;
    std::size_t cells_checked = 0;
    std::size_t violations = 0;

    bool passed() const noexcept { return verdict == Verdict::Pass; }
};

/// Checks the joint increment of every grid cell against -tol. Increments
/// are additive over cells, so this covers every rectangle whose corners are
/// grid vertices.
MonotonicityReport is_jointly_monotone(const FuncSource& f, const GridPartition& grid, double tol);

/// Same check on tabulated values.
MonotonicityReport is_jointly_monotone(const GridSample& sample, double tol);

/// Checks every adjacent-vertex difference along every grid line against
/// -tol. The witness cell is the offending edge (degenerate in the other axes).
MonotonicityReport is_componentwise_monotone(const FuncSource& f, const GridPartition& grid,
                                             double tol);

enum class ACClass {
    AbsolutelyContinuous,
    SingularPartDetected,
    Inconclusive,
};

struct ACVerdict {
    ACClass verdict = ACClass::Inconclusive;
    double integral_of_abs_derivative = 0.0;
    double variation_lower_bound = 0.0;
    /// variation_lower_bound - integral_of_abs_derivative.
    double gap = 0.0;
    double tolerance = 0.0;
    std::size_t derivative_cells = 0;
    std::size_t nonconvergent_cells = 0;
    VariationStop variation_stop = VariationStop::RoundLimit;
};

/// Largest fraction of non-convergent derivative cells before the verdict
/// becomes Inconclusive.
inline constexpr double kMaxMissingDerivativeFraction = 0.05;
inline constexpr double kDefaultACTolerance = 1e-3;

/// Compares the midpoint integral of |f^(n)| over grid with the variation
/// lower bound. Equal within tol * max(1, V) means absolutely continuous.
ACVerdict classify_ac(const FuncSource& f, const Rect& rect, const GridPartition& grid,
                      const HSchedule& sched, const RefinePolicy& policy,
                      double tol = kDefaultACTolerance, unsigned jobs = 1);

} // namespace hkvar
