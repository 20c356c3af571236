#pragma once

#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hkvar {

/// Geometric step schedule h_k = h0 * ratio^k for the cube quotients
/// Delta_f[x, x + h eps] / h^n.
struct HSchedule {
    double h0 = 0.125;
    double ratio = 0.5;
    int max_steps = 24;
    /// Consecutive entries that must agree before the estimate is accepted.
    int window = 4;
    double rtol = 1e-6;
    double atol = 1e-9;

    /// h0 = min side / 8, halving, 24 steps, rtol 1e-6, atol 1e-9.
    static HSchedule for_rect(const Rect& rect);
    /// Throws DomainError when a field is out of range.
    void validate() const;
};

struct QuotientSample {
    double h;
    double quotient;
};

enum class DerivativeStop {
    Converged,
    ScheduleExhausted,
};

/// Outcome of one joint-derivative estimate. A missing value means the
/// quotients did not settle; that is a result, not an error.
struct DerivativeEstimate {
    std::optional<double> value;
    double dini_upper = 0.0;
    double dini_lower = 0.0;
    std::vector<QuotientSample> trace;
    QuadrantSign quadrant = QuadrantSign::positive(1);
    DerivativeStop stop = DerivativeStop::ScheduleExhausted;
    /// True when the value came from the extrapolated sequence rather than
    /// the raw quotients.
    bool extrapolated = false;
    /// Agreement tolerance the accepted window met; 0 without a value.
    double tolerance = 0.0;

    bool converged() const noexcept { return value.has_value(); }
};

/// Quadrant joint derivative at x. Quotients are taken over the cube with
/// side h in direction eps (reoriented for eps_i = -1). The raw sequence and
/// a Richardson-extrapolated sequence are both tested; the estimate converges
/// when the last `window` entries of either agree pairwise within
/// max(rtol |q|, atol, b), where b bounds the rounding error of the entries. h0 is halved until the cube fits f's domain, down to
/// h0 * 2^-17; below that a DomainError is thrown.
DerivativeEstimate joint_derivative(const FuncSource& f, std::span<const double> x,
                                    const QuadrantSign& quadrant, const HSchedule& sched);

struct DiniBracket {
    double upper;
    double lower;
};

/// Sup and inf of the raw quotients over the trailing half of the (+,...,+)
/// schedule. Does not require convergence.
DiniBracket dini_bracket(const FuncSource& f, std::span<const double> x, const HSchedule& sched);

/// Per-cell joint derivatives evaluated at cell centers.
struct DerivativeField {
    GridPartition partition;
    std::vector<std::optional<double>> values;
    std::vector<double> dini_lower;
    std::vector<double> dini_upper;
    std::size_t nonconvergent = 0;

    std::size_t size() const noexcept { return values.size(); }
    double missing_fraction() const noexcept {
        return values.empty() ? 0.0 : static_cast<double>(nonconvergent) / values.size();
    }
};

/// jobs > 1 evaluates cells on worker threads; results do not depend on jobs.
DerivativeField derivative_field(const FuncSource& f, const GridPartition& partition,
                                 const QuadrantSign& quadrant, const HSchedule& sched,
                                 unsigned jobs = 1);

} // namespace hkvar
