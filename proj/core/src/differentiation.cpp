#include "hkvar/differentiation.hpp"

#include "hkvar/error.hpp"
#include "hkvar/increment.hpp"
#include "hkvar/summation.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hkvar {

namespace {

// Extrapolation eliminates error terms h, h^2, ..., h^kMaxLevels.
constexpr std::size_t kMaxLevels = 4;
// Shrinking stops at h0 * 2^-17, i.e. 2^-20 of the side for the default h0.
constexpr double kShrinkFloor = 0x1p-17;
// Rounding bound on a quotient: kNoiseFactor * eps * sum |f(corner)| / h^n.
constexpr double kNoiseFactor = 8.0;
// Extrapolated entries combine several quotients; their bound is scaled by this.
constexpr double kExtrapolatedNoiseGain = 4.0;

Rect cube(std::span<const double> x, const QuadrantSign& q, double h) {
    Point lo(x.size()), hi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (q[i] > 0) {
            lo[i] = x[i];
            hi[i] = x[i] + h;
        } else {
            lo[i] = x[i] - h;
            hi[i] = x[i];
        }
    }
    return Rect(std::move(lo), std::move(hi));
}

// Acceptance tolerance for the trailing `window` entries of seq:
// max(rtol * |v|, atol, rounding bound of the entries).
double window_tolerance(const std::vector<double>& seq, const std::vector<double>& noise,
                        int window, double rtol, double atol) {
    const auto [lo, hi] = std::minmax_element(seq.end() - window, seq.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    const double floor = *std::max_element(noise.end() - window, noise.end());
    return std::max({rtol * scale, atol, floor});
}

// The trailing `window` entries pairwise agree within their tolerance.
bool settled(const std::vector<double>& seq, const std::vector<double>& noise, int window,
             double rtol, double atol) {
    const auto [lo, hi] = std::minmax_element(seq.end() - window, seq.end());
    return *hi - *lo <= window_tolerance(seq, noise, window, rtol, atol);
}

struct CubeQuotient {
    double value;
    double noise;
};

CubeQuotient cube_quotient(const FuncSource& f, const Rect& c, double h) {
    CompensatedSum sum;
    double magnitude = 0.0;
    for (const auto& corner : corners(c)) {
        const double v = f(corner.point);
        if (!std::isfinite(v))
            throw EvaluationError("non-finite function value at " + format_point(corner.point),
                                  corner.point);
        sum.add(corner.mask.sign * v);
        magnitude += std::abs(v);
    }
    const double volume = std::pow(h, static_cast<double>(c.dimension()));
    return {sum.value() / volume,
            kNoiseFactor * std::numeric_limits<double>::epsilon() * magnitude / volume};
}

double fitted_h0(const FuncSource& f, std::span<const double> x, const QuadrantSign& q,
                 const HSchedule& sched) {
    const auto& dom = f.domain();
    if (!dom) return sched.h0;
    if (!dom->contains(x))
        throw DomainError("derivative point " + format_point(Point(x.begin(), x.end())) +
                          " lies outside the function's domain");
    const double floor = sched.h0 * kShrinkFloor;
    double h = sched.h0;
    while (h >= floor) {
        if (dom->contains(cube(x, q, h))) return h;
        h *= 0.5;
    }
    throw DomainError("no cube of side >= " + std::to_string(floor) + " around " +
                      format_point(Point(x.begin(), x.end())) + " fits the domain");
}

} // namespace

HSchedule HSchedule::for_rect(const Rect& rect) {
    HSchedule s;
    s.h0 = rect.min_side() / 8.0;
    return s;
}

void HSchedule::validate() const {
    if (!(h0 > 0.0) || !std::isfinite(h0)) throw DomainError("schedule h0 must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("schedule ratio must lie in (0, 1)");
    if (window < 2) throw DomainError("schedule window must be at least 2");
    if (max_steps < window) throw DomainError("schedule needs at least window steps");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("schedule tolerances must be positive");
}

DerivativeEstimate joint_derivative(const FuncSource& f, std::span<const double> x,
                                    const QuadrantSign& quadrant, const HSchedule& sched) {
    sched.validate();
    const std::size_t n = f.dimension();
    if (x.size() != n || quadrant.dimension() != n)
        throw DomainError("derivative point or quadrant has wrong dimension");

    DerivativeEstimate est;
    est.quadrant = quadrant;

    double h = fitted_h0(f, x, quadrant, sched);
    // tableau[m] holds the level-m extrapolant of the previous step.
    std::vector<double> prev_row, row;
    std::vector<double> extrapolated;
    std::vector<double> raw;
    std::vector<double> raw_noise, extrapolated_noise;

    for (int k = 0; k < sched.max_steps; ++k, h *= sched.ratio) {
        const auto [q, noise] = cube_quotient(f, cube(x, quadrant, h), h);
        if (std::isnan(q))
            throw EvaluationError("quotient is NaN", Point(x.begin(), x.end()));
        est.trace.push_back({h, q});
        raw.push_back(q);
        raw_noise.push_back(noise);
        extrapolated_noise.push_back(kExtrapolatedNoiseGain * noise);

        const std::size_t levels = std::min<std::size_t>(static_cast<std::size_t>(k), kMaxLevels);
        row.assign(levels + 1, 0.0);
        row[0] = q;
        for (std::size_t m = 1; m <= levels; ++m) {
            const double factor = std::pow(sched.ratio, -static_cast<double>(m)) - 1.0;
            row[m] = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / factor;
        }
        extrapolated.push_back(row[levels]);
        prev_row = row;

        if (k + 1 < sched.window) continue;
        if (settled(extrapolated, extrapolated_noise, sched.window, sched.rtol, sched.atol)) {
            est.value = extrapolated.back();
            est.extrapolated = true;
            est.tolerance = window_tolerance(extrapolated, extrapolated_noise, sched.window,
                                             sched.rtol, sched.atol);
        } else if (settled(raw, raw_noise, sched.window, sched.rtol, sched.atol)) {
            est.value = raw.back();
            est.tolerance = window_tolerance(raw, raw_noise, sched.window, sched.rtol, sched.atol);
        }
        if (est.value) {
            est.stop = DerivativeStop::Converged;
            break;
        }
    }

    const std::size_t start = est.trace.size() / 2;
    est.dini_upper = est.trace[start].quotient;
    est.dini_lower = est.trace[start].quotient;
    for (std::size_t i = start; i < est.trace.size(); ++i) {
        est.dini_upper = std::max(est.dini_upper, est.trace[i].quotient);
        est.dini_lower = std::min(est.dini_lower, est.trace[i].quotient);
    }
    if (est.value) {
        est.dini_upper = std::max(est.dini_upper, *est.value);
        est.dini_lower = std::min(est.dini_lower, *est.value);
    }
    return est;
}

DiniBracket dini_bracket(const FuncSource& f, std::span<const double> x, const HSchedule& sched) {
    const auto est = joint_derivative(f, x, QuadrantSign::positive(f.dimension()), sched);
    const std::size_t start = est.trace.size() / 2;
    DiniBracket b{est.trace[start].quotient, est.trace[start].quotient};
    for (std::size_t i = start; i < est.trace.size(); ++i) {
        b.upper = std::max(b.upper, est.trace[i].quotient);
        b.lower = std::min(b.lower, est.trace[i].quotient);
    }
    return b;
}

DerivativeField derivative_field(const FuncSource& f, const GridPartition& partition,
                                 const QuadrantSign& quadrant, const HSchedule& sched,
                                 unsigned jobs) {
    if (partition.dimension() != f.dimension())
        throw DomainError("partition dimension does not match the function");
    const std::size_t cells = partition.cell_count();
    DerivativeField field{partition, std::vector<std::optional<double>>(cells),
                          std::vector<double>(cells), std::vector<double>(cells), 0};
    detail::parallel_for(cells, jobs, [&](std::size_t c) {
        const auto est = joint_derivative(f, partition.cell_center(c), quadrant, sched);
        field.values[c] = est.value;
        field.dini_lower[c] = est.dini_lower;
        field.dini_upper[c] = est.dini_upper;
    });
    field.nonconvergent = static_cast<std::size_t>(
        std::count_if(field.values.begin(), field.values.end(), [](const auto& v) { return !v; }));
    return field;
}

} // namespace hkvar
