#include "hkvar/increment.hpp"

#include "hkvar/error.hpp"
#include "hkvar/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hkvar {

namespace {

double checked_eval(const FuncSource& f, std::span<const double> x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw EvaluationError("non-finite function value at corner " +
                                  format_point(Point(x.begin(), x.end())),
                              Point(x.begin(), x.end()));
    return v;
}

void check_dimension(const FuncSource& f, const Rect& rect) {
    if (rect.dimension() != f.dimension())
        throw DomainError("rectangle dimension " + std::to_string(rect.dimension()) +
                          " does not match function dimension " +
                          std::to_string(f.dimension()));
}

// Signed corner sum over the box spanned by a and b, with no ordering
// requirement between them.
double corner_sum(const FuncSource& f, std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] == b[i]) return 0.0;
    std::array<double, kMaxDimension> x{};
    CompensatedSum sum;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        for (std::size_t i = 0; i < n; ++i) x[i] = ((bits >> i) & 1u) ? b[i] : a[i];
        const double v = checked_eval(f, std::span<const double>(x.data(), n));
        sum.add(corner_sign(n, bits) > 0 ? v : -v);
    }
    return sum.value();
}

double recurse(const FuncSource& f, const Rect& rect, std::size_t free_axes,
               std::array<double, kMaxDimension>& x) {
    if (free_axes == 0)
        return checked_eval(f, std::span<const double>(x.data(), rect.dimension()));
    const std::size_t axis = free_axes - 1;
    x[axis] = rect.hi()[axis];
    const double upper = recurse(f, rect, axis, x);
    x[axis] = rect.lo()[axis];
    const double lower = recurse(f, rect, axis, x);
    return upper - lower;
}

} // namespace

double joint_increment(const FuncSource& f, const Rect& rect) {
    check_dimension(f, rect);
    return corner_sum(f, rect.lo(), rect.hi());
}

double joint_increment_recursive(const FuncSource& f, const Rect& rect) {
    check_dimension(f, rect);
    std::array<double, kMaxDimension> x{};
    return recurse(f, rect, rect.dimension(), x);
}

FuncSource tilde_transform(const FuncSource& f, std::span<const double> origin) {
    if (origin.size() != f.dimension())
        throw DomainError("tilde transform origin has wrong dimension");
    Point a(origin.begin(), origin.end());
    return FuncSource::oracle(
        f.dimension(), [f, a](std::span<const double> x) { return corner_sum(f, a, x); },
        f.domain());
}

FuncSource clamp_extension(const FuncSource& f, const Rect& rect) {
    check_dimension(f, rect);
    return FuncSource::oracle(f.dimension(), [f, rect](std::span<const double> x) {
        std::array<double, kMaxDimension> y{};
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = std::clamp(x[i], rect.lo()[i], rect.hi()[i]);
        return f(std::span<const double>(y.data(), x.size()));
    });
}

std::vector<double> cell_increments(const GridSample& sample) {
    const auto& part = sample.partition();
    const std::size_t n = part.dimension();
    const auto strides = part.vertex_strides();
    const auto& values = sample.values();

    std::vector<std::size_t> offsets(std::size_t{1} << n);
    std::vector<int> signs(offsets.size());
    for (std::uint32_t bits = 0; bits < offsets.size(); ++bits) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((bits >> i) & 1u) off += strides[i];
        offsets[bits] = off;
        signs[bits] = corner_sign(n, bits);
    }

    const std::size_t cells = part.cell_count();
    std::vector<double> out(cells);
    std::vector<std::size_t> idx(n, 0);
    const auto counts = part.cells_per_axis();
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t base = 0;
        for (std::size_t i = 0; i < n; ++i) base += idx[i] * strides[i];
        CompensatedSum sum;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const double v = values[base + offsets[k]];
            sum.add(signs[k] > 0 ? v : -v);
        }
        out[c] = sum.value();
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < counts[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

} // namespace hkvar
