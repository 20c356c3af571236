#include "hkvar/geometry.hpp"

#include "hkvar/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace hkvar {

std::string format_point(const std::vector<double>& p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

Rect::Rect(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw DomainError("rectangle corners must have equal, nonzero dimension");
    if (lo_.size() > kMaxDimension)
        throw DomainError("rectangle dimension " + std::to_string(lo_.size()) +
                          " exceeds the supported maximum of " +
                          std::to_string(kMaxDimension));
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
            throw DomainError("rectangle corners must be finite");
        if (lo_[i] > hi_[i])
            throw DomainError("rectangle has lo > hi on axis " + std::to_string(i));
    }
}

Rect Rect::unit(std::size_t n) { return Rect(Point(n, 0.0), Point(n, 1.0)); }

double Rect::min_side() const noexcept {
    double m = side(0);
    for (std::size_t i = 1; i < dimension(); ++i) m = std::min(m, side(i));
    return m;
}

double Rect::volume() const noexcept {
    double v = 1.0;
    for (std::size_t i = 0; i < dimension(); ++i) v *= side(i);
    return v;
}

bool Rect::is_degenerate() const noexcept {
    for (std::size_t i = 0; i < dimension(); ++i)
        if (lo_[i] == hi_[i]) return true;
    return false;
}

bool Rect::contains(std::span<const double> x) const noexcept {
    if (x.size() != dimension()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
    return true;
}

bool Rect::contains(const Rect& other) const noexcept {
    return contains(other.lo()) && contains(other.hi());
}

Point Rect::midpoint() const {
    Point m(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) m[i] = lo_[i] + 0.5 * side(i);
    return m;
}

int corner_sign(std::size_t n, std::uint32_t bits) noexcept {
    return ((n + static_cast<std::size_t>(std::popcount(bits))) % 2 == 0) ? 1 : -1;
}

std::vector<Corner> corners(const Rect& rect) {
    const std::size_t n = rect.dimension();
    std::vector<Corner> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Corner c{{bits, corner_sign(n, bits)}, Point(n)};
        for (std::size_t i = 0; i < n; ++i)
            c.point[i] = ((bits >> i) & 1u) ? rect.hi()[i] : rect.lo()[i];
        out.push_back(std::move(c));
    }
    return out;
}

QuadrantSign::QuadrantSign(std::vector<int> dirs) : dirs_(std::move(dirs)) {
    if (dirs_.empty() || dirs_.size() > kMaxDimension)
        throw DomainError("quadrant dimension out of range");
    for (int d : dirs_)
        if (d != 1 && d != -1) throw DomainError("quadrant directions must be -1 or +1");
}

QuadrantSign QuadrantSign::positive(std::size_t n) { return QuadrantSign(std::vector<int>(n, 1)); }

std::vector<QuadrantSign> QuadrantSign::all(std::size_t n) {
    std::vector<QuadrantSign> out;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        std::vector<int> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = ((bits >> i) & 1u) ? -1 : 1;
        out.emplace_back(std::move(d));
    }
    return out;
}

GridPartition::GridPartition(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > kMaxDimension)
        throw DomainError("partition dimension out of range");
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const auto& a = axes_[i];
        if (a.size() < 2)
            throw DomainError("axis " + std::to_string(i) + " needs at least two breakpoints");
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!std::isfinite(a[k]))
                throw DomainError("axis " + std::to_string(i) + " has a non-finite breakpoint");
            if (k > 0 && !(a[k] > a[k - 1]))
                throw DomainError("axis " + std::to_string(i) +
                                  " breakpoints are not strictly increasing");
        }
    }
}

GridPartition GridPartition::uniform(const Rect& rect, std::span<const std::size_t> counts) {
    if (counts.size() != rect.dimension())
        throw DomainError("cell counts do not match rectangle dimension");
    std::vector<std::vector<double>> axes(rect.dimension());
    for (std::size_t i = 0; i < rect.dimension(); ++i) {
        const std::size_t k = counts[i];
        if (k == 0) throw DomainError("cell count must be positive");
        auto& a = axes[i];
        a.resize(k + 1);
        for (std::size_t j = 0; j <= k; ++j)
            a[j] = rect.lo()[i] + rect.side(i) * (static_cast<double>(j) / static_cast<double>(k));
        a.back() = rect.hi()[i];
    }
    return GridPartition(std::move(axes));
}

GridPartition GridPartition::uniform(const Rect& rect, std::size_t per_axis) {
    std::vector<std::size_t> counts(rect.dimension(), per_axis);
    return uniform(rect, counts);
}

GridPartition GridPartition::identity(const Rect& rect) { return uniform(rect, 1); }

Rect GridPartition::rect() const {
    Point lo(dimension()), hi(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        lo[i] = axes_[i].front();
        hi[i] = axes_[i].back();
    }
    return Rect(std::move(lo), std::move(hi));
}

std::vector<std::size_t> GridPartition::cells_per_axis() const {
    std::vector<std::size_t> c(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) c[i] = axes_[i].size() - 1;
    return c;
}

std::vector<std::size_t> GridPartition::vertices_per_axis() const {
    std::vector<std::size_t> c(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) c[i] = axes_[i].size();
    return c;
}

std::size_t GridPartition::cell_count() const noexcept {
    std::size_t c = 1;
    for (const auto& a : axes_) c *= a.size() - 1;
    return c;
}

std::size_t GridPartition::vertex_count() const noexcept {
    std::size_t c = 1;
    for (const auto& a : axes_) c *= a.size();
    return c;
}

std::vector<std::size_t> GridPartition::vertex_strides() const {
    std::vector<std::size_t> s(dimension());
    std::size_t stride = 1;
    for (std::size_t i = dimension(); i-- > 0;) {
        s[i] = stride;
        stride *= axes_[i].size();
    }
    return s;
}

std::vector<std::size_t> GridPartition::cell_index(std::size_t flat_index) const {
    std::vector<std::size_t> idx(dimension());
    for (std::size_t i = dimension(); i-- > 0;) {
        const std::size_t k = axes_[i].size() - 1;
        idx[i] = flat_index % k;
        flat_index /= k;
    }
    return idx;
}

Rect GridPartition::cell(std::size_t flat_index) const {
    const auto idx = cell_index(flat_index);
    Point lo(dimension()), hi(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        lo[i] = axes_[i][idx[i]];
        hi[i] = axes_[i][idx[i] + 1];
    }
    return Rect(std::move(lo), std::move(hi));
}

Point GridPartition::cell_center(std::size_t flat_index) const {
    const auto idx = cell_index(flat_index);
    Point c(dimension());
    for (std::size_t i = 0; i < dimension(); ++i)
        c[i] = 0.5 * (axes_[i][idx[i]] + axes_[i][idx[i] + 1]);
    return c;
}

Point GridPartition::vertex(std::size_t flat_index) const {
    Point v(dimension());
    for (std::size_t i = dimension(); i-- > 0;) {
        const std::size_t k = axes_[i].size();
        v[i] = axes_[i][flat_index % k];
        flat_index /= k;
    }
    return v;
}

GridPartition refine(const GridPartition& partition, std::span<const double> point) {
    if (point.size() != partition.dimension())
        throw DomainError("refinement point has wrong dimension");
    if (!partition.rect().contains(point))
        throw DomainError("refinement point " +
                          format_point(Point(point.begin(), point.end())) +
                          " lies outside the partition");
    auto axes = partition.axes();
    for (std::size_t i = 0; i < axes.size(); ++i) {
        auto& a = axes[i];
        auto it = std::lower_bound(a.begin(), a.end(), point[i]);
        if (it == a.end() || *it != point[i]) a.insert(it, point[i]);
    }
    return GridPartition(std::move(axes));
}

GridSample::GridSample(GridPartition partition, std::vector<double> values)
    : partition_(std::move(partition)), values_(std::move(values)) {
    if (values_.size() != partition_.vertex_count())
        throw DomainError("grid sample has " + std::to_string(values_.size()) +
                          " values but the partition has " +
                          std::to_string(partition_.vertex_count()) + " vertices");
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (!std::isfinite(values_[k]))
            throw EvaluationError("grid sample value is not finite", partition_.vertex(k));
}

double GridSample::at(std::span<const std::size_t> index) const {
    const auto strides = partition_.vertex_strides();
    std::size_t flat = 0;
    for (std::size_t i = 0; i < index.size(); ++i) flat += index[i] * strides[i];
    return values_[flat];
}

} // namespace hkvar
