#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

namespace hkvar {

/// Corner enumeration costs 2^n evaluations; dimensions above this are refused.
inline constexpr std::size_t kMaxDimension = 12;

using Point = std::vector<double>;

/// Axis-aligned closed rectangle [lo, hi] in R^n. Degenerate sides are allowed.
class Rect {
public:
    Rect() = default;
    Rect(Point lo, Point hi);

    static Rect unit(std::size_t n);

    std::size_t dimension() const noexcept { return lo_.size(); }
    const Point& lo() const noexcept { return lo_; }
    const Point& hi() const noexcept { return hi_; }
    double side(std::size_t i) const noexcept { return hi_[i] - lo_[i]; }
    double min_side() const noexcept;
    double volume() const noexcept;

    bool is_degenerate() const noexcept;
    bool contains(std::span<const double> x) const noexcept;
    bool contains(const Rect& other) const noexcept;
    Point midpoint() const;

    friend bool operator==(const Rect&, const Rect&) = default;

private:
    Point lo_;
    Point hi_;
};

/// One vertex selector eps in {0,1}^n, stored as bits (axis 0 least significant).
struct CornerMask {
    std::uint32_t bits = 0;
    int sign = 1;

    bool bit(std::size_t axis) const noexcept { return (bits >> axis) & 1u; }
};

/// (-1)^(n + popcount(bits)).
int corner_sign(std::size_t n, std::uint32_t bits) noexcept;

struct Corner {
    CornerMask mask;
    Point point;
};

/// All 2^n corners of rect in binary counting order of the mask.
std::vector<Corner> corners(const Rect& rect);

/// Direction pattern for quadrant derivatives; every entry is -1 or +1.
class QuadrantSign {
public:
    explicit QuadrantSign(std::vector<int> dirs);

    static QuadrantSign positive(std::size_t n);
    /// All 2^n patterns, ordered like CornerMask bits (bit set means -1).
    static std::vector<QuadrantSign> all(std::size_t n);

    std::size_t dimension() const noexcept { return dirs_.size(); }
    const std::vector<int>& dirs() const noexcept { return dirs_; }
    int operator[](std::size_t i) const noexcept { return dirs_[i]; }

    friend bool operator==(const QuadrantSign&, const QuadrantSign&) = default;

private:
    std::vector<int> dirs_;
};

/// Tensor-product partition of a rectangle: per-axis strictly increasing breakpoints.
/// Vertices and cells are indexed row-major (last axis varies fastest).
class GridPartition {
public:
    explicit GridPartition(std::vector<std::vector<double>> axes);

    /// counts[i] equal cells along axis i.
    static GridPartition uniform(const Rect& rect, std::span<const std::size_t> counts);
    static GridPartition uniform(const Rect& rect, std::size_t per_axis);
    /// Single cell equal to rect.
    static GridPartition identity(const Rect& rect);

    std::size_t dimension() const noexcept { return axes_.size(); }
    const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }
    const std::vector<double>& axis(std::size_t i) const noexcept { return axes_[i]; }
    Rect rect() const;

    std::vector<std::size_t> cells_per_axis() const;
    std::vector<std::size_t> vertices_per_axis() const;
    std::size_t cell_count() const noexcept;
    std::size_t vertex_count() const noexcept;

    /// Flat vertex index strides (row-major).
    std::vector<std::size_t> vertex_strides() const;

    Rect cell(std::size_t flat_index) const;
    Point cell_center(std::size_t flat_index) const;
    /// Multi-index of a cell's lower vertex.
    std::vector<std::size_t> cell_index(std::size_t flat_index) const;
    Point vertex(std::size_t flat_index) const;

    friend bool operator==(const GridPartition&, const GridPartition&) = default;

private:
    std::vector<std::vector<double>> axes_;
};

/// Inserts each coordinate of point into its axis. Throws DomainError if the
/// point lies outside the partition's rectangle.
GridPartition refine(const GridPartition& partition, std::span<const double> point);

/// Lazy range over the cells of a partition in row-major order.
class SubrectRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = Rect;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = Rect;

        iterator() = default;
        iterator(const GridPartition* p, std::size_t i) : partition_(p), index_(i) {}

        Rect operator*() const { return partition_->cell(index_); }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        iterator operator++(int) {
            auto tmp = *this;
            ++index_;
            return tmp;
        }
        friend bool operator==(const iterator& a, const iterator& b) {
            return a.index_ == b.index_;
        }

    private:
        const GridPartition* partition_ = nullptr;
        std::size_t index_ = 0;
    };

    explicit SubrectRange(const GridPartition& p) : partition_(&p) {}

    iterator begin() const { return {partition_, 0}; }
    iterator end() const { return {partition_, partition_->cell_count()}; }
    std::size_t size() const { return partition_->cell_count(); }

private:
    const GridPartition* partition_;
};

inline SubrectRange subrects(const GridPartition& partition) { return SubrectRange(partition); }

/// Function values tabulated at every vertex of a partition.
class GridSample {
public:
    GridSample(GridPartition partition, std::vector<double> values);

    const GridPartition& partition() const noexcept { return partition_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t dimension() const noexcept { return partition_.dimension(); }

    double at(std::span<const std::size_t> index) const;
    double operator[](std::size_t flat) const noexcept { return values_[flat]; }

private:
    GridPartition partition_;
    std::vector<double> values_;
};

} // namespace hkvar
