#pragma once

#include "hkvar/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>

namespace hkvar {

/// Pure real-valued function of n coordinates.
using Oracle = std::function<double(std::span<const double>)>;

/// How a tabulated source answers queries that are not grid vertices.
enum class Interpolation {
    VertexOnly,  ///< off-vertex queries are a DomainError
    Nearest,
    Multilinear,
};

/// Either a callable oracle or a tabulated GridSample. Cheap to copy.
class FuncSource {
public:
    /// domain, when given, bounds the region where queries are legal.
    static FuncSource oracle(std::size_t n, Oracle fn, std::optional<Rect> domain = std::nullopt);
    static FuncSource sampled(GridSample sample, Interpolation policy = Interpolation::VertexOnly);

    std::size_t dimension() const noexcept;
    const std::optional<Rect>& domain() const noexcept;

    bool is_sampled() const noexcept;
    /// Null for oracles.
    const GridSample* sample() const noexcept;
    Interpolation interpolation() const noexcept;

    /// Raw evaluation. Throws DomainError outside the domain; the returned
    /// value is not checked for finiteness.
    double operator()(std::span<const double> x) const;

    /// Evaluates at every vertex of partition, throwing EvaluationError on a
    /// non-finite value.
    GridSample tabulate(const GridPartition& partition) const;

private:
    struct Impl;
    explicit FuncSource(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// f viewed on rect: an oracle whose domain is rect, so cube-based
/// estimates shrink to stay inside. Sampled sources are returned unchanged.
/// Throws DomainError when rect is not inside f's existing domain.
FuncSource restrict_to(const FuncSource& f, const Rect& rect);

} // namespace hkvar
