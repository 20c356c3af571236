#include "hkvar/func_source.hpp"

#include "hkvar/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>

namespace hkvar {

namespace {

struct OracleData {
    Oracle fn;
};

struct SampledData {
    GridSample sample;
    Interpolation policy;
    std::vector<std::size_t> strides;
};

// Index of the breakpoint equal to v, or npos.
std::size_t exact_index(const std::vector<double>& axis, double v) {
    auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.end() || *it != v) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(it - axis.begin());
}

// Cell k with axis[k] <= v <= axis[k+1].
std::size_t cell_of(const std::vector<double>& axis, double v) {
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    std::size_t k = static_cast<std::size_t>(it - axis.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, axis.size() - 2);
}

double eval_sampled(const SampledData& s, std::span<const double> x) {
    const auto& part = s.sample.partition();
    const auto& values = s.sample.values();
    const std::size_t n = part.dimension();
    switch (s.policy) {
    case Interpolation::VertexOnly: {
        std::size_t flat = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = exact_index(part.axis(i), x[i]);
            if (k == static_cast<std::size_t>(-1))
                throw DomainError("sampled source queried off its grid vertices at " +
                                  format_point(Point(x.begin(), x.end())));
            flat += k * s.strides[i];
        }
        return values[flat];
    }
    case Interpolation::Nearest: {
        std::size_t flat = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = part.axis(i);
            const std::size_t k = cell_of(a, x[i]);
            const std::size_t pick = (x[i] - a[k] <= a[k + 1] - x[i]) ? k : k + 1;
            flat += pick * s.strides[i];
        }
        return values[flat];
    }
    case Interpolation::Multilinear: {
        std::array<std::size_t, kMaxDimension> base{};
        std::array<double, kMaxDimension> t{};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = part.axis(i);
            const std::size_t k = cell_of(a, x[i]);
            base[i] = k;
            t[i] = (x[i] - a[k]) / (a[k + 1] - a[k]);
        }
        double acc = 0.0;
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            double w = 1.0;
            std::size_t flat = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool up = (bits >> i) & 1u;
                w *= up ? t[i] : 1.0 - t[i];
                flat += (base[i] + (up ? 1 : 0)) * s.strides[i];
            }
            if (w != 0.0) acc += w * values[flat];
        }
        return acc;
    }
    }
    return 0.0;
}

} // namespace

struct FuncSource::Impl {
    std::size_t n;
    std::optional<Rect> domain;
    std::variant<OracleData, SampledData> data;
};

FuncSource::FuncSource(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

FuncSource FuncSource::oracle(std::size_t n, Oracle fn, std::optional<Rect> domain) {
    if (n == 0 || n > kMaxDimension) throw DomainError("oracle dimension out of range");
    if (!fn) throw DomainError("oracle is empty");
    if (domain && domain->dimension() != n)
        throw DomainError("oracle domain dimension does not match");
    return FuncSource(std::make_shared<const Impl>(Impl{n, std::move(domain), OracleData{std::move(fn)}}));
}

FuncSource FuncSource::sampled(GridSample sample, Interpolation policy) {
    const std::size_t n = sample.dimension();
    Rect dom = sample.partition().rect();
    auto strides = sample.partition().vertex_strides();
    return FuncSource(std::make_shared<const Impl>(
        Impl{n, std::move(dom), SampledData{std::move(sample), policy, std::move(strides)}}));
}

std::size_t FuncSource::dimension() const noexcept { return impl_->n; }

const std::optional<Rect>& FuncSource::domain() const noexcept { return impl_->domain; }

bool FuncSource::is_sampled() const noexcept {
    return std::holds_alternative<SampledData>(impl_->data);
}

const GridSample* FuncSource::sample() const noexcept {
    if (auto* s = std::get_if<SampledData>(&impl_->data)) return &s->sample;
    return nullptr;
}

Interpolation FuncSource::interpolation() const noexcept {
    if (auto* s = std::get_if<SampledData>(&impl_->data)) return s->policy;
    return Interpolation::Multilinear;
}

double FuncSource::operator()(std::span<const double> x) const {
    if (x.size() != impl_->n)
        throw DomainError("query has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(impl_->n));
    if (impl_->domain && !impl_->domain->contains(x))
        throw DomainError("query " + format_point(Point(x.begin(), x.end())) +
                          " lies outside the function's domain");
    if (auto* o = std::get_if<OracleData>(&impl_->data)) return o->fn(x);
    return eval_sampled(std::get<SampledData>(impl_->data), x);
}

GridSample FuncSource::tabulate(const GridPartition& partition) const {
    if (partition.dimension() != impl_->n)
        throw DomainError("partition dimension does not match the function");
    const std::size_t n = partition.dimension();
    const std::size_t count = partition.vertex_count();
    std::vector<double> values(count);
    std::vector<std::size_t> idx(n, 0);
    std::array<double, kMaxDimension> x{};
    for (std::size_t flat = 0; flat < count; ++flat) {
        for (std::size_t i = 0; i < n; ++i) x[i] = partition.axis(i)[idx[i]];
        const double v = (*this)(std::span<const double>(x.data(), n));
        if (!std::isfinite(v))
            throw EvaluationError("non-finite function value at " +
                                      format_point(Point(x.begin(), x.begin() + n)),
                                  Point(x.begin(), x.begin() + n));
        values[flat] = v;
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < partition.axis(i).size()) break;
            idx[i] = 0;
        }
    }
    return GridSample(partition, std::move(values));
}

FuncSource restrict_to(const FuncSource& f, const Rect& rect) {
    if (rect.dimension() != f.dimension()) throw DomainError("rectangle dimension does not match the function");
    if (f.domain() && !f.domain()->contains(rect))
        throw DomainError("rectangle lies outside the function's domain");
    if (f.is_sampled()) return f;
    return FuncSource::oracle(f.dimension(), [f](std::span<const double> x) { return f(x); }, rect);
}

} // namespace hkvar
