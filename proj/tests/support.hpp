#pragma once

#include <hkvar/hkvar.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace hkvar::testing {

inline double uniform(std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t count) {
    return static_cast<std::size_t>(gen() % count);
}

/// Sum of up to `terms` monomials c * prod x_i^k_i with k_i in 0..3.
inline FuncSource random_polynomial(std::size_t n, std::mt19937_64& gen, std::size_t terms = 4) {
    struct Monomial {
        double coef;
        std::vector<int> powers;
    };
    auto monomials = std::make_shared<std::vector<Monomial>>();
    for (std::size_t t = 0; t < terms; ++t) {
        Monomial m{uniform(gen, -2.0, 2.0), std::vector<int>(n)};
        for (auto& p : m.powers) p = static_cast<int>(uniform_index(gen, 4));
        monomials->push_back(std::move(m));
    }
    return FuncSource::oracle(n, [monomials](std::span<const double> x) {
        double s = 0.0;
        for (const auto& m : *monomials) {
            double v = m.coef;
            for (std::size_t i = 0; i < x.size(); ++i) v *= std::pow(x[i], m.powers[i]);
            s += v;
        }
        return s;
    });
}

inline Rect random_rect(std::size_t n, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    Point a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform(gen, lo, hi), v = uniform(gen, lo, hi);
        a[i] = std::min(u, v);
        b[i] = std::max(u, v);
        if (a[i] == b[i]) b[i] = a[i] + 0.5;
    }
    return Rect(std::move(a), std::move(b));
}

/// Partition of rect with 1..max_cuts random interior breakpoints per axis.
inline GridPartition random_partition(const Rect& rect, std::mt19937_64& gen, std::size_t max_cuts = 3) {
    std::vector<std::vector<double>> axes(rect.dimension());
    for (std::size_t i = 0; i < rect.dimension(); ++i) {
        auto& a = axes[i];
        a.push_back(rect.lo()[i]);
        const std::size_t cuts = 1 + uniform_index(gen, max_cuts);
        for (std::size_t k = 0; k < cuts; ++k) a.push_back(uniform(gen, rect.lo()[i], rect.hi()[i]));
        a.push_back(rect.hi()[i]);
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return GridPartition(std::move(axes));
}

inline FuncSource product_oracle(std::size_t n, double sign = 1.0) {
    return FuncSource::oracle(n, [sign](std::span<const double> x) {
        double v = sign;
        for (double xi : x) v *= xi;
        return v;
    });
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

} // namespace hkvar::testing
