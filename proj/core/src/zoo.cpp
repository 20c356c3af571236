#include "hkvar/zoo.hpp"

#include "hkvar/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hkvar {

namespace {

constexpr unsigned kJM = static_cast<unsigned>(ZooTag::JointlyMonotone);
constexpr unsigned kAC = static_cast<unsigned>(ZooTag::AC);
constexpr unsigned kSingular = static_cast<unsigned>(ZooTag::Singular);
constexpr unsigned kSeparable = static_cast<unsigned>(ZooTag::AdditiveSeparable);
constexpr unsigned kSeries = static_cast<unsigned>(ZooTag::Series);

double heaviside(double t) { return t >= 0.0 ? 1.0 : 0.0; }

std::size_t dim_or(const ZooParams& p, std::size_t fallback) { return p.n == 0 ? fallback : p.n; }

void require_dim(const std::string& id, std::size_t n, std::size_t want) {
    if (n != want)
        throw DomainError(id + " is defined for n = " + std::to_string(want) + " only");
}

std::string label_for(const std::string& id, std::size_t n, std::size_t default_n) {
    return n == default_n ? id : id + "[n=" + std::to_string(n) + "]";
}

ZooEntry base_entry(const std::string& id, std::string description, std::size_t n,
                    unsigned tags, Rect rect, std::size_t default_n) {
    ZooEntry e;
    e.id = id;
    e.label = label_for(id, n, default_n);
    e.description = std::move(description);
    e.dimension = n;
    e.tags = tags;
    e.rect = std::move(rect);
    return e;
}

// Number of geometric terms 2^-i needed for the tail 2^-K to drop below atol.
std::size_t geometric_terms(double atol) {
    std::size_t k = 1;
    while (std::ldexp(1.0, -static_cast<int>(k)) >= atol && k < 60) ++k;
    return k;
}

// Rational jump location for the i-th atom series term (i >= 1), odd
// denominator so it never coincides with a dyadic cell centre.
std::pair<double, double> atom_series_point(std::size_t i) {
    const double den = static_cast<double>(2 * i + 1);
    const double q = static_cast<double>(1 + (i * i) % (2 * i)) / den;
    const double r = static_cast<double>(1 + (3 * i + 1) % (2 * i)) / den;
    return {q, r};
}

ZooFunction coordinate_product(const ZooParams& p, double sign) {
    const std::size_t n = dim_or(p, 2);
    const std::string id = sign > 0 ? "coordinate_product" : "neg_product";
    auto e = base_entry(id, sign > 0 ? "product of coordinates x1*...*xn"
                                     : "negated product of coordinates",
                        n, sign > 0 ? (kJM | kAC) : kAC, Rect::unit(n), 2);
    e.known_increment = sign;
    e.known_variation = 1.0;
    e.derivative = [sign](std::span<const double>) { return sign; };
    e.derivative_id = sign > 0 ? "1" : "-1";
    auto f = FuncSource::oracle(n, [sign](std::span<const double> x) {
        double v = sign;
        for (double xi : x) v *= xi;
        return v;
    });
    return {f, e};
}

ZooFunction power_product(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    auto e = base_entry("power_product", "product of squared coordinates x1^2*...*xn^2", n,
                        kJM | kAC, Rect::unit(n), 2);
    e.known_increment = 1.0;
    e.known_variation = 1.0;
    e.derivative = [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= 2.0 * xi;
        return v;
    };
    e.derivative_id = "prod(2*xi)";
    auto f = FuncSource::oracle(n, [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= xi * xi;
        return v;
    });
    return {f, e};
}

ZooFunction power_minus_product(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    require_dim("power_minus_product", n, 2);
    auto e = base_entry("power_minus_product", "x^2*y^2 - x*y", n, kAC, Rect::unit(2), 2);
    e.known_increment = 0.0;
    // Integral of |4xy - 1| over the unit square.
    e.known_variation = 0.375 + 0.5 * std::numbers::ln2;
    e.derivative = [](std::span<const double> x) { return 4.0 * x[0] * x[1] - 1.0; };
    e.derivative_id = "4*x*y-1";
    auto f = FuncSource::oracle(2, [](std::span<const double> x) {
        const double xy = x[0] * x[1];
        return xy * xy - xy;
    });
    return {f, e};
}

ZooFunction sin_product(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    const double half_pi = 0.5 * std::numbers::pi;
    auto e = base_entry("sin_product", "product of sin(xi) on [0, pi/2]^n", n, kJM | kAC,
                        Rect(Point(n, 0.0), Point(n, half_pi)), 2);
    e.known_increment = 1.0;
    e.known_variation = 1.0;
    e.derivative = [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= std::cos(xi);
        return v;
    };
    e.derivative_id = "prod(cos(xi))";
    auto f = FuncSource::oracle(n, [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= std::sin(xi);
        return v;
    });
    return {f, e};
}

ZooFunction additive_separable(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    auto e = base_entry("additive_separable", "exp(x1) + log(1 + x2) + x3 + ... + xn", n,
                        kJM | kAC | kSeparable, Rect::unit(n), 2);
    e.known_increment = 0.0;
    e.known_variation = 0.0;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0";
    auto f = FuncSource::oracle(n, [](std::span<const double> x) {
        double v = std::exp(x[0]);
        if (x.size() > 1) v += std::log1p(x[1]);
        for (std::size_t i = 2; i < x.size(); ++i) v += x[i];
        return v;
    });
    return {f, e};
}

ZooFunction constant(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    const double c = p.constant;
    if (!std::isfinite(c)) throw DomainError("constant must be finite");
    auto e = base_entry("constant", "constant function", n, kJM | kAC | kSeparable,
                        Rect::unit(n), 2);
    e.known_increment = 0.0;
    e.known_variation = 0.0;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0";
    return {FuncSource::oracle(n, [c](std::span<const double>) { return c; }), e};
}

ZooFunction kink(const ZooParams& p) {
    require_dim("kink", dim_or(p, 2), 2);
    // d^2|u|/dxdy = 2 delta(u) >= 0, so the kink is jointly monotone with all
    // of its mixed derivative concentrated on the line x + y = 1.
    auto e = base_entry("kink", "|x + y - 1|", 2, kJM | kSingular, Rect::unit(2), 2);
    e.known_increment = 2.0;
    e.known_variation = 2.0;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0 off x+y=1";
    return {FuncSource::oracle(2, [](std::span<const double> x) { return std::abs(x[0] + x[1] - 1.0); }),
            e};
}

ZooFunction cantor_product(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    if (p.depth < 1 || p.depth > 30) throw DomainError("cantor depth must lie in [1, 30]");
    const int depth = p.depth;
    auto e = base_entry("cantor_product", "product of Cantor functions c(x1)*...*c(xn)", n,
                        kJM | kSingular, Rect::unit(n), 2);
    if (depth != 20) e.label += "[depth=" + std::to_string(depth) + "]";
    e.known_increment = 1.0;
    e.known_variation = 1.0;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0 off the Cantor set";
    auto f = FuncSource::oracle(n, [depth](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= cantor_function(xi, depth);
        return v;
    });
    return {f, e};
}

ZooFunction atom_cdf(const ZooParams& p) {
    std::vector<Atom> atoms = p.atoms;
    const std::size_t n = atoms.empty() ? dim_or(p, 2) : atoms.front().location.size();
    if (atoms.empty()) atoms.push_back({Point(n, 0.5), 1.0});
    double inside = 0.0;
    for (const auto& a : atoms) {
        if (a.location.size() != n) throw DomainError("atoms must share one dimension");
        if (!(a.mass >= 0.0) || !std::isfinite(a.mass))
            throw DomainError("atom mass must be finite and non-negative");
        bool in = true;
        for (double c : a.location) in = in && c > 0.0 && c <= 1.0;
        if (in) inside += a.mass;
    }
    auto e = base_entry("atom_cdf", "distribution function of a finite list of point masses", n,
                        kJM | kSingular, Rect::unit(n), 2);
    e.known_increment = inside;
    e.known_variation = inside;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0 off the jump hyperplanes";
    auto f = FuncSource::oracle(n, [atoms](std::span<const double> x) {
        double v = 0.0;
        for (const auto& a : atoms) {
            double ind = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) ind *= heaviside(x[i] - a.location[i]);
            v += a.mass * ind;
        }
        return v;
    });
    return {f, e};
}

ZooFunction density_constant(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    const double c = p.constant;
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("density constant must be >= 0");
    auto e = base_entry("density_constant", "integral of a constant density over [0, x]", n,
                        kJM | kAC, Rect::unit(n), 2);
    e.known_increment = c;
    e.known_variation = c;
    e.derivative = [c](std::span<const double>) { return c; };
    e.derivative_id = "c";
    e.density = FuncSource::oracle(n, [c](std::span<const double>) { return c; });
    e.integral_tol = 1e-6;
    e.l1_tol = 1e-9;
    auto f = FuncSource::oracle(n, [c](std::span<const double> x) {
        double v = c;
        for (double xi : x) v *= xi;
        return v;
    });
    return {f, e};
}

ZooFunction density_linear(const ZooParams& p) {
    require_dim("density_linear", dim_or(p, 2), 2);
    auto e = base_entry("density_linear", "integral of the density x + y over [0, x]", 2,
                        kJM | kAC, Rect::unit(2), 2);
    e.known_increment = 1.0;
    e.known_variation = 1.0;
    e.derivative = [](std::span<const double> x) { return x[0] + x[1]; };
    e.derivative_id = "x+y";
    e.density = FuncSource::oracle(2, [](std::span<const double> x) { return x[0] + x[1]; });
    e.integral_tol = 1e-4;
    e.l1_tol = 2e-2;
    auto f = FuncSource::oracle(2, [](std::span<const double> x) {
        return 0.5 * x[0] * x[0] * x[1] + 0.5 * x[0] * x[1] * x[1];
    });
    return {f, e};
}

ZooFunction density_indicator(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    auto e = base_entry("density_indicator", "integral of the indicator of [0, 1/2]^n over [0, x]",
                        n, kJM | kAC, Rect::unit(n), 2);
    const double vol = std::pow(0.5, static_cast<double>(n));
    e.known_increment = vol;
    e.known_variation = vol;
    auto inside = [](std::span<const double> x) {
        for (double xi : x)
            if (xi < 0.0 || xi > 0.5) return 0.0;
        return 1.0;
    };
    e.derivative = inside;
    e.derivative_id = "1 on [0,1/2]^n";
    e.density = FuncSource::oracle(n, inside);
    e.discontinuity_distance = [](std::span<const double> x) {
        // Distance to the boundary of the box [0, 1/2]^n.
        double outside = 0.0, inside_margin = std::numeric_limits<double>::infinity();
        for (double xi : x) {
            const double o = std::max({0.0, -xi, xi - 0.5});
            outside += o * o;
            inside_margin = std::min({inside_margin, std::abs(xi), std::abs(xi - 0.5)});
        }
        return outside > 0.0 ? std::sqrt(outside) : inside_margin;
    };
    e.density_breaks = {0.5};
    e.integral_tol = 1e-6;
    e.l1_tol = 2e-2;
    auto f = FuncSource::oracle(n, [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= std::clamp(xi, 0.0, 0.5);
        return v;
    });
    return {f, e};
}

ZooFunction geometric_series(const ZooParams& p) {
    const std::size_t n = dim_or(p, 2);
    const std::size_t k = p.terms ? p.terms : geometric_terms(p.series_atol);
    auto e = base_entry("geometric_series", "sum of 2^-i * x1*...*xn", n, kJM | kAC | kSeries,
                        Rect::unit(n), 2);
    for (std::size_t i = 1; i <= k; ++i) {
        const double w = std::ldexp(1.0, -static_cast<int>(i));
        e.series_terms.push_back(FuncSource::oracle(n, [w](std::span<const double> x) {
            double v = w;
            for (double xi : x) v *= xi;
            return v;
        }));
    }
    const double total = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
    e.known_increment = total;
    e.known_variation = total;
    e.derivative = [total](std::span<const double>) { return total; };
    e.derivative_id = "1-2^-K";
    e.tail_bound = [](std::size_t K) { return std::ldexp(1.0, -static_cast<int>(K)); };
    e.fubini_tol = 1e-6;
    auto f = FuncSource::oracle(n, [total](std::span<const double> x) {
        double v = total;
        for (double xi : x) v *= xi;
        return v;
    });
    return {f, e};
}

ZooFunction jump_atom_series(const ZooParams& p) {
    require_dim("jump_atom_series", dim_or(p, 2), 2);
    const std::size_t k = p.terms ? p.terms : geometric_terms(p.series_atol);
    auto e = base_entry("jump_atom_series", "sum of 2^-i * H(x - q_i) * H(y - r_i), rational q_i, r_i",
                        2, kJM | kSingular | kSeries, Rect::unit(2), 2);
    std::vector<std::array<double, 3>> atoms;
    for (std::size_t i = 1; i <= k; ++i) {
        const auto [q, r] = atom_series_point(i);
        const double w = std::ldexp(1.0, -static_cast<int>(i));
        atoms.push_back({q, r, w});
        e.series_terms.push_back(FuncSource::oracle(2, [q, r, w](std::span<const double> x) {
            return w * heaviside(x[0] - q) * heaviside(x[1] - r);
        }));
    }
    const double total = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
    e.known_increment = total;
    e.known_variation = total;
    e.derivative = [](std::span<const double>) { return 0.0; };
    e.derivative_id = "0 off the jump lines";
    e.tail_bound = [](std::size_t K) { return std::ldexp(1.0, -static_cast<int>(K)); };
    e.fubini_tol = 1e-4;
    auto f = FuncSource::oracle(2, [atoms](std::span<const double> x) {
        double v = 0.0;
        for (const auto& a : atoms) v += a[2] * heaviside(x[0] - a[0]) * heaviside(x[1] - a[1]);
        return v;
    });
    return {f, e};
}

using Builder = ZooFunction (*)(const ZooParams&);

struct Family {
    const char* id;
    Builder build;
};

const std::vector<Family>& families() {
    static const std::vector<Family> list = {
        {"coordinate_product", [](const ZooParams& p) { return coordinate_product(p, 1.0); }},
        {"neg_product", [](const ZooParams& p) { return coordinate_product(p, -1.0); }},
        {"power_product", power_product},
        {"power_minus_product", power_minus_product},
        {"sin_product", sin_product},
        {"additive_separable", additive_separable},
        {"constant", constant},
        {"kink", kink},
        {"cantor_product", cantor_product},
        {"atom_cdf", atom_cdf},
        {"density_constant", density_constant},
        {"density_linear", density_linear},
        {"density_indicator", density_indicator},
        {"geometric_series", geometric_series},
        {"jump_atom_series", jump_atom_series},
    };
    return list;
}

} // namespace

std::string to_string(ZooTag tag) {
    switch (tag) {
    case ZooTag::JointlyMonotone: return "JointlyMonotone";
    case ZooTag::AC: return "AC";
    case ZooTag::Singular: return "Singular";
    case ZooTag::AdditiveSeparable: return "AdditiveSeparable";
    case ZooTag::Series: return "Series";
    }
    return "?";
}

__extension__ typedef unsigned __int128 u128;

double cantor_function(double x, int depth) {
    if (depth < 1 || depth > 30) throw DomainError("cantor depth must lie in [1, 30]");
    if (!(x > 0.0)) return 0.0;
    if (x >= 1.0) return 1.0;
    // floor(x * 3^depth) exactly: x = mant * 2^exp with a 53-bit integer mantissa.
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    const auto mant = static_cast<u128>(std::ldexp(frac, 53));
    u128 pow3 = 1;
    for (int k = 0; k < depth; ++k) pow3 *= 3;
    const u128 scaled = mant * pow3;
    const int shift = 53 - exp;  // x in (0, 1) gives exp <= 0, so shift >= 53
    const u128 m = shift >= 128 ? 0 : scaled >> shift;

    double value = 0.0;
    u128 place = pow3 / 3;
    u128 rest = m;
    double weight = 0.5;
    for (int k = 0; k < depth; ++k, weight *= 0.5) {
        const auto digit = static_cast<int>(rest / place);
        rest %= place;
        if (place > 1) place /= 3;
        if (digit == 1) return value + weight;
        if (digit == 2) value += weight;
    }
    return value;
}

std::vector<std::string> zoo_ids() {
    std::vector<std::string> ids;
    for (const auto& f : families()) ids.emplace_back(f.id);
    return ids;
}

ZooFunction zoo_build(const std::string& id, const ZooParams& params) {
    if (params.n > kMaxDimension) throw DomainError("zoo dimension exceeds the supported maximum");
    for (const auto& f : families())
        if (id == f.id) return f.build(params);
    throw std::invalid_argument("unknown zoo function '" + id + "'");
}

std::vector<ZooFunction> zoo_default_instances() {
    std::vector<ZooFunction> out;
    for (const auto& f : families()) out.push_back(f.build({}));
    ZooParams three;
    three.n = 3;
    out.push_back(zoo_build("coordinate_product", three));
    return out;
}

} // namespace hkvar
