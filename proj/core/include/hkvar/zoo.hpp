#pragma once

#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hkvar {

enum class ZooTag : unsigned {
    JointlyMonotone = 1u << 0,
    AC = 1u << 1,
    Singular = 1u << 2,
    AdditiveSeparable = 1u << 3,
    Series = 1u << 4,
};

std::string to_string(ZooTag tag);

/// Point mass for atom CDFs.
struct Atom {
    Point location;
    double mass;
};

/// Constructor parameters. Fields a family does not use are ignored.
struct ZooParams {
    /// 0 selects the family's default dimension.
    std::size_t n = 0;
    /// Ternary digits used by the Cantor function.
    int depth = 20;
    /// Atom list for atom_cdf; empty selects a unit mass at the centre.
    std::vector<Atom> atoms;
    /// Value of the constant family and of the constant density.
    double constant = 3.0;
    /// Number of series terms; 0 applies the tail-bound rule with series_atol.
    std::size_t terms = 0;
    double series_atol = 1e-9;
};

/// Ground truth and metadata for one zoo function on its reference rectangle.
struct ZooEntry {
    std::string id;
    /// Instance label, e.g. "coordinate_product[n=3]"; equals id for the
    /// family default.
    std::string label;
    std::string description;
    std::size_t dimension = 0;
    unsigned tags = 0;
    Rect rect;
    std::optional<double> known_increment;
    std::optional<double> known_variation;
    /// Closed-form joint derivative where it exists almost everywhere.
    std::function<double(std::span<const double>)> derivative;
    std::string derivative_id;

    /// Density families: the integrand whose antiderivative is the zoo function.
    std::optional<FuncSource> density;
    /// Distance from x to the density's discontinuity set; points closer than
    /// a margin are not continuity points.
    std::function<double(std::span<const double>)> discontinuity_distance;
    /// Axis breakpoints the quadrature grid must contain so the density is
    /// smooth on every quadrature cell.
    std::vector<double> density_breaks;

    /// Series families: the individual terms and sup-norm tail bound after K terms.
    std::vector<FuncSource> series_terms;
    std::function<double(std::size_t)> tail_bound;

    /// Per-check tolerances declared by the family.
    double fubini_tol = 1e-6;
    double integral_tol = 1e-4;
    double l1_tol = 2e-2;

    bool has(ZooTag t) const noexcept { return (tags & static_cast<unsigned>(t)) != 0; }
};

struct ZooFunction {
    FuncSource f;
    ZooEntry entry;
};

/// Builds a family member. Throws std::invalid_argument for unknown ids and
/// DomainError for invalid parameters.
ZooFunction zoo_build(const std::string& id, const ZooParams& params = {});

/// Family ids in display order.
std::vector<std::string> zoo_ids();

/// The instances exercised by the verification batch: every family at its
/// default parameters plus the three-dimensional coordinate product.
std::vector<ZooFunction> zoo_default_instances();

/// Devil's staircase truncated after depth ternary digits; exact integer
/// arithmetic, so results are identical across platforms.
double cantor_function(double x, int depth = 20);

} // namespace hkvar
