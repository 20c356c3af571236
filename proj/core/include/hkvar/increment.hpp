#pragma once

#include "hkvar/func_source.hpp"
#include "hkvar/geometry.hpp"

#include <span>
#include <vector>

namespace hkvar {

/// Joint increment of f over rect as the signed 2^n corner sum, accumulated
/// with compensated summation. Returns exactly 0 for degenerate rectangles
/// without evaluating f. Throws EvaluationError on a non-finite corner value.
double joint_increment(const FuncSource& f, const Rect& rect);

/// Same quantity computed by the defining recursion: restrict the last
/// coordinate to hi and lo, take (n-1)-dimensional increments, subtract.
/// Kept as an independent check of joint_increment.
double joint_increment_recursive(const FuncSource& f, const Rect& rect);

/// x -> joint_increment(f, [origin, x]). Coordinates below origin give the
/// reoriented rectangle with the matching sign, so the map is defined on all
/// of f's domain.
FuncSource tilde_transform(const FuncSource& f, std::span<const double> origin);

/// Extends f beyond rect by clamping every coordinate into [lo, hi].
FuncSource clamp_extension(const FuncSource& f, const Rect& rect);

/// Per-cell joint increments of tabulated vertex values, row-major over cells.
std::vector<double> cell_increments(const GridSample& sample);

} // namespace hkvar
