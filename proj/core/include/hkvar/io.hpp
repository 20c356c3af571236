#pragma once

#include "hkvar/geometry.hpp"
#include "hkvar/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hkvar {

/// Text grid format:
///
///   hkgrid 1
///   dim <n>
///   axis <i> <count>
///   <count breakpoints>          (one axis block per dimension)
///   values <N>
///   <N values, row-major, last axis fastest>
///
/// Numbers are written with 17 significant digits, so a round trip is exact.
/// Blank lines and lines starting with '#' are ignored.
GridSample read_grid(std::istream& in);
GridSample read_grid(const std::string& path);
void write_grid(const GridSample& sample, std::ostream& out);
void write_grid(const GridSample& sample, const std::string& path);

enum class ReportFormat { JSON, CSV };

/// Reports are sorted by (theorem, function) before writing.
void emit_report(std::vector<TheoremReport> reports, ReportFormat format, std::ostream& out);
/// Throws FormatError naming the path when the file cannot be written.
void emit_report(std::vector<TheoremReport> reports, ReportFormat format, const std::string& path);

/// The JSON document for reports, as written by emit_report.
std::string reports_to_json(std::vector<TheoremReport> reports);

inline constexpr int kReportSchemaVersion = 1;

} // namespace hkvar
