#pragma once

#include "hkvar/verify.hpp"
#include "hkvar/zoo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hkvar {

/// Settings for a batch of theorem checks over zoo instances.
struct VerifyConfig {
    /// Theorem ids to run; empty runs every theorem.
    std::vector<std::string> theorems;
    /// Zoo ids or instance labels; empty runs zoo_default_instances(), limited
    /// to rect's dimension when rect is set.
    std::vector<std::string> functions;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    /// Cells per axis: one entry broadcasts, otherwise one per axis.
    std::vector<std::size_t> grid;
    std::optional<Rect> rect;
    std::optional<double> tol;
    std::optional<double> rtol;
    std::optional<double> atol;
    RefinePolicy policy;
};

std::vector<std::string> theorem_ids();

/// Whether the theorem applies to the entry given its tags and metadata.
bool theorem_applies(const std::string& theorem, const ZooEntry& entry);

/// Runs one theorem on one zoo instance. Precondition failures produce a
/// failing report with a "precondition" note instead of throwing.
TheoremReport run_theorem(const std::string& theorem, const ZooFunction& fn,
                          const VerifyConfig& config);

/// Every applicable (theorem, function) pair, sorted by theorem then
/// function. Throws std::invalid_argument for unknown theorem or function ids.
std::vector<TheoremReport> run_verification(const VerifyConfig& config);

/// Verification grid cells per axis used when no override is given.
std::size_t default_cells_per_axis(std::size_t n);

} // namespace hkvar
