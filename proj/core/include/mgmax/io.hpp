#pragma once

// JSON file formats.
//
// Instance:      {"nodes": [{"id", "parent" (id or null), "children": [ids]}],
//                 "mu": {leaf id: mass}, "nu": {leaf id: mass}}
// Coefficients:  {node id: scalar | {leaf id: value}}
// Sawyer:        instance fields plus "omega", "w" (leaf maps) and "alpha";
//                "mu" is optional and ignored.
// Decomposition: {"r", "start_depth", "generations": [[ids]],
//                 "blocks": [{"owner": id, "members": [ids]}]}
//
// Writers emit nodes in model order and leaf maps in leaf order with
// shortest round-trip doubles, so read/write round-trips bit-exactly.

#include <filesystem>
#include <string>
#include <string_view>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"
#include "mgmax/sawyer.hpp"
#include "mgmax/stopping.hpp"

namespace mgmax {

/// Files allow single-child nodes unless told otherwise.
inline constexpr BuildOptions kFileBuildOptions{1};

/// Throws ParseError on malformed JSON or a wrong shape, InvalidInput when
/// the tree itself is invalid.
DyadicModel read_model(std::string_view text, BuildOptions options = kFileBuildOptions);
std::string write_model(const DyadicModel& model);

CoefficientFamily read_coefficients(std::string_view text, const DyadicModel& model);
std::string write_coefficients(const CoefficientFamily& a, const DyadicModel& model);

/// p is not part of the file; it is supplied by the caller.
SawyerInstance read_sawyer(std::string_view text, double p, BuildOptions options = kFileBuildOptions);
std::string write_sawyer(const SawyerInstance& inst);

std::string write_decomposition(const StoppingDecomposition& d, const DyadicModel& model);

std::string read_file(const std::filesystem::path& path);
/// Throws std::runtime_error if the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mgmax
