#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lcq/convex_function.hpp"

namespace lcq {

/// Parses a function spec:
///   {"kind": "quadratic", "Q": [[..]], "b": [..], "c": 0}   (Q defaults to I when "dim" is given)
///   {"kind": "indicator_ball", "dim": n, "radius": R}
///   {"kind": "indicator_box", "halfwidths": [..]}
///   {"kind": "norm_multiple", "dim": n, "a": a}
///   {"kind": "weighted_l1", "weights": [..]}
///   {"kind": "grid", "file": "values.csv"}
/// Every kind accepts an additive "offset" (quadratics use "c"). Relative
/// grid paths resolve against `base_dir`. Throws InvalidArgument on
/// malformed input.
ConvexFunction function_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});
ConvexFunction load_function(const std::filesystem::path& spec_path);

/// Spec JSON for u; grid forms reference `grid_file`.
std::string function_to_json(const ConvexFunction& u, const std::string& grid_file = {});

/// Grid sidecar: a header line "n,lo_1,hi_1,count_1,...", then one line per
/// lattice row (last axis varying fastest) with "inf" for masked nodes.
void write_grid_csv(const GridSamples& samples, std::ostream& out);
ConvexFunction read_grid_csv(std::istream& in, GridCheck check = GridCheck::convexity);

/// Writes spec_path and, for grid forms, a sidecar CSV next to it.
void save_function(const ConvexFunction& u, const std::filesystem::path& spec_path);

}  // namespace lcq
