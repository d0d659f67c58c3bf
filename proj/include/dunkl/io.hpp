#pragma once

// On-disk formats: the columnar grid file ("DUNKLGRID"), the cached transform
// plan ("DUNKLPLAN", keyed by grid hash), the sampled half-space field
// ("DUNKLHSF"), tent-decomposition JSON export, and radial symbol tables.

#include <string>

#include "dunkl/littlewood_paley.hpp"
#include "dunkl/multiplier.hpp"

namespace dunkl {

/// FNV-1a over the grid's defining payload (config + axis nodes/weights);
/// identifies a grid for plan-cache validity.
std::uint64_t grid_hash(const WeightedGrid& grid);

/// Columnar binary grid file: 16-byte magic header "DUNKLGRID\0" + version,
/// then the root-system config and per-axis node/quad-weight columns.
void save_grid(const WeightedGrid& grid, const std::string& path);
WeightedGrid load_grid(const std::string& path);

/// Plan cache file: header "DUNKLPLAN\0" + the grid hash, then ck and the
/// per-axis kernel matrices as little-endian 64-bit floats. load_plan
/// throws std::runtime_error if the stored hash does not match `grid`.
void save_plan(const TransformPlan& plan, const std::string& path);
TransformPlan load_plan(const std::string& path, const WeightedGrid& grid);

/// Build-or-load: looks for plan-<hash>.dunklplan under cache_dir, building
/// and caching on miss. Empty cache_dir builds without touching disk.
TransformPlan cached_plan(const WeightedGrid& grid, const std::string& cache_dir,
                          bool parallel = true);

/// Half-space field file: header "DUNKLHSF\0", the t-grid, one grid function
/// per level.
void save_field(const HalfSpaceField& field, const std::string& path);
HalfSpaceField load_field(const std::string& path);

/// Tent decomposition as JSON records {ball, lambda, l2, margins}.
void export_tent_decomposition(const WeightedGrid& grid,
                               const std::vector<double>& t_grid,
                               const TentDecomposition& dec, double p,
                               BallVolumeCache& volumes, const std::string& path);

/// Radial symbol from a sampled table file (JSON: ascending "xi" radii plus
/// "re"/"im" values), evaluated by linear interpolation and clamped at the
/// ends; supnorm is the largest tabulated modulus.
SymbolSpec load_table_symbol(const std::string& path);

/// Built-ins by name plus "table:path" dispatch.
SymbolSpec resolve_symbol(const std::string& label);

} // namespace dunkl
