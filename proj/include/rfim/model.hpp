#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rfim/disorder.hpp"
#include "rfim/lattice.hpp"

namespace rfim {

/// Critical temperature 2 / ln(1 + sqrt 2), evaluated in double precision.
inline const double kTc = 2.0 / std::log1p(std::sqrt(2.0));

/// Samplers and specs reject temperatures below this floor.
constexpr double kMinTemperature = 1e-3;

/// FK edge parameter p = 1 - exp(-2/T).
inline double fk_p(double T) { return -std::expm1(-2.0 / T); }
/// Temperature at which the FK parameter equals p.
inline double temperature_for_p(double p) { return -2.0 / std::log1p(-p); }
/// t^2 = 1 / (exp(2/T) - 1) = (1 - p) / p.
inline double t_squared(double T) { return 1.0 / std::expm1(2.0 / T); }
/// lambda = (2 sinh(1/T))^(1/2).
inline double lambda_weight(double T) { return std::sqrt(2.0 * std::sinh(1.0 / T)); }

enum class BoundaryKind { plus, minus, free, explicit_spins };

/// Boundary condition on the interior boundary of a region. Explicit spins are
/// listed in the order of Region::boundary(). A free boundary leaves the
/// boundary vertices as ordinary spins without field.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::plus;
  std::vector<std::int8_t> spins;

  static BoundaryCondition plus() { return {BoundaryKind::plus, {}}; }
  static BoundaryCondition minus() { return {BoundaryKind::minus, {}}; }
  static BoundaryCondition free() { return {BoundaryKind::free, {}}; }
  static BoundaryCondition explicit_spins(std::vector<std::int8_t> s) {
    return {BoundaryKind::explicit_spins, std::move(s)};
  }
  /// Spin on the k-th boundary vertex (0 for a free boundary).
  std::int8_t value(std::size_t k) const;
  BoundaryCondition flipped() const;
};

/// Everything that defines one Gibbs, FK or extended measure.
struct GibbsSpec {
  double T = kTc;
  Region region = Region::box(1);
  BoundaryCondition boundary = BoundaryCondition::plus();
  Field field = Field(Region::box(1));
  double eps = 0.0;

  GibbsSpec() = default;
  GibbsSpec(Region r, double temperature, BoundaryCondition bc, double strength = 0.0);
  GibbsSpec(Region r, double temperature, BoundaryCondition bc, Field f, double strength);

  /// Throws std::invalid_argument when the spec is inconsistent.
  void validate() const;
  /// Same spec with boundary and field signs reversed.
  GibbsSpec flipped() const;
};

/// The Ising graph behind a measure: sites carry a spin, fixed sites carry the
/// boundary condition, and edges are nearest-neighbour pairs with at least one
/// free endpoint (pairs of fixed sites contribute only a constant).
struct Model {
  int n = 0;
  std::vector<std::int8_t> fixed;
  std::vector<double> h;
  std::vector<std::array<int, 2>> edges;
  double T = kTc;
  std::optional<Region> region;

  std::vector<int> free_sites;
  std::vector<int> free_pos;
  std::vector<int> adj_start;
  std::vector<int> adj_site;
  std::vector<int> adj_edge;

  int free_count() const { return static_cast<int>(free_sites.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int site_count() const { return n + edge_count(); }
  double beta() const { return 1.0 / T; }
  bool is_free(int v) const { return fixed[v] == 0; }

  /// Sum of neighbouring fixed spins of v.
  double fixed_neighbor_sum(int v) const;
  /// -H/T for a full vertex configuration.
  double log_weight(const std::vector<std::int8_t>& spins) const;
  /// Spin configuration with fixed sites set and free sites taken from mask
  /// bits (bit k set means free_sites[k] is +1).
  std::vector<std::int8_t> spins_from_mask(std::uint64_t mask) const;
};

/// Assemble a model from raw data; validates and builds adjacency.
Model make_model(int n, std::vector<std::int8_t> fixed, std::vector<std::array<int, 2>> edges,
                 std::vector<double> h, double T);

/// Compile a Gibbs spec into its model graph (h already multiplied by eps).
Model compile(const GibbsSpec& spec);

/// Merge the given sites into one new free site with zero field. Edges among
/// the merged sites are discarded; parallel edges to the new site are kept.
Model contract_free_point(const Model& model, const std::vector<int>& sites);

/// Vertex spins plus edge spins: entries [0, n) are vertices, [n, n+E) edges.
struct ExtendedConfig {
  std::vector<std::int8_t> s;
  std::int8_t vertex(int v) const { return s[v]; }
  std::int8_t edge(int n, int e) const { return s[n + e]; }
};

/// Open/closed indicator per model edge.
using BondConfig = std::vector<char>;

}  // namespace rfim
