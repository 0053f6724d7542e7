#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfim/lattice.hpp"

namespace rfim {

/// Quenched field on a region. Values live on interior vertices only and are
/// stored unscaled; the strength eps multiplies them when energies are built.
class Field {
 public:
  Field() = default;
  /// All-zero field on the interior of the region.
  explicit Field(Region region);

  const Region& region() const { return region_; }
  /// h_v for a vertex index of the region (0 on boundary vertices).
  double at(int v) const { return values_[v]; }
  void set(int v, double h);
  const std::vector<double>& values() const { return values_; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }
  void set_provenance(std::uint64_t seed, std::uint64_t replica) {
    seed_ = seed;
    replica_ = replica;
  }

  friend bool operator==(const Field& a, const Field& b) {
    return a.region_ == b.region_ && a.values_ == b.values_;
  }

 private:
  Region region_ = Region::box(1);
  std::vector<double> values_ = std::vector<double>(9, 0.0);
  std::uint64_t seed_ = 0;
  std::uint64_t replica_ = 0;
};

/// Standard normal value attached to a lattice site for a (seed, replica) pair.
/// The value depends on the site's coordinates, not on the region, so nested
/// regions drawn with the same seed share their fields.
double site_normal(std::uint64_t seed, std::uint64_t replica, Coord c);

/// i.i.d. standard normals on the interior vertices, reproducible from the seed.
Field sample_field(const Region& region, std::uint64_t seed, std::uint64_t replica = 0);

/// Constant field h on every interior vertex.
Field constant_field(const Region& region, double h);

/// Field with signs flipped on the vertex set A (interior vertex indices).
Field flip_field(const Field& field, const std::vector<int>& a);

/// CSV with a header recording seed, replica and region; values use 17
/// significant digits so the round trip is exact.
void write_field_csv(std::ostream& out, const Field& field);
Field read_field_csv(std::istream& in);

}  // namespace rfim
