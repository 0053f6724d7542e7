#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rfim {

/// Lattice coordinates on Z^2.
struct Coord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  /// Row-major order: by y, then by x.
  friend std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline int linf(Coord a, Coord b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

inline bool adjacent(Coord a, Coord b) {
  const int dx = a.x - b.x;
  const int dy = a.y - b.y;
  return dx * dx + dy * dy == 1;
}

enum class RegionKind { box, annulus, rect };

constexpr int kMaxRegionRadius = 1 << 14;

/// A finite sublattice with its interior boundary. Vertices are indexed in
/// row-major order (y ascending, then x ascending) and the index is computed
/// arithmetically, so nothing proportional to the area is stored.
///
///   box(N)        = [-N,N]^2 around the center; boundary is the ring at radius N.
///   annulus(M,N)  = box(N) minus box(M); boundary is ring N plus ring M+1.
///                   M = -1 denotes the box with the center as an inner boundary.
///   rect(a,b)     = [-a,a] x [-b,b]; boundary is its perimeter.
class Region {
 public:
  static Region box(int n, Coord center = {});
  static Region annulus(int m, int n, Coord center = {});
  static Region rect(int a, int b, Coord center = {});

  RegionKind kind() const { return kind_; }
  /// (N) for box, (M,N) for annulus, (a,b) for rect.
  std::array<int, 2> params() const { return params_; }
  Coord center() const { return center_; }
  std::string describe() const;

  int size() const { return size_; }
  Coord coord(int index) const;
  /// Index of c, or -1 when c is outside the region.
  int index(Coord c) const;
  bool contains(Coord c) const { return index(c) >= 0; }
  std::vector<Coord> vertices() const;

  bool is_boundary(int index) const { return is_boundary_coord(coord(index)); }
  bool is_boundary_coord(Coord c) const;
  /// Interior boundary vertices, row-major.
  const std::vector<int>& boundary() const { return boundary_; }
  /// Vertices not on the boundary, row-major.
  std::vector<int> interior() const;
  int interior_count() const { return size_ - static_cast<int>(boundary_.size()); }

  /// Up to four in-region neighbours of a vertex.
  int neighbors(int index, std::array<int, 4>& out) const;

  friend bool operator==(const Region& a, const Region& b) {
    return a.kind_ == b.kind_ && a.params_ == b.params_ && a.center_ == b.center_;
  }

 private:
  Region(RegionKind kind, std::array<int, 2> params, Coord center);
  int row_start(int row) const;
  int row_width(int row) const;

  RegionKind kind_;
  std::array<int, 2> params_;
  Coord center_;
  int half_w_ = 0;
  int half_h_ = 0;
  int hole_ = -1;
  int size_ = 0;
  std::vector<int> boundary_;
};

/// build_region(kind, params, center) with params (N), (M,N) or (a,b).
Region build_region(RegionKind kind, const std::vector<int>& params, Coord center = {});

/// The vertices of the l-infinity ring of radius k around c (k = 0 gives c).
std::vector<Coord> ring(Coord c, int k);

/// Edge site of the extended graph: a nearest-neighbour pair with at least one
/// endpoint in the region. Endpoint indices are -1 outside the region.
struct EdgeSite {
  Coord a;
  Coord b;
  int ia = -1;
  int ib = -1;
  bool internal() const { return ia >= 0 && ib >= 0; }
};

/// The graph obtained by putting a site on the midpoint of every edge.
/// Sites [0, n) are vertices, sites [n, n + E) are edges.
class ExtendedGraph {
 public:
  explicit ExtendedGraph(Region region);

  const Region& region() const { return region_; }
  int vertex_count() const { return region_.size(); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int site_count() const { return vertex_count() + edge_count(); }
  int internal_edge_count() const { return internal_edges_; }
  const std::vector<EdgeSite>& edges() const { return edges_; }
  const EdgeSite& edge(int e) const { return edges_[e]; }
  /// Edge index for an unordered nearest-neighbour pair, or -1.
  int edge_index(Coord a, Coord b) const;
  /// Edge sites incident to vertex site v.
  const std::vector<int>& incident(int v) const { return incident_[v]; }

  /// Extended boundary of a site subset: edges in the subset with an endpoint
  /// outside it, plus vertices in the subset incident to an edge outside it.
  std::vector<int> extended_boundary(const std::vector<char>& in_subset) const;

 private:
  Region region_;
  std::vector<EdgeSite> edges_;
  std::vector<std::vector<int>> incident_;
  int internal_edges_ = 0;
};

ExtendedGraph extend(const Region& region);

/// A point of (Z/2)^2 stored as doubled integer coordinates.
struct HalfCoord {
  std::int32_t x2 = 0;
  std::int32_t y2 = 0;
  friend bool operator==(const HalfCoord&, const HalfCoord&) = default;
  friend auto operator<=>(const HalfCoord&, const HalfCoord&) = default;
};

/// A unit segment between two points of the primal or the dual lattice.
struct Segment {
  HalfCoord a;
  HalfCoord b;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Canonical segment of a primal nearest-neighbour edge; rejects other pairs.
Segment primal_segment(Coord a, Coord b);
/// The segment crossing s at its midpoint (rotation by a quarter turn).
/// Applied to a primal edge it gives the dual edge; dual(dual(s)) == s.
Segment dual(const Segment& s);
/// Dual edge crossing the primal edge (a, b).
Segment dual_site(Coord a, Coord b);
/// Dual vertex in the unit square with lower-left corner c.
HalfCoord dual_vertex(Coord lower_left);

/// Top-to-bottom crossing of a rectangle by open internal edges.
bool primal_vertical_crossing(const ExtendedGraph& rect, const std::vector<char>& open);
/// Left-to-right crossing by dual edges whose primal edge is closed.
bool dual_horizontal_crossing(const ExtendedGraph& rect, const std::vector<char>& open);

}  // namespace rfim
