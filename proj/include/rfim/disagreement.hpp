#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfim/model.hpp"

namespace rfim {

/// Two extended configurations on the same model graph: the first copy carries
/// the larger boundary condition by convention.
struct PairConfig {
  ExtendedConfig plus;
  ExtendedConfig minus;
  friend bool operator==(const PairConfig& a, const PairConfig& b) {
    return a.plus.s == b.plus.s && a.minus.s == b.minus.s;
  }
};

/// Neighbours of a site of the extended graph of a model: a vertex is adjacent
/// to its incident edge sites and an edge site to its two endpoints.
template <class F>
void for_each_site_neighbor(const Model& m, int site, F&& f) {
  if (site < m.n) {
    for (int k = m.adj_start[site]; k < m.adj_start[site + 1]; ++k) f(m.n + m.adj_edge[k]);
  } else {
    const auto& e = m.edges[site - m.n];
    f(e[0]);
    f(e[1]);
  }
}

/// Pre-disagreement set of a pair (or the anti-disagreement set when built with
/// anti = true) with its connected components on the extended graph.
class DisagreementSet {
 public:
  DisagreementSet(const Model& graph, const PairConfig& pair, bool anti = false);
  /// Build from an explicit membership mask over the extended sites.
  DisagreementSet(const Model& graph, std::vector<char> in_set);

  const Model& graph() const { return *graph_; }
  int site_count() const { return static_cast<int>(in_.size()); }
  bool contains(int site) const { return in_[site] != 0; }
  const std::vector<char>& mask() const { return in_; }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// Component label of a site, or -1 when the site is outside the set.
  int component(int site) const { return label_[site]; }
  int component_count() const { return components_; }
  /// Sites of one component, ascending.
  std::vector<int> component_sites(int label) const;

  /// Union of the components meeting S (sites ascending).
  std::vector<int> anchored(const std::vector<int>& s) const;
  /// Membership mask of the anchored set.
  std::vector<char> anchored_mask(const std::vector<int>& s) const;
  /// True when some site of A and some site of B lie in one component.
  bool connected(const std::vector<int>& a, const std::vector<int>& b) const;

 private:
  void label_components();

  const Model* graph_;
  std::vector<char> in_;
  std::vector<int> label_;
  int count_ = 0;
  int components_ = 0;
};

/// Sites [0, n) of the extended graph whose vertex lies on the l-infinity ring of
/// radius k around the region centre.
std::vector<int> ring_sites(const Model& m, int k);
/// Fixed vertices of the model that lie on the outer ring of its region.
std::vector<int> outer_boundary_sites(const Model& m);

enum class PairEventKind {
  origin_disagreement,
  hcross,
  con,
  con2,
  around,
  daround,
  fractal,
};

/// A pair event with its geometry, in coordinates relative to the region centre.
///   origin_disagreement  o lies in the component of the outer boundary
///   hcross(a, b)         left and right sides of R(a,b) joined inside R(a,b)
///   con(m1, m2)          ring m1+1 meets the component of ring m2
///   con2(m1, m2)         two crossing clusters from ring m1+1 to ring m2, taken
///                        in the set with the vertices of both rings removed
///   around(u, m)         a connected circuit of the set in the annulus (m, 2m] at u
///   daround(u, m)        as around, using the boundary-anchored set
///   fractal(alpha, n, m) a boundary-anchored crossing from ring n/8+1 to ring n
///                        whose shortest witness meets at most (n/m)^(1+alpha)
///                        m-boxes centred in the annulus (n/4, n/2]
struct PairEvent {
  PairEventKind kind = PairEventKind::origin_disagreement;
  int a = 0;
  int b = 0;
  Coord u{};
  double alpha = 0.0;

  static PairEvent origin() { return {}; }
  static PairEvent hcross(int a, int b) { return {PairEventKind::hcross, a, b, {}, 0.0}; }
  static PairEvent con(int m1, int m2) { return {PairEventKind::con, m1, m2, {}, 0.0}; }
  static PairEvent con2(int m1, int m2) { return {PairEventKind::con2, m1, m2, {}, 0.0}; }
  static PairEvent around(Coord u, int m) { return {PairEventKind::around, m, 0, u, 0.0}; }
  static PairEvent daround(Coord u, int m) { return {PairEventKind::daround, m, 0, u, 0.0}; }
  static PairEvent fractal(double alpha, int n, int m) {
    return {PairEventKind::fractal, n, m, {}, alpha};
  }
  std::string describe() const;
};

struct Detection {
  bool holds = false;
  /// Shortest witness path (site indices) for crossing-type events.
  std::vector<int> witness;
  /// Number of boxes met by the witness, for the fractality event.
  int boxes = 0;
};

/// Evaluate a pair event on a pre-disagreement set. Throws std::invalid_argument
/// when the geometry does not fit inside the region.
Detection detect_event(const DisagreementSet& d, const PairEvent& event);

/// Number of m-boxes (centres on (2m+1)Z^2, relative to the region centre)
/// lying in the annulus (n/4, n/2] that contain a vertex site of the path.
int boxes_hit(const Model& m, const std::vector<int>& sites, int box_m, int n);

/// Shortest path inside the allowed sites from any site of `from` to any site of
/// `to`; empty when none exists.
std::vector<int> shortest_path(const Model& m, const std::vector<char>& allowed,
                               const std::vector<int>& from, const std::vector<int>& to);

/// The swap map: identity when the component set anchored at S meets A,
/// otherwise the two configurations are exchanged on that set.
PairConfig swap(const Model& m, const PairConfig& pair, const std::vector<int>& s,
                const std::vector<int>& a);

/// Sitewise join and meet for the pair order.
PairConfig pair_join(const PairConfig& x, const PairConfig& y);
PairConfig pair_meet(const PairConfig& x, const PairConfig& y);
/// x dominates y: x.plus >= y.plus and x.minus <= y.minus at every site.
bool pair_dominates(const PairConfig& x, const PairConfig& y);

/// Vertex-edge weight W(a, b) = lambda (1{a=b} + t 1{b=0}), zero when |a-b|>1.
double w_weight(int a, int b, double lambda, double t);

/// Four-point inequality W(max)W(min) >= W(x)W(y) over every pair of
/// vertex-edge value combinations; returns the smallest slack found.
double fkg_single_edge_slack(double T);

}  // namespace rfim
