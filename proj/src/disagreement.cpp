#include "rfim/disagreement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

#include "rfim/union_find.hpp"

namespace rfim {

namespace {

const Region& region_of(const Model& m) {
  if (!m.region) throw std::invalid_argument("event geometry needs a model compiled from a region");
  return *m.region;
}

/// Ring vertices around an arbitrary centre; throws if any is missing.
std::vector<int> full_ring(const Region& r, Coord c, int k, const char* what) {
  std::vector<int> out;
  for (Coord x : ring(c, k)) {
    const int i = r.index(x);
    if (i < 0) throw std::invalid_argument(std::string(what) + ": ring " + std::to_string(k) + " leaves the region");
    out.push_back(i);
  }
  return out;
}

/// Vertex sites of ring k around the region centre that exist in the region.
std::vector<int> present_ring(const Region& r, int k, const char* what) {
  std::vector<int> out;
  for (Coord x : ring(r.center(), k)) {
    const int i = r.index(x);
    if (i >= 0) out.push_back(i);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": ring " + std::to_string(k) + " is not in the region");
  return out;
}

}  // namespace

DisagreementSet::DisagreementSet(const Model& graph, const PairConfig& pair, bool anti) : graph_(&graph) {
  const int sites = graph.site_count();
  if (static_cast<int>(pair.plus.s.size()) != sites || static_cast<int>(pair.minus.s.size()) != sites)
    throw std::invalid_argument("pair configurations do not match the extended graph");
  in_.assign(sites, 0);
  for (int i = 0; i < sites; ++i) {
    const bool d = anti ? pair.plus.s[i] < pair.minus.s[i] : pair.plus.s[i] > pair.minus.s[i];
    in_[i] = d ? 1 : 0;
  }
  label_components();
}

DisagreementSet::DisagreementSet(const Model& graph, std::vector<char> in_set)
    : graph_(&graph), in_(std::move(in_set)) {
  if (static_cast<int>(in_.size()) != graph.site_count())
    throw std::invalid_argument("membership mask does not match the extended graph");
  label_components();
}

void DisagreementSet::label_components() {
  const Model& m = *graph_;
  const int sites = site_count();
  UnionFind uf(sites);
  count_ = 0;
  for (int i = 0; i < sites; ++i) count_ += in_[i] ? 1 : 0;
  for (int e = 0; e < m.edge_count(); ++e) {
    const int s = m.n + e;
    if (!in_[s]) continue;
    if (in_[m.edges[e][0]]) uf.unite(s, m.edges[e][0]);
    if (in_[m.edges[e][1]]) uf.unite(s, m.edges[e][1]);
  }
  label_.assign(sites, -1);
  std::vector<int> root_label(sites, -1);
  components_ = 0;
  for (int i = 0; i < sites; ++i) {
    if (!in_[i]) continue;
    const int r = uf.find(i);
    if (root_label[r] < 0) root_label[r] = components_++;
    label_[i] = root_label[r];
  }
}

std::vector<int> DisagreementSet::component_sites(int label) const {
  std::vector<int> out;
  for (int i = 0; i < site_count(); ++i)
    if (label_[i] == label) out.push_back(i);
  return out;
}

std::vector<char> DisagreementSet::anchored_mask(const std::vector<int>& s) const {
  std::vector<char> hit(components_, 0);
  for (int x : s) {
    if (x < 0 || x >= site_count()) throw std::invalid_argument("anchor site outside the extended graph");
    if (label_[x] >= 0) hit[label_[x]] = 1;
  }
  std::vector<char> mask(site_count(), 0);
  for (int i = 0; i < site_count(); ++i)
    if (label_[i] >= 0 && hit[label_[i]]) mask[i] = 1;
  return mask;
}

std::vector<int> DisagreementSet::anchored(const std::vector<int>& s) const {
  const auto mask = anchored_mask(s);
  std::vector<int> out;
  for (int i = 0; i < site_count(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

bool DisagreementSet::connected(const std::vector<int>& a, const std::vector<int>& b) const {
  std::vector<char> hit(components_, 0);
  for (int x : a)
    if (label_[x] >= 0) hit[label_[x]] = 1;
  for (int y : b)
    if (label_[y] >= 0 && hit[label_[y]]) return true;
  return false;
}

std::vector<int> ring_sites(const Model& m, int k) {
  const Region& r = region_of(m);
  std::vector<int> out;
  for (Coord x : ring(r.center(), k)) {
    const int i = r.index(x);
    if (i >= 0) out.push_back(i);
  }
  return out;
}

std::vector<int> outer_boundary_sites(const Model& m) {
  const Region& r = region_of(m);
  if (r.kind() == RegionKind::rect) return r.boundary();
  return ring_sites(m, r.params()[r.kind() == RegionKind::box ? 0 : 1]);
}

std::string PairEvent::describe() const {
  switch (kind) {
    case PairEventKind::origin_disagreement:
      return "origin_disagreement";
    case PairEventKind::hcross:
      return "hcross(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case PairEventKind::con:
      return "con(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case PairEventKind::con2:
      return "con2(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case PairEventKind::around:
      return "around(" + std::to_string(u.x) + "," + std::to_string(u.y) + ";" + std::to_string(a) + ")";
    case PairEventKind::daround:
      return "daround(" + std::to_string(u.x) + "," + std::to_string(u.y) + ";" + std::to_string(a) + ")";
    case PairEventKind::fractal:
      return "fractal(" + std::to_string(alpha) + "," + std::to_string(a) + "," + std::to_string(b) + ")";
  }
  return "unknown";
}

std::vector<int> shortest_path(const Model& m, const std::vector<char>& allowed, const std::vector<int>& from,
                               const std::vector<int>& to) {
  const int sites = m.site_count();
  std::vector<int> parent(sites, -2);
  std::vector<char> target(sites, 0);
  for (int t : to)
    if (allowed[t]) target[t] = 1;
  std::deque<int> queue;
  for (int f : from) {
    if (!allowed[f] || parent[f] != -2) continue;
    parent[f] = -1;
    queue.push_back(f);
  }
  int found = -1;
  while (!queue.empty() && found < 0) {
    const int x = queue.front();
    queue.pop_front();
    if (target[x]) {
      found = x;
      break;
    }
    for_each_site_neighbor(m, x, [&](int y) {
      if (allowed[y] && parent[y] == -2) {
        parent[y] = x;
        queue.push_back(y);
      }
    });
  }
  std::vector<int> path;
  for (int x = found; x >= 0; x = parent[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

int boxes_hit(const Model& m, const std::vector<int>& sites, int box_m, int n) {
  if (box_m < 1) throw std::invalid_argument("box size must be >= 1");
  const Region& r = region_of(m);
  const int side = 2 * box_m + 1;
  auto floor_div = [](int x, int d) { return x >= 0 ? x / d : -((-x + d - 1) / d); };
  std::set<std::pair<int, int>> seen;
  for (int s : sites) {
    if (s >= m.n || s >= r.size()) continue;
    const Coord c = r.coord(s);
    const int dx = c.x - r.center().x;
    const int dy = c.y - r.center().y;
    const int bx = floor_div(dx + box_m, side);
    const int by = floor_div(dy + box_m, side);
    const int dist = std::max(std::abs(bx * side), std::abs(by * side));
    if (4 * dist > n && 2 * dist <= n) seen.insert({bx, by});
  }
  return static_cast<int>(seen.size());
}

namespace {

Detection detect_origin(const DisagreementSet& d) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  const int o = r.index(r.center());
  if (o < 0) throw std::invalid_argument("origin_disagreement: the centre is not a site of the region");
  const auto boundary = outer_boundary_sites(m);
  Detection det;
  det.holds = d.connected({o}, boundary);
  if (det.holds) det.witness = shortest_path(m, d.mask(), boundary, {o});
  return det;
}

Detection detect_hcross(const DisagreementSet& d, int a, int b) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  if (a < 0 || b < 0) throw std::invalid_argument("hcross: half-sides must be >= 0");
  const Coord c0 = r.center();
  auto inside = [&](int v) {
    if (v >= r.size()) return false;
    const Coord c = r.coord(v);
    return std::abs(c.x - c0.x) <= a && std::abs(c.y - c0.y) <= b;
  };
  std::vector<int> left, right;
  for (int y = -b; y <= b; ++y) {
    const int l = r.index({c0.x - a, c0.y + y});
    const int rr = r.index({c0.x + a, c0.y + y});
    if (l < 0 || rr < 0) throw std::invalid_argument("hcross: rectangle leaves the region");
    left.push_back(l);
    right.push_back(rr);
  }
  std::vector<char> allowed(m.site_count(), 0);
  for (int v = 0; v < m.n; ++v) allowed[v] = d.contains(v) && inside(v);
  for (int e = 0; e < m.edge_count(); ++e)
    allowed[m.n + e] = d.contains(m.n + e) && inside(m.edges[e][0]) && inside(m.edges[e][1]);
  Detection det;
  det.witness = shortest_path(m, allowed, left, right);
  det.holds = !det.witness.empty();
  return det;
}

Detection detect_con(const DisagreementSet& d, int m1, int m2) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  if (m1 + 1 > m2) throw std::invalid_argument("con: requires m1 < m2");
  const auto inner = present_ring(r, m1 + 1, "con");
  const auto outer = present_ring(r, m2, "con");
  Detection det;
  det.holds = d.connected(inner, outer);
  if (det.holds) det.witness = shortest_path(m, d.mask(), outer, inner);
  return det;
}

Detection detect_con2(const DisagreementSet& d, int m1, int m2) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  if (m1 + 1 >= m2) throw std::invalid_argument("con2: requires m1 + 1 < m2");
  const auto inner = present_ring(r, m1 + 1, "con2");
  const auto outer = present_ring(r, m2, "con2");
  const int sites = m.site_count();
  std::vector<char> ring_tag(sites, 0);
  for (int v : inner) ring_tag[v] = 1;
  for (int v : outer) ring_tag[v] = 2;
  // Clusters of the set once the ring vertices are removed; a cluster crosses
  // when it is adjacent to a set vertex on each ring.
  UnionFind uf(sites);
  for (int e = 0; e < m.edge_count(); ++e) {
    const int s = m.n + e;
    if (!d.contains(s)) continue;
    for (int v : m.edges[e])
      if (d.contains(v) && !ring_tag[v]) uf.unite(s, v);
  }
  std::vector<char> touch(sites, 0);
  for (int e = 0; e < m.edge_count(); ++e) {
    const int s = m.n + e;
    if (!d.contains(s)) continue;
    for (int v : m.edges[e])
      if (d.contains(v) && ring_tag[v]) touch[uf.find(s)] |= ring_tag[v];
  }
  Detection det;
  int crossings = 0;
  for (int i = 0; i < sites; ++i)
    if (d.contains(i) && !ring_tag[i] && uf.find(i) == i && touch[i] == 3) ++crossings;
  det.holds = crossings >= 2;
  det.boxes = crossings;
  return det;
}

Detection detect_around(const DisagreementSet& d, Coord u_rel, int mm, bool anchored) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  if (mm < 1) throw std::invalid_argument("around: M must be >= 1");
  const Coord u{r.center().x + u_rel.x, r.center().y + u_rel.y};
  const auto inner = full_ring(r, u, mm, "around");
  const auto outer = full_ring(r, u, 2 * mm, "around");
  std::vector<char> set_mask = anchored ? d.anchored_mask(outer_boundary_sites(m)) : d.mask();
  const int sites = m.site_count();
  // Annulus sites: vertices at distance (M, 2M] and edges between them.
  auto dist = [&](int v) { return v < r.size() ? linf(r.coord(v), u) : -1; };
  std::vector<char> ann(sites, 0);
  for (int v = 0; v < m.n; ++v) {
    const int k = dist(v);
    ann[v] = k > mm && k <= 2 * mm;
  }
  for (int e = 0; e < m.edge_count(); ++e) ann[m.n + e] = ann[m.edges[e][0]] && ann[m.edges[e][1]];
  // Sites a blocking path may use: the annulus, ring M and the edges leaving it.
  std::vector<char> walk(ann);
  for (int v : inner) walk[v] = 1;
  for (int e = 0; e < m.edge_count(); ++e) {
    const int a = m.edges[e][0];
    const int b = m.edges[e][1];
    const int ka = dist(a);
    const int kb = dist(b);
    if ((ka == mm && kb == mm + 1) || (kb == mm && ka == mm + 1)) walk[m.n + e] = 1;
  }
  // Components of the set inside the annulus.
  UnionFind uf(sites);
  for (int e = 0; e < m.edge_count(); ++e) {
    const int s = m.n + e;
    if (!ann[s] || !set_mask[s]) continue;
    for (int v : m.edges[e])
      if (set_mask[v]) uf.unite(s, v);
  }
  std::vector<int> roots;
  for (int i = 0; i < sites; ++i)
    if (ann[i] && set_mask[i] && uf.find(i) == i && uf.set_size(i) >= 2 * mm + 3) roots.push_back(i);
  std::vector<char> target(sites, 0);
  for (int v : outer) target[v] = 1;
  Detection det;
  std::vector<int> stamp(sites, -1);
  std::vector<int> stack;
  for (std::size_t k = 0; k < roots.size() && !det.holds; ++k) {
    const int root = roots[k];
    auto in_comp = [&](int s) { return ann[s] && set_mask[s] && uf.find(s) == root; };
    stack.clear();
    for (int v : inner) {
      if (!in_comp(v) && stamp[v] != static_cast<int>(k)) {
        stamp[v] = static_cast<int>(k);
        stack.push_back(v);
      }
    }
    bool reached = false;
    while (!stack.empty() && !reached) {
      const int x = stack.back();
      stack.pop_back();
      if (target[x]) {
        reached = true;
        break;
      }
      for_each_site_neighbor(m, x, [&](int y) {
        if (walk[y] && stamp[y] != static_cast<int>(k) && !in_comp(y)) {
          stamp[y] = static_cast<int>(k);
          stack.push_back(y);
        }
      });
    }
    if (!reached) {
      det.holds = true;
      for (int i = 0; i < sites; ++i)
        if (in_comp(i)) det.witness.push_back(i);
    }
  }
  return det;
}

Detection detect_fractal(const DisagreementSet& d, double alpha, int n, int box_m) {
  const Model& m = d.graph();
  const Region& r = region_of(m);
  if (n < 8 || box_m < 1) throw std::invalid_argument("fractal: requires N >= 8 and M >= 1");
  const auto inner = present_ring(r, n / 8 + 1, "fractal");
  const auto outer = present_ring(r, n, "fractal");
  const auto mask = d.anchored_mask(outer_boundary_sites(m));
  Detection det;
  det.witness = shortest_path(m, mask, outer, inner);
  if (det.witness.empty()) return det;
  det.boxes = boxes_hit(m, det.witness, box_m, n);
  det.holds = det.boxes <= std::pow(static_cast<double>(n) / box_m, 1.0 + alpha);
  return det;
}

}  // namespace

Detection detect_event(const DisagreementSet& d, const PairEvent& ev) {
  switch (ev.kind) {
    case PairEventKind::origin_disagreement:
      return detect_origin(d);
    case PairEventKind::hcross:
      return detect_hcross(d, ev.a, ev.b);
    case PairEventKind::con:
      return detect_con(d, ev.a, ev.b);
    case PairEventKind::con2:
      return detect_con2(d, ev.a, ev.b);
    case PairEventKind::around:
      return detect_around(d, ev.u, ev.a, false);
    case PairEventKind::daround:
      return detect_around(d, ev.u, ev.a, true);
    case PairEventKind::fractal:
      return detect_fractal(d, ev.alpha, ev.a, ev.b);
  }
  throw std::invalid_argument("unknown pair event");
}

PairConfig swap(const Model& m, const PairConfig& pair, const std::vector<int>& s, const std::vector<int>& a) {
  // Sites where the copies differ split into components that are entirely
  // pre-disagreements or entirely anti-disagreements (the two kinds are never
  // adjacent), so swapping whole components keeps the map an involution.
  const int sites = m.site_count();
  std::vector<char> differ(sites, 0);
  for (int i = 0; i < sites; ++i) differ[i] = pair.plus.s[i] != pair.minus.s[i];
  DisagreementSet diff(m, std::move(differ));
  const auto moved = diff.anchored_mask(s);
  for (int x : a) {
    if (x < 0 || x >= sites) throw std::invalid_argument("swap: site outside the extended graph");
    if (moved[x]) return pair;
  }
  PairConfig out = pair;
  for (int i = 0; i < sites; ++i)
    if (moved[i]) std::swap(out.plus.s[i], out.minus.s[i]);
  return out;
}

PairConfig pair_join(const PairConfig& x, const PairConfig& y) {
  if (x.plus.s.size() != y.plus.s.size()) throw std::invalid_argument("pair_join: mismatched graphs");
  PairConfig out = x;
  for (std::size_t i = 0; i < x.plus.s.size(); ++i) {
    out.plus.s[i] = std::max(x.plus.s[i], y.plus.s[i]);
    out.minus.s[i] = std::min(x.minus.s[i], y.minus.s[i]);
  }
  return out;
}

PairConfig pair_meet(const PairConfig& x, const PairConfig& y) {
  if (x.plus.s.size() != y.plus.s.size()) throw std::invalid_argument("pair_meet: mismatched graphs");
  PairConfig out = x;
  for (std::size_t i = 0; i < x.plus.s.size(); ++i) {
    out.plus.s[i] = std::min(x.plus.s[i], y.plus.s[i]);
    out.minus.s[i] = std::max(x.minus.s[i], y.minus.s[i]);
  }
  return out;
}

bool pair_dominates(const PairConfig& x, const PairConfig& y) {
  for (std::size_t i = 0; i < x.plus.s.size(); ++i)
    if (x.plus.s[i] < y.plus.s[i] || x.minus.s[i] > y.minus.s[i]) return false;
  return true;
}

double w_weight(int a, int b, double lambda, double t) {
  if (std::abs(a - b) > 1) return 0.0;
  return lambda * ((a == b ? 1.0 : 0.0) + (b == 0 ? t : 0.0));
}

double fkg_single_edge_slack(double T) {
  const double lambda = lambda_weight(T);
  const double t = std::sqrt(t_squared(T));
  double slack = INFINITY;
  for (int sv : {-1, 1})
    for (int nv : {-1, 1})
      for (int se = -1; se <= 1; ++se)
        for (int ne = -1; ne <= 1; ++ne) {
          const double lhs = w_weight(std::max(sv, nv), std::max(se, ne), lambda, t) *
                             w_weight(std::min(sv, nv), std::min(se, ne), lambda, t);
          const double rhs = w_weight(sv, se, lambda, t) * w_weight(nv, ne, lambda, t);
          slack = std::min(slack, lhs - rhs);
        }
  return slack;
}

}  // namespace rfim
