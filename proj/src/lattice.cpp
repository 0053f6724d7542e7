#include "rfim/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>

namespace rfim {

namespace {

void check_center(Coord c, int half) {
  const long long lim = std::numeric_limits<std::int32_t>::max() - 1;
  if (std::llabs(c.x) + half > lim || std::llabs(c.y) + half > lim)
    throw std::invalid_argument("region does not fit in 32-bit lattice coordinates");
}

void check_radius(int r, const char* what) {
  if (r > kMaxRegionRadius)
    throw std::invalid_argument(std::string(what) + " exceeds the cap of 2^14");
}

}  // namespace

Region::Region(RegionKind kind, std::array<int, 2> params, Coord center)
    : kind_(kind), params_(params), center_(center) {
  switch (kind) {
    case RegionKind::box:
      half_w_ = half_h_ = params[0];
      break;
    case RegionKind::annulus:
      half_w_ = half_h_ = params[1];
      hole_ = params[0];
      break;
    case RegionKind::rect:
      half_w_ = params[0];
      half_h_ = params[1];
      break;
  }
  check_center(center, std::max(half_w_, half_h_));
  const int w = 2 * half_w_ + 1;
  const int h = 2 * half_h_ + 1;
  size_ = w * h - (hole_ >= 0 ? (2 * hole_ + 1) * (2 * hole_ + 1) : 0);

  std::vector<Coord> bnd;
  if (kind == RegionKind::annulus) {
    bnd = ring(center, params[1]);
    auto inner = ring(center, params[0] + 1);
    bnd.insert(bnd.end(), inner.begin(), inner.end());
  } else {
    for (int dy = -half_h_; dy <= half_h_; ++dy) {
      for (int dx = -half_w_; dx <= half_w_; ++dx) {
        if (std::abs(dx) == half_w_ || std::abs(dy) == half_h_)
          bnd.push_back({center.x + dx, center.y + dy});
      }
    }
  }
  boundary_.reserve(bnd.size());
  for (Coord c : bnd) boundary_.push_back(index(c));
  std::sort(boundary_.begin(), boundary_.end());
  boundary_.erase(std::unique(boundary_.begin(), boundary_.end()), boundary_.end());
}

Region Region::box(int n, Coord center) {
  if (n < 1) throw std::invalid_argument("box requires N >= 1, got N = " + std::to_string(n));
  check_radius(n, "box radius N");
  return Region(RegionKind::box, {n, 0}, center);
}

Region Region::annulus(int m, int n, Coord center) {
  if (n < 1) throw std::invalid_argument("annulus requires N >= 1, got N = " + std::to_string(n));
  if (m >= n)
    throw std::invalid_argument("annulus requires M < N, got M = " + std::to_string(m) +
                                ", N = " + std::to_string(n));
  if (m < -1) throw std::invalid_argument("annulus requires M >= -1, got M = " + std::to_string(m));
  check_radius(n, "annulus radius N");
  return Region(RegionKind::annulus, {m, n}, center);
}

Region Region::rect(int a, int b, Coord center) {
  if (a < 1 || b < 1)
    throw std::invalid_argument("rect requires a >= 1 and b >= 1, got (" + std::to_string(a) +
                                ", " + std::to_string(b) + ")");
  check_radius(std::max(a, b), "rect half-side");
  return Region(RegionKind::rect, {a, b}, center);
}

Region build_region(RegionKind kind, const std::vector<int>& params, Coord center) {
  switch (kind) {
    case RegionKind::box:
      if (params.size() != 1) throw std::invalid_argument("box takes one parameter N");
      return Region::box(params[0], center);
    case RegionKind::annulus:
      if (params.size() != 2) throw std::invalid_argument("annulus takes parameters (M, N)");
      return Region::annulus(params[0], params[1], center);
    case RegionKind::rect:
      if (params.size() != 2) throw std::invalid_argument("rect takes parameters (a, b)");
      return Region::rect(params[0], params[1], center);
  }
  throw std::invalid_argument("unknown region kind");
}

std::string Region::describe() const {
  std::string s;
  switch (kind_) {
    case RegionKind::box:
      s = "box(" + std::to_string(params_[0]) + ")";
      break;
    case RegionKind::annulus:
      s = "annulus(" + std::to_string(params_[0]) + "," + std::to_string(params_[1]) + ")";
      break;
    case RegionKind::rect:
      s = "rect(" + std::to_string(params_[0]) + "," + std::to_string(params_[1]) + ")";
      break;
  }
  if (center_.x != 0 || center_.y != 0)
    s += "@(" + std::to_string(center_.x) + "," + std::to_string(center_.y) + ")";
  return s;
}

int Region::row_width(int row) const {
  const int w = 2 * half_w_ + 1;
  if (hole_ < 0) return w;
  const int dy = row - half_h_;
  return std::abs(dy) <= hole_ ? w - (2 * hole_ + 1) : w;
}

int Region::row_start(int row) const {
  const int w = 2 * half_w_ + 1;
  if (hole_ < 0) return row * w;
  const int holes_before = std::clamp(row - (half_h_ - hole_), 0, 2 * hole_ + 1);
  return row * w - holes_before * (2 * hole_ + 1);
}

int Region::index(Coord c) const {
  const long long dx = static_cast<long long>(c.x) - center_.x;
  const long long dy = static_cast<long long>(c.y) - center_.y;
  if (dx < -half_w_ || dx > half_w_ || dy < -half_h_ || dy > half_h_) return -1;
  int col = static_cast<int>(dx) + half_w_;
  const int row = static_cast<int>(dy) + half_h_;
  if (hole_ >= 0 && std::llabs(dy) <= hole_) {
    if (std::llabs(dx) <= hole_) return -1;
    if (dx > hole_) col -= 2 * hole_ + 1;
  }
  return row_start(row) + col;
}

Coord Region::coord(int i) const {
  if (i < 0 || i >= size_) throw std::out_of_range("vertex index out of range");
  const int w = 2 * half_w_ + 1;
  int row = 0;
  int col = 0;
  if (hole_ < 0) {
    row = i / w;
    col = i % w;
  } else {
    const int full_before = half_h_ - hole_;
    const int hole_rows = 2 * hole_ + 1;
    const int w2 = w - hole_rows;
    if (i < full_before * w) {
      row = i / w;
      col = i % w;
    } else if (i < full_before * w + hole_rows * w2) {
      const int j = i - full_before * w;
      row = full_before + j / w2;
      col = j % w2;
      if (col >= half_w_ - hole_) col += hole_rows;
    } else {
      const int j = i - full_before * w - hole_rows * w2;
      row = full_before + hole_rows + j / w;
      col = j % w;
    }
  }
  return {center_.x + col - half_w_, center_.y + row - half_h_};
}

std::vector<Coord> Region::vertices() const {
  std::vector<Coord> out;
  out.reserve(size_);
  for (int i = 0; i < size_; ++i) out.push_back(coord(i));
  return out;
}

bool Region::is_boundary_coord(Coord c) const {
  const int dx = std::abs(c.x - center_.x);
  const int dy = std::abs(c.y - center_.y);
  switch (kind_) {
    case RegionKind::box:
    case RegionKind::rect:
      return dx == half_w_ || dy == half_h_;
    case RegionKind::annulus: {
      const int r = std::max(dx, dy);
      return r == params_[1] || r == params_[0] + 1;
    }
  }
  return false;
}

std::vector<int> Region::interior() const {
  std::vector<int> out;
  out.reserve(interior_count());
  for (int i = 0; i < size_; ++i)
    if (!is_boundary(i)) out.push_back(i);
  return out;
}

int Region::neighbors(int i, std::array<int, 4>& out) const {
  const Coord c = coord(i);
  int k = 0;
  const Coord nb[4] = {{c.x, c.y - 1}, {c.x - 1, c.y}, {c.x + 1, c.y}, {c.x, c.y + 1}};
  for (Coord d : nb) {
    const int j = index(d);
    if (j >= 0) out[k++] = j;
  }
  return k;
}

std::vector<Coord> ring(Coord c, int k) {
  if (k < 0) throw std::invalid_argument("ring radius must be nonnegative");
  if (k == 0) return {c};
  std::vector<Coord> out;
  out.reserve(8 * k);
  for (int dy = -k; dy <= k; ++dy) {
    if (std::abs(dy) == k) {
      for (int dx = -k; dx <= k; ++dx) out.push_back({c.x + dx, c.y + dy});
    } else {
      out.push_back({c.x - k, c.y + dy});
      out.push_back({c.x + k, c.y + dy});
    }
  }
  return out;
}

ExtendedGraph::ExtendedGraph(Region region) : region_(std::move(region)) {
  const int n = region_.size();
  for (int i = 0; i < n; ++i) {
    const Coord c = region_.coord(i);
    const Coord right{c.x + 1, c.y};
    const Coord up{c.x, c.y + 1};
    const Coord left{c.x - 1, c.y};
    const Coord down{c.x, c.y - 1};
    edges_.push_back({c, right, i, region_.index(right)});
    edges_.push_back({c, up, i, region_.index(up)});
    if (!region_.contains(left)) edges_.push_back({left, c, -1, i});
    if (!region_.contains(down)) edges_.push_back({down, c, -1, i});
  }
  std::sort(edges_.begin(), edges_.end(), [](const EdgeSite& p, const EdgeSite& q) {
    if (p.a != q.a) return p.a < q.a;
    return p.b < q.b;
  });
  incident_.assign(n, {});
  for (int e = 0; e < edge_count(); ++e) {
    const EdgeSite& s = edges_[e];
    if (s.ia >= 0) incident_[s.ia].push_back(e);
    if (s.ib >= 0) incident_[s.ib].push_back(e);
    if (s.internal()) ++internal_edges_;
  }
}

ExtendedGraph extend(const Region& region) { return ExtendedGraph(region); }

int ExtendedGraph::edge_index(Coord a, Coord b) const {
  if (!adjacent(a, b)) return -1;
  if (b < a) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(a, b),
                             [](const EdgeSite& s, const std::pair<Coord, Coord>& key) {
                               if (s.a != key.first) return s.a < key.first;
                               return s.b < key.second;
                             });
  if (it == edges_.end() || it->a != a || it->b != b) return -1;
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> ExtendedGraph::extended_boundary(const std::vector<char>& in_subset) const {
  if (static_cast<int>(in_subset.size()) != site_count())
    throw std::invalid_argument("subset mask must cover every site of the extended graph");
  const int n = vertex_count();
  std::vector<int> out;
  for (int v = 0; v < n; ++v) {
    if (!in_subset[v]) continue;
    for (int e : incident_[v]) {
      if (!in_subset[n + e]) {
        out.push_back(v);
        break;
      }
    }
  }
  for (int e = 0; e < edge_count(); ++e) {
    if (!in_subset[n + e]) continue;
    const EdgeSite& s = edges_[e];
    const bool a_in = s.ia >= 0 && in_subset[s.ia];
    const bool b_in = s.ib >= 0 && in_subset[s.ib];
    if (!a_in || !b_in) out.push_back(n + e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Segment primal_segment(Coord a, Coord b) {
  if (!adjacent(a, b)) throw std::invalid_argument("dual_site requires a nearest-neighbour pair");
  if (b < a) std::swap(a, b);
  return {{2 * a.x, 2 * a.y}, {2 * b.x, 2 * b.y}};
}

Segment dual(const Segment& s) {
  const int mx = (s.a.x2 + s.b.x2) / 2;
  const int my = (s.a.y2 + s.b.y2) / 2;
  const int hx = (s.b.x2 - s.a.x2) / 2;
  const int hy = (s.b.y2 - s.a.y2) / 2;
  HalfCoord p{mx + hy, my - hx};
  HalfCoord q{mx - hy, my + hx};
  if (q < p) std::swap(p, q);
  return {p, q};
}

Segment dual_site(Coord a, Coord b) { return dual(primal_segment(a, b)); }

HalfCoord dual_vertex(Coord lower_left) { return {2 * lower_left.x + 1, 2 * lower_left.y + 1}; }

namespace {

struct RectFrame {
  int x0, x1, y0, y1;
};

RectFrame rect_frame(const ExtendedGraph& g) {
  const Region& r = g.region();
  if (r.kind() != RegionKind::rect) throw std::invalid_argument("crossing checks require a rect region");
  const auto p = r.params();
  const Coord c = r.center();
  return {c.x - p[0], c.x + p[0], c.y - p[1], c.y + p[1]};
}

bool is_open(const ExtendedGraph& g, const std::vector<char>& open, Coord a, Coord b) {
  const int e = g.edge_index(a, b);
  return e >= 0 && open[e];
}

}  // namespace

bool primal_vertical_crossing(const ExtendedGraph& g, const std::vector<char>& open) {
  if (static_cast<int>(open.size()) != g.edge_count())
    throw std::invalid_argument("bond configuration size does not match the graph");
  const RectFrame f = rect_frame(g);
  const Region& r = g.region();
  std::vector<char> seen(r.size(), 0);
  std::deque<int> queue;
  for (int x = f.x0; x <= f.x1; ++x) {
    const int i = r.index({x, f.y0});
    seen[i] = 1;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    const Coord c = r.coord(v);
    if (c.y == f.y1) return true;
    for (int e : g.incident(v)) {
      const EdgeSite& s = g.edge(e);
      if (!s.internal() || !open[e]) continue;
      const int w = s.ia == v ? s.ib : s.ia;
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return false;
}

bool dual_horizontal_crossing(const ExtendedGraph& g, const std::vector<char>& open) {
  if (static_cast<int>(open.size()) != g.edge_count())
    throw std::invalid_argument("bond configuration size does not match the graph");
  const RectFrame f = rect_frame(g);
  const int cols = f.x1 - f.x0 + 2;
  const int rows = f.y1 - f.y0;
  auto id = [cols](int i, int j) { return j * cols + i; };
  std::vector<char> seen(cols * rows, 0);
  std::deque<std::pair<int, int>> queue;
  for (int j = 0; j < rows; ++j) {
    seen[id(0, j)] = 1;
    queue.push_back({0, j});
  }
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i == cols - 1) return true;
    auto visit = [&](int ni, int nj) {
      if (!seen[id(ni, nj)]) {
        seen[id(ni, nj)] = 1;
        queue.push_back({ni, nj});
      }
    };
    const int y = f.y0 + j;
    if (i + 1 < cols && !is_open(g, open, {f.x0 + i, y}, {f.x0 + i, y + 1})) visit(i + 1, j);
    if (i - 1 >= 0 && !is_open(g, open, {f.x0 + i - 1, y}, {f.x0 + i - 1, y + 1})) visit(i - 1, j);
    if (i >= 1 && i <= cols - 2) {
      const int x = f.x0 + i - 1;
      if (j + 1 < rows && !is_open(g, open, {x, y + 1}, {x + 1, y + 1})) visit(i, j + 1);
      if (j - 1 >= 0 && !is_open(g, open, {x, y}, {x + 1, y})) visit(i, j - 1);
    }
  }
  return false;
}

}  // namespace rfim
