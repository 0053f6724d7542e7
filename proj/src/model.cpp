#include "rfim/model.hpp"

#include <stdexcept>
#include <string>

namespace rfim {

std::int8_t BoundaryCondition::value(std::size_t k) const {
  switch (kind) {
    case BoundaryKind::plus:
      return 1;
    case BoundaryKind::minus:
      return -1;
    case BoundaryKind::free:
      return 0;
    case BoundaryKind::explicit_spins:
      return spins.at(k);
  }
  return 0;
}

BoundaryCondition BoundaryCondition::flipped() const {
  switch (kind) {
    case BoundaryKind::plus:
      return minus();
    case BoundaryKind::minus:
      return plus();
    case BoundaryKind::free:
      return free();
    case BoundaryKind::explicit_spins: {
      auto s = spins;
      for (auto& x : s) x = static_cast<std::int8_t>(-x);
      return explicit_spins(std::move(s));
    }
  }
  return *this;
}

GibbsSpec::GibbsSpec(Region r, double temperature, BoundaryCondition bc, double strength)
    : T(temperature), region(r), boundary(std::move(bc)), field(Field(r)), eps(strength) {
  validate();
}

GibbsSpec::GibbsSpec(Region r, double temperature, BoundaryCondition bc, Field f, double strength)
    : T(temperature), region(std::move(r)), boundary(std::move(bc)), field(std::move(f)), eps(strength) {
  validate();
}

void GibbsSpec::validate() const {
  if (!(T >= kMinTemperature) || !std::isfinite(T))
    throw std::invalid_argument("temperature must be finite and at least 1e-3, got " + std::to_string(T));
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("disorder strength must be >= 0");
  if (!(field.region() == region)) throw std::invalid_argument("field is defined on a different region");
  if (boundary.kind == BoundaryKind::explicit_spins) {
    if (boundary.spins.size() != region.boundary().size())
      throw std::invalid_argument("explicit boundary has " + std::to_string(boundary.spins.size()) +
                                  " spins but the region boundary has " +
                                  std::to_string(region.boundary().size()) + " vertices");
    for (auto s : boundary.spins)
      if (s != 1 && s != -1) throw std::invalid_argument("boundary spins must be +1 or -1");
  }
}

GibbsSpec GibbsSpec::flipped() const {
  GibbsSpec out = *this;
  out.boundary = boundary.flipped();
  std::vector<int> all = region.interior();
  out.field = flip_field(field, all);
  return out;
}

double Model::fixed_neighbor_sum(int v) const {
  double s = 0.0;
  for (int k = adj_start[v]; k < adj_start[v + 1]; ++k) s += fixed[adj_site[k]];
  return s;
}

double Model::log_weight(const std::vector<std::int8_t>& spins) const {
  double e = 0.0;
  for (const auto& ed : edges) e += spins[ed[0]] * spins[ed[1]];
  for (int v : free_sites) e += h[v] * spins[v];
  return e / T;
}

std::vector<std::int8_t> Model::spins_from_mask(std::uint64_t mask) const {
  std::vector<std::int8_t> s(fixed);
  for (int k = 0; k < free_count(); ++k) s[free_sites[k]] = (mask >> k) & 1 ? 1 : -1;
  return s;
}

Model make_model(int n, std::vector<std::int8_t> fixed, std::vector<std::array<int, 2>> edges,
                 std::vector<double> h, double T) {
  if (!(T >= kMinTemperature)) throw std::invalid_argument("temperature below the 1e-3 floor");
  if (static_cast<int>(fixed.size()) != n || static_cast<int>(h.size()) != n)
    throw std::invalid_argument("model arrays must have one entry per site");
  Model m;
  m.n = n;
  m.fixed = std::move(fixed);
  m.h = std::move(h);
  m.edges = std::move(edges);
  m.T = T;
  m.free_pos.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (m.fixed[v] == 0) {
      m.free_pos[v] = static_cast<int>(m.free_sites.size());
      m.free_sites.push_back(v);
    } else {
      m.h[v] = 0.0;
    }
  }
  std::vector<int> deg(n, 0);
  for (const auto& e : m.edges) {
    if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n || e[0] == e[1])
      throw std::invalid_argument("model edge endpoints out of range");
    if (m.fixed[e[0]] != 0 && m.fixed[e[1]] != 0)
      throw std::invalid_argument("model edges need at least one free endpoint");
    ++deg[e[0]];
    ++deg[e[1]];
  }
  m.adj_start.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) m.adj_start[v + 1] = m.adj_start[v] + deg[v];
  m.adj_site.resize(m.adj_start[n]);
  m.adj_edge.resize(m.adj_start[n]);
  std::vector<int> fill(m.adj_start.begin(), m.adj_start.end() - 1);
  for (int e = 0; e < m.edge_count(); ++e) {
    const int a = m.edges[e][0];
    const int b = m.edges[e][1];
    m.adj_site[fill[a]] = b;
    m.adj_edge[fill[a]++] = e;
    m.adj_site[fill[b]] = a;
    m.adj_edge[fill[b]++] = e;
  }
  return m;
}

Model compile(const GibbsSpec& spec) {
  spec.validate();
  const Region& r = spec.region;
  const int n = r.size();
  std::vector<std::int8_t> fixed(n, 0);
  if (spec.boundary.kind != BoundaryKind::free) {
    const auto& b = r.boundary();
    for (std::size_t k = 0; k < b.size(); ++k) fixed[b[k]] = spec.boundary.value(k);
  }
  std::vector<double> h(n, 0.0);
  for (int v = 0; v < n; ++v) h[v] = spec.eps * spec.field.at(v);
  std::vector<std::array<int, 2>> edges;
  for (int v = 0; v < n; ++v) {
    const Coord c = r.coord(v);
    for (Coord d : {Coord{c.x + 1, c.y}, Coord{c.x, c.y + 1}}) {
      const int w = r.index(d);
      if (w < 0) continue;
      if (fixed[v] != 0 && fixed[w] != 0) continue;
      edges.push_back({v, w});
    }
  }
  Model m = make_model(n, std::move(fixed), std::move(edges), std::move(h), spec.T);
  m.region = r;
  return m;
}

Model contract_free_point(const Model& model, const std::vector<int>& sites) {
  std::vector<char> merged(model.n, 0);
  for (int v : sites) {
    if (v < 0 || v >= model.n) throw std::invalid_argument("contraction site out of range");
    merged[v] = 1;
  }
  const int q = model.n;
  std::vector<std::int8_t> fixed(model.fixed);
  std::vector<double> h(model.h);
  for (int v = 0; v < model.n; ++v) {
    if (merged[v]) {
      fixed[v] = 1;
      h[v] = 0.0;
    }
  }
  fixed.push_back(0);
  h.push_back(0.0);
  std::vector<std::array<int, 2>> edges;
  for (const auto& e : model.edges) {
    const bool a = merged[e[0]];
    const bool b = merged[e[1]];
    if (a && b) continue;
    if (a) edges.push_back({q, e[1]});
    else if (b) edges.push_back({e[0], q});
    else edges.push_back(e);
  }
  // Merged sites that were free are now isolated fixed sites; edges between two
  // sites that became fixed cannot occur because they were merged together.
  Model m = make_model(q + 1, std::move(fixed), std::move(edges), std::move(h), model.T);
  m.region = model.region;
  return m;
}

}  // namespace rfim
