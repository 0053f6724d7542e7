#include "rfim/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rfim/union_find.hpp"

namespace rfim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
    else carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double log_2cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

/// Turn log weights into probabilities in place; returns log of the total.
double normalize_log_weights(std::vector<double>& w) {
  double mx = kNegInf;
  for (double x : w) mx = std::max(mx, x);
  if (mx == kNegInf) throw std::domain_error("every configuration has zero weight");
  CompensatedSum total;
  for (double& x : w) {
    x = x == kNegInf ? 0.0 : std::exp(x - mx);
    total.add(x);
  }
  const double z = total.value();
  for (double& x : w) x /= z;
  return mx + std::log(z);
}

void require_free(const Model& m, int v, const char* what) {
  if (v < 0 || v >= m.n) throw std::invalid_argument(std::string(what) + ": vertex outside the region");
  if (!m.is_free(v)) throw std::invalid_argument(std::string(what) + ": vertex is not an interior (free) vertex");
}

void check_edge_cap(const Model& m) {
  if (m.edge_count() > kMaxEnumeratedEdges)
    throw std::length_error("bond enumeration is capped at " + std::to_string(kMaxEnumeratedEdges) +
                            " edges; the instance has " + std::to_string(m.edge_count()));
}

int spin_of(const Model& m, std::uint64_t mask, int v) {
  if (!m.is_free(v)) return m.fixed[v];
  return (mask >> m.free_pos[v]) & 1 ? 1 : -1;
}

bool bonds_connect(const Model& m, std::uint64_t open, const std::vector<int>& a, const std::vector<int>& b,
                   UnionFind& uf) {
  uf.reset(m.n);
  for (int e = 0; e < m.edge_count(); ++e)
    if ((open >> e) & 1) uf.unite(m.edges[e][0], m.edges[e][1]);
  for (int x : a)
    for (int y : b)
      if (uf.same(x, y)) return true;
  return false;
}

void check_sites(const Model& m, const std::vector<int>& sites) {
  for (int v : sites)
    if (v < 0 || v >= m.n) throw std::invalid_argument("event references a vertex outside the region");
}

}  // namespace

GibbsTable exact_gibbs(const Model& m) {
  const int f = m.free_count();
  if (f > kMaxEnumeratedSpins)
    throw std::length_error("exact enumeration is capped at " + std::to_string(kMaxEnumeratedSpins) +
                            " free spins; the instance has " + std::to_string(f));
  const double beta = m.beta();
  std::vector<double> c(f);
  for (int k = 0; k < f; ++k) {
    const int v = m.free_sites[k];
    c[k] = beta * (m.h[v] + m.fixed_neighbor_sum(v));
  }
  std::vector<std::pair<int, int>> inner;
  for (const auto& e : m.edges)
    if (m.is_free(e[0]) && m.is_free(e[1])) inner.push_back({m.free_pos[e[0]], m.free_pos[e[1]]});

  GibbsTable g;
  g.model = m;
  g.prob.resize(std::size_t{1} << f);
  for (std::uint64_t mask = 0; mask < g.prob.size(); ++mask) {
    double acc = 0.0;
    for (int k = 0; k < f; ++k) acc += (mask >> k) & 1 ? c[k] : -c[k];
    for (const auto& [i, j] : inner) acc += ((mask >> i) ^ (mask >> j)) & 1 ? -beta : beta;
    g.prob[mask] = acc;
  }
  g.log_z = normalize_log_weights(g.prob);
  return g;
}

double GibbsTable::mean_spin(int v) const {
  if (v < 0 || v >= model.n) throw std::invalid_argument("mean_spin: vertex outside the model");
  if (!model.is_free(v)) return model.fixed[v];
  const int k = model.free_pos[v];
  CompensatedSum s;
  for (std::uint64_t mask = 0; mask < prob.size(); ++mask) s.add((mask >> k) & 1 ? prob[mask] : -prob[mask]);
  return s.value();
}

double GibbsTable::mean_product(const std::vector<int>& sites) const {
  int sign = 1;
  std::uint64_t bits = 0;
  for (int v : sites) {
    if (v < 0 || v >= model.n) throw std::invalid_argument("mean_product: vertex outside the model");
    if (model.is_free(v)) bits ^= std::uint64_t{1} << model.free_pos[v];
    else sign *= model.fixed[v];
  }
  CompensatedSum s;
  for (std::uint64_t mask = 0; mask < prob.size(); ++mask)
    s.add(std::popcount(~mask & bits) & 1 ? -prob[mask] : prob[mask]);
  return sign * s.value();
}

double exact_log_partition(const GibbsSpec& spec) { return exact_gibbs(compile(spec)).log_z; }

double exact_partition(const GibbsSpec& spec) { return std::exp(exact_log_partition(spec)); }

double exact_spin_average(const GibbsSpec& spec, int v) {
  const Model m = compile(spec);
  require_free(m, v, "exact_spin_average");
  return exact_gibbs(m).mean_spin(v);
}

double exact_correlation(const GibbsSpec& spec, const std::vector<int>& sites, bool truncated) {
  if (sites.size() > 6) throw std::invalid_argument("exact_correlation supports |I| <= 6");
  const Model m = compile(spec);
  for (int v : sites) require_free(m, v, "exact_correlation");
  const GibbsTable g = exact_gibbs(m);
  if (!truncated) return g.mean_product(sites);
  if (sites.size() != 2) throw std::invalid_argument("truncated correlation needs exactly two vertices");
  return g.mean_product(sites) - g.mean_spin(sites[0]) * g.mean_spin(sites[1]);
}

std::vector<double> correlation_table(const GibbsTable& g) {
  std::vector<double> f = g.prob;
  const std::size_t size = f.size();
  for (std::size_t bit = 1; bit < size; bit <<= 1) {
    for (std::size_t x = 0; x < size; ++x) {
      if (x & bit) continue;
      const double a = f[x];
      const double b = f[x | bit];
      f[x] = a + b;
      f[x | bit] = b - a;
    }
  }
  return f;
}

namespace {

/// Depth-first walk over all bond configurations, tracking clusters with a
/// rollback union-find so each leaf gets its FK log weight incrementally.
class FkEnumerator {
 public:
  FkEnumerator(const Model& m, double p, std::vector<double>& out)
      : m_(m), lp_(std::log(p)), lq_(std::log1p(-p)), uf_(m.n), out_(out) {
    flag_.assign(m.n, 0);
    set_.assign(m.n, 0);
    for (int v = 0; v < m.n; ++v) {
      flag_[v] = m.fixed[v];
      if (m.is_free(v)) set_[v] = std::uint32_t{1} << m.free_pos[v];
    }
    // Cluster weights depend only on the free vertices a cluster contains
    // (fixed sites carry no field), so they are tabulated once.
    const std::size_t subsets = std::size_t{1} << m.free_count();
    field_.assign(subsets, 0.0);
    free_weight_.assign(subsets, 0.0);
    for (std::size_t s = 1; s < subsets; ++s) {
      const int k = std::countr_zero(s);
      field_[s] = field_[s & (s - 1)] + m.beta() * m.h[m.free_sites[k]];
      free_weight_[s] = log_2cosh(field_[s]);
    }
  }

  void run() {
    double base = 0.0;
    for (int v = 0; v < m_.n; ++v) base += cluster(flag_[v], set_[v]);
    if (m_.edge_count() == 0) out_[0] = base;
    else walk(m_.edge_count() - 1, 0, base);
  }

 private:
  double cluster(int flag, std::uint32_t set) const {
    return flag == 0 ? free_weight_[set] : flag * field_[set];
  }

  // Edges are decided from the last to the first, so the leaves are reached
  // in increasing mask order and the output is written sequentially.
  void walk(int e, std::uint64_t mask, double lw) {
    const std::uint64_t bit = std::uint64_t{1} << e;
    const int ra = uf_.find(m_.edges[e][0]);
    const int rb = uf_.find(m_.edges[e][1]);
    const bool last = e == 0;
    if (last) out_[mask] = lw + lq_;
    else walk(e - 1, mask, lw + lq_);
    if (ra == rb) {
      if (last) out_[mask | bit] = lw + lp_;
      else walk(e - 1, mask | bit, lw + lp_);
      return;
    }
    if (flag_[ra] * flag_[rb] < 0) return;  // would join the plus and minus boundary clusters
    const int f = flag_[ra] != 0 ? flag_[ra] : flag_[rb];
    const std::uint32_t joined = set_[ra] | set_[rb];
    const double delta = cluster(f, joined) - cluster(flag_[ra], set_[ra]) - cluster(flag_[rb], set_[rb]);
    if (last) {
      out_[mask | bit] = lw + lp_ + delta;
      return;
    }
    const auto mark = uf_.checkpoint();
    const int r = uf_.unite_roots(ra, rb);
    const int old_flag = flag_[r];
    const std::uint32_t old_set = set_[r];
    flag_[r] = f;
    set_[r] = joined;
    walk(e - 1, mask | bit, lw + lp_ + delta);
    flag_[r] = old_flag;
    set_[r] = old_set;
    uf_.rollback(mark);
  }

  const Model& m_;
  double lp_;
  double lq_;
  RollbackUnionFind uf_;
  std::vector<int> flag_;
  std::vector<std::uint32_t> set_;
  std::vector<double> field_;
  std::vector<double> free_weight_;
  std::vector<double>& out_;
};

}  // namespace

std::vector<double> exact_fk_law(const Model& m, double p) {
  check_edge_cap(m);
  if (m.free_count() > kMaxEnumeratedSpins) throw std::length_error("exact enumeration is capped at 20 free spins");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("FK parameter must lie in (0,1)");
  std::vector<double> law(std::size_t{1} << m.edge_count(), kNegInf);
  FkEnumerator(m, p, law).run();
  normalize_log_weights(law);
  return law;
}

std::vector<double> exact_extended_edge_law(const Model& m, const EdgeWeights& w) {
  check_edge_cap(m);
  const int f = m.free_count();
  if (f > kMaxEnumeratedSpins) throw std::length_error("exact enumeration is capped at 20 free spins");
  if (!(w.lambda > 0.0 && w.t2 > 0.0)) throw std::invalid_argument("edge weights must be positive");
  const double beta = m.beta();
  const double l2 = w.lambda * w.lambda;
  const double log_agree = std::log(l2 * (1.0 + w.t2));
  const double log_disagree = std::log(l2 * w.t2);
  // Vertex weights: summing the W products over the edge values of each edge.
  std::vector<double> lw(std::size_t{1} << f);
  std::vector<std::uint32_t> agree(lw.size());
  for (std::uint64_t mask = 0; mask < lw.size(); ++mask) {
    double acc = 0.0;
    for (int k = 0; k < f; ++k) acc += beta * m.h[m.free_sites[k]] * ((mask >> k) & 1 ? 1.0 : -1.0);
    std::uint32_t a = 0;
    for (int e = 0; e < m.edge_count(); ++e) {
      const bool same = spin_of(m, mask, m.edges[e][0]) == spin_of(m, mask, m.edges[e][1]);
      acc += same ? log_agree : log_disagree;
      if (same) a |= std::uint32_t{1} << e;
    }
    lw[mask] = acc;
    agree[mask] = a;
  }
  normalize_log_weights(lw);
  std::vector<double> law(std::size_t{1} << m.edge_count(), 0.0);
  for (std::uint64_t mask = 0; mask < lw.size(); ++mask) law[agree[mask]] += lw[mask];
  // Given the vertices, an agreeing edge is nonzero with probability 1/(1+t^2).
  const double keep = w.open_probability();
  const double drop = 1.0 - keep;
  // Low bits are transformed block by block while the block sits in cache.
  const std::size_t block = std::min<std::size_t>(law.size(), std::size_t{1} << 15);
  auto thin = [&](std::size_t begin, std::size_t end, std::size_t bit) {
    for (std::size_t lo = begin; lo < end; lo += 2 * bit) {
      for (std::size_t s = lo; s < lo + bit; ++s) {
        const double x = law[s + bit];
        law[s + bit] = x * keep;
        law[s] += x * drop;
      }
    }
  };
  for (std::size_t b0 = 0; b0 < law.size(); b0 += block)
    for (std::size_t bit = 1; bit < block; bit <<= 1) thin(b0, b0 + block, bit);
  for (std::size_t bit = block; bit < law.size(); bit <<= 1) thin(0, law.size(), bit);
  return law;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: laws on different spaces");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return 0.5 * s.value();
}

void for_each_extended(const GibbsTable& g, const EdgeWeights& w,
                       const std::function<void(const ExtendedConfig&, double)>& visit) {
  const Model& m = g.model;
  std::uint64_t total = 0;
  std::vector<std::vector<int>> agreeing(g.prob.size());
  for (std::uint64_t mask = 0; mask < g.prob.size(); ++mask) {
    if (g.prob[mask] == 0.0) continue;
    for (int e = 0; e < m.edge_count(); ++e)
      if (spin_of(m, mask, m.edges[e][0]) == spin_of(m, mask, m.edges[e][1])) agreeing[mask].push_back(e);
    if (agreeing[mask].size() >= 40) throw std::length_error("extended enumeration cap exceeded");
    total += std::uint64_t{1} << agreeing[mask].size();
    if (total > kMaxExtendedConfigs)
      throw std::length_error("extended enumeration is capped at 2^22 configurations");
  }
  const double keep = w.open_probability();
  ExtendedConfig cfg;
  cfg.s.assign(m.site_count(), 0);
  for (std::uint64_t mask = 0; mask < g.prob.size(); ++mask) {
    if (g.prob[mask] == 0.0) continue;
    for (int v = 0; v < m.n; ++v) cfg.s[v] = static_cast<std::int8_t>(spin_of(m, mask, v));
    const auto& ag = agreeing[mask];
    const std::uint64_t subsets = std::uint64_t{1} << ag.size();
    for (std::uint64_t sub = 0; sub < subsets; ++sub) {
      double pr = g.prob[mask];
      for (int e = 0; e < m.edge_count(); ++e) cfg.s[m.n + e] = 0;
      for (std::size_t k = 0; k < ag.size(); ++k) {
        const int e = ag[k];
        if ((sub >> k) & 1) {
          cfg.s[m.n + e] = cfg.s[m.edges[e][0]];
          pr *= keep;
        } else {
          pr *= 1.0 - keep;
        }
      }
      visit(cfg, pr);
    }
  }
}

double brute_force_pair_prob(const GibbsTable& plus, const GibbsTable& minus, const EdgeWeights& w,
                             const std::function<bool(const PairConfig&)>& event) {
  std::vector<ExtendedConfig> a_cfg, b_cfg;
  std::vector<double> a_pr, b_pr;
  for_each_extended(plus, w, [&](const ExtendedConfig& c, double p) {
    a_cfg.push_back(c);
    a_pr.push_back(p);
  });
  for_each_extended(minus, w, [&](const ExtendedConfig& c, double p) {
    b_cfg.push_back(c);
    b_pr.push_back(p);
  });
  if (a_cfg.size() * b_cfg.size() > kMaxExtendedConfigs)
    throw std::length_error("pair enumeration is capped at 2^22 configuration pairs");
  CompensatedSum s;
  PairConfig pair;
  for (std::size_t i = 0; i < a_cfg.size(); ++i) {
    pair.plus = a_cfg[i];
    for (std::size_t j = 0; j < b_cfg.size(); ++j) {
      pair.minus = b_cfg[j];
      if (event(pair)) s.add(a_pr[i] * b_pr[j]);
    }
  }
  return s.value();
}

double exact_event_prob(const GibbsSpec& spec, const EventSpec& ev, MeasureKind kind,
                        std::optional<EdgeWeights> weights) {
  const Model m = compile(spec);
  check_sites(m, ev.a);
  check_sites(m, ev.b);
  const EdgeWeights w = weights.value_or(EdgeWeights::at(spec.T));
  const bool spin_event = ev.kind == EventSpec::Kind::spin_value || ev.kind == EventSpec::Kind::spin_product;
  if (kind == MeasureKind::ising) {
    if (!spin_event) throw std::invalid_argument("the Ising measure has no edge variables");
    const GibbsTable g = exact_gibbs(m);
    if (ev.kind == EventSpec::Kind::spin_value) return 0.5 * (1.0 + ev.sign * g.mean_spin(ev.a.at(0)));
    return 0.5 * (1.0 + g.mean_product(ev.a));
  }
  if (kind == MeasureKind::fk) {
    if (ev.kind != EventSpec::Kind::connection) throw std::invalid_argument("the FK measure has no spins");
    const auto law = exact_fk_law(m, fk_p(spec.T));
    UnionFind uf;
    CompensatedSum s;
    for (std::uint64_t mask = 0; mask < law.size(); ++mask)
      if (law[mask] > 0.0 && bonds_connect(m, mask, ev.a, ev.b, uf)) s.add(law[mask]);
    return s.value();
  }
  if (ev.kind == EventSpec::Kind::connection) {
    const auto law = exact_extended_edge_law(m, w);
    UnionFind uf;
    CompensatedSum s;
    for (std::uint64_t mask = 0; mask < law.size(); ++mask)
      if (law[mask] > 0.0 && bonds_connect(m, mask, ev.a, ev.b, uf)) s.add(law[mask]);
    return s.value();
  }
  const GibbsTable g = exact_gibbs(m);
  CompensatedSum s;
  std::vector<char> allowed(m.site_count());
  for_each_extended(g, w, [&](const ExtendedConfig& c, double p) {
    bool hit = false;
    switch (ev.kind) {
      case EventSpec::Kind::spin_value:
        hit = c.s[ev.a.at(0)] == ev.sign;
        break;
      case EventSpec::Kind::spin_product: {
        int prod = 1;
        for (int v : ev.a) prod *= c.s[v];
        hit = prod == 1;
        break;
      }
      case EventSpec::Kind::signed_path: {
        for (int i = 0; i < m.site_count(); ++i) allowed[i] = c.s[i] == ev.sign;
        hit = !shortest_path(m, allowed, ev.a, ev.b).empty();
        break;
      }
      case EventSpec::Kind::connection:
        break;
    }
    if (hit) s.add(p);
  });
  return s.value();
}

namespace {

void check_same_graph(const Model& a, const Model& b) {
  if (a.n != b.n || a.edges != b.edges || a.free_sites != b.free_sites)
    throw std::invalid_argument("pair measures must live on the same graph with the same free sites");
}

void superset_zeta(std::vector<double>& f) {
  for (std::size_t bit = 1; bit < f.size(); bit <<= 1)
    for (std::size_t x = 0; x < f.size(); ++x)
      if (!(x & bit)) f[x] += f[x | bit];
}

void superset_mobius(std::vector<double>& f) {
  for (std::size_t bit = 1; bit < f.size(); bit <<= 1)
    for (std::size_t x = 0; x < f.size(); ++x)
      if (!(x & bit)) f[x] -= f[x | bit];
}

}  // namespace

std::vector<double> disagreement_vertex_law(const GibbsTable& plus, const GibbsTable& minus, bool anti) {
  check_same_graph(plus.model, minus.model);
  const int f = plus.model.free_count();
  const std::size_t size = std::size_t{1} << f;
  const std::uint64_t full = size - 1;
  std::vector<double> law(size, 0.0);
  if (2 * f <= 24) {
    for (std::uint64_t a = 0; a < size; ++a) {
      const double pa = plus.prob[a];
      if (pa == 0.0) continue;
      for (std::uint64_t b = 0; b < size; ++b) {
        const std::uint64_t w = anti ? (~a & b) & full : (a & ~b) & full;
        law[w] += pa * minus.prob[b];
      }
    }
    return law;
  }
  // Inclusion-exclusion over supersets: P(W subset of D) factorizes into the
  // two copies, then Moebius inversion recovers P(D = W).
  std::vector<double> gp(size), gm(size);
  for (std::uint64_t x = 0; x < size; ++x) {
    gp[x] = anti ? plus.prob[~x & full] : plus.prob[x];
    gm[x] = anti ? minus.prob[x] : minus.prob[~x & full];
  }
  superset_zeta(gp);
  superset_zeta(gm);
  for (std::size_t x = 0; x < size; ++x) law[x] = gp[x] * gm[x];
  superset_mobius(law);
  return law;
}

std::vector<char> fixed_disagreement(const Model& plus, const Model& minus, bool anti) {
  check_same_graph(plus, minus);
  std::vector<char> out(plus.n, 0);
  for (int v = 0; v < plus.n; ++v) {
    if (plus.is_free(v)) continue;
    out[v] = anti ? plus.fixed[v] < minus.fixed[v] : plus.fixed[v] > minus.fixed[v];
  }
  return out;
}

VertexQuery vertex_query(const Model& m, const PairEvent& ev) {
  if (!m.region) throw std::invalid_argument("vertex_query needs a model compiled from a region");
  const Region& r = *m.region;
  VertexQuery q;
  auto ring_or_throw = [&](int k) {
    auto s = ring_sites(m, k);
    if (s.empty()) throw std::invalid_argument("event ring " + std::to_string(k) + " is not in the region");
    return s;
  };
  switch (ev.kind) {
    case PairEventKind::origin_disagreement: {
      const int o = r.index(r.center());
      if (o < 0) throw std::invalid_argument("origin is not a vertex of the region");
      q.from = {o};
      q.to = outer_boundary_sites(m);
      return q;
    }
    case PairEventKind::hcross: {
      const Coord c = r.center();
      q.allowed.assign(m.n, 0);
      for (int v = 0; v < m.n; ++v) {
        const Coord x = r.coord(v);
        q.allowed[v] = std::abs(x.x - c.x) <= ev.a && std::abs(x.y - c.y) <= ev.b;
      }
      for (int y = -ev.b; y <= ev.b; ++y) {
        const int l = r.index({c.x - ev.a, c.y + y});
        const int rr = r.index({c.x + ev.a, c.y + y});
        if (l < 0 || rr < 0) throw std::invalid_argument("hcross rectangle leaves the region");
        q.from.push_back(l);
        q.to.push_back(rr);
      }
      return q;
    }
    case PairEventKind::con:
      if (ev.a + 1 > ev.b) throw std::invalid_argument("con: requires m1 < m2");
      q.from = ring_or_throw(ev.a + 1);
      q.to = ring_or_throw(ev.b);
      return q;
    case PairEventKind::con2:
      if (ev.a + 1 >= ev.b) throw std::invalid_argument("con2: requires m1 + 1 < m2");
      q.kind = VertexQuery::Kind::double_crossing;
      q.from = ring_or_throw(ev.a + 1);
      q.to = ring_or_throw(ev.b);
      return q;
    default:
      throw std::invalid_argument("event " + ev.describe() + " has no vertex reduction");
  }
}

namespace {

/// P(from joined to to) over independent edges among the set vertices.
class ConnectSearch {
 public:
  ConnectSearch(int n, double d) : uf_(n), flag_(n, 0), d_(d) {}

  double run(const std::vector<std::array<int, 2>>& edges, const std::vector<char>& tag) {
    edges_ = &edges;
    uf_.reset(static_cast<int>(tag.size()));
    for (std::size_t v = 0; v < tag.size(); ++v) {
      flag_[v] = tag[v];
      if (tag[v] == 3) return 1.0;
    }
    return walk(0, 1.0);
  }

 private:
  double walk(std::size_t k, double pr) {
    if (k == edges_->size()) return 0.0;
    const int ra = uf_.find((*edges_)[k][0]);
    const int rb = uf_.find((*edges_)[k][1]);
    if (ra == rb) return walk(k + 1, pr);
    double total = walk(k + 1, pr * (1.0 - d_));
    const int f = flag_[ra] | flag_[rb];
    if (f == 3) return total + pr * d_;
    const auto mark = uf_.checkpoint();
    const int r = uf_.unite_roots(ra, rb);
    const int old = flag_[r];
    flag_[r] = f;
    total += walk(k + 1, pr * d_);
    flag_[r] = old;
    uf_.rollback(mark);
    return total;
  }

  RollbackUnionFind uf_;
  std::vector<int> flag_;
  double d_;
  const std::vector<std::array<int, 2>>* edges_ = nullptr;
};

/// P(at least two crossing clusters) with the ring vertices removed.
class DoubleCrossingSearch {
 public:
  DoubleCrossingSearch(int n, double d) : uf_(n), touch_(n, 0), d_(d) {}

  double run(const std::vector<std::array<int, 2>>& edges, const std::vector<char>& ring) {
    edges_ = &edges;
    ring_ = &ring;
    uf_.reset(static_cast<int>(ring.size()));
    std::fill(touch_.begin(), touch_.end(), 0);
    return walk(0, 1.0, 0);
  }

 private:
  double walk(std::size_t k, double pr, int crossings) {
    if (k == edges_->size()) return crossings >= 2 ? pr : 0.0;
    const int a = (*edges_)[k][0];
    const int b = (*edges_)[k][1];
    const int ta = (*ring_)[a];
    const int tb = (*ring_)[b];
    if (ta && tb) {
      if (ta == tb) return walk(k + 1, pr, crossings);
      return walk(k + 1, pr * (1.0 - d_), crossings) + walk(k + 1, pr * d_, crossings + 1);
    }
    if (ta || tb) {
      const int t = ta ? ta : tb;
      const int r = uf_.find(ta ? b : a);
      if (touch_[r] & t) return walk(k + 1, pr, crossings);
      double total = walk(k + 1, pr * (1.0 - d_), crossings);
      const int old = touch_[r];
      touch_[r] = old | t;
      total += walk(k + 1, pr * d_, crossings + (touch_[r] == 3) - (old == 3));
      touch_[r] = old;
      return total;
    }
    const int ra = uf_.find(a);
    const int rb = uf_.find(b);
    if (ra == rb) return walk(k + 1, pr, crossings);
    double total = walk(k + 1, pr * (1.0 - d_), crossings);
    const int before = (touch_[ra] == 3) + (touch_[rb] == 3);
    const int merged = touch_[ra] | touch_[rb];
    const auto mark = uf_.checkpoint();
    const int r = uf_.unite_roots(ra, rb);
    const int old = touch_[r];
    touch_[r] = merged;
    total += walk(k + 1, pr * d_, crossings + (merged == 3) - before);
    touch_[r] = old;
    uf_.rollback(mark);
    return total;
  }

  RollbackUnionFind uf_;
  std::vector<int> touch_;
  double d_;
  const std::vector<std::array<int, 2>>* edges_ = nullptr;
  const std::vector<char>* ring_ = nullptr;
};

}  // namespace

std::vector<double> vertex_query_table(const Model& m, const std::vector<char>& fixed_in_set, const VertexQuery& q,
                                       double d) {
  const int f = m.free_count();
  if (f > kMaxEnumeratedSpins) throw std::length_error("exact enumeration is capped at 20 free spins");
  if (static_cast<int>(fixed_in_set.size()) != m.n) throw std::invalid_argument("fixed_in_set has the wrong size");
  check_sites(m, q.from);
  check_sites(m, q.to);
  std::vector<char> tag(m.n, 0);
  for (int v : q.from) tag[v] |= 1;
  for (int v : q.to) tag[v] |= 2;
  if (q.kind == VertexQuery::Kind::double_crossing)
    for (int v = 0; v < m.n; ++v)
      if (tag[v] == 3) throw std::invalid_argument("double crossing needs disjoint rings");
  const std::size_t size = std::size_t{1} << f;
  std::vector<double> table(size, 0.0);
  std::vector<char> in(m.n);
  std::vector<char> active_tag(m.n);
  std::vector<std::array<int, 2>> edges;
  ConnectSearch connect(m.n, d);
  DoubleCrossingSearch crossing(m.n, d);
  for (std::uint64_t w = 0; w < size; ++w) {
    for (int v = 0; v < m.n; ++v) {
      in[v] = m.is_free(v) ? (w >> m.free_pos[v]) & 1 : fixed_in_set[v];
      if (!q.allowed.empty() && !q.allowed[v]) in[v] = 0;
      active_tag[v] = in[v] ? tag[v] : 0;
    }
    edges.clear();
    for (const auto& e : m.edges)
      if (in[e[0]] && in[e[1]]) edges.push_back(e);
    if (q.kind == VertexQuery::Kind::connect) table[w] = connect.run(edges, active_tag);
    else table[w] = crossing.run(edges, tag);
  }
  return table;
}

double reduced_pair_prob(const GibbsTable& plus, const GibbsTable& minus, const VertexQuery& q, bool anti) {
  const auto law = disagreement_vertex_law(plus, minus, anti);
  const auto fixed = fixed_disagreement(plus.model, minus.model, anti);
  const double p = EdgeWeights::at(plus.model.T).open_probability();
  const double d = 1.0 - (1.0 - p) * (1.0 - p);
  const auto table = vertex_query_table(plus.model, fixed, q, d);
  CompensatedSum s;
  for (std::size_t w = 0; w < law.size(); ++w) s.add(law[w] * table[w]);
  return s.value();
}

double exact_pair_event_prob(const GibbsSpec& plus, const GibbsSpec& minus, const PairEvent& ev) {
  if (!(plus.region == minus.region)) throw std::invalid_argument("pair specs must share the region");
  if (!(plus.field == minus.field) || plus.eps != minus.eps)
    throw std::invalid_argument("pair specs must share the field and its strength");
  if (plus.T != minus.T) throw std::invalid_argument("pair specs must share the temperature");
  const GibbsTable gp = exact_gibbs(compile(plus));
  const GibbsTable gm = exact_gibbs(compile(minus));
  switch (ev.kind) {
    case PairEventKind::origin_disagreement:
    case PairEventKind::hcross:
    case PairEventKind::con:
    case PairEventKind::con2:
      return reduced_pair_prob(gp, gm, vertex_query(gp.model, ev));
    default:
      break;
  }
  const Model& m = gp.model;
  return brute_force_pair_prob(gp, gm, EdgeWeights::at(plus.T), [&](const PairConfig& pair) {
    return detect_event(DisagreementSet(m, pair), ev).holds;
  });
}

double exact_surface_tension(const Region& region, const std::vector<int>& a1, const std::vector<int>& a2,
                             const Field& field, double eps, double T) {
  if (!(field.region() == region)) throw std::invalid_argument("field is defined on a different region");
  std::vector<char> role(region.size(), 0);
  for (int v : a1) {
    if (v < 0 || v >= region.size()) throw std::invalid_argument("A1 contains a vertex outside the region");
    role[v] = 1;
  }
  for (int v : a2) {
    if (v < 0 || v >= region.size()) throw std::invalid_argument("A2 contains a vertex outside the region");
    if (role[v]) throw std::invalid_argument("A1 and A2 overlap");
    role[v] = 2;
  }
  auto log_z = [&](int s1, int s2) {
    const int n = region.size();
    std::vector<std::int8_t> fixed(n, 0);
    for (int v = 0; v < n; ++v) fixed[v] = role[v] == 1 ? s1 : role[v] == 2 ? s2 : 0;
    std::vector<double> h(n, 0.0);
    for (int v = 0; v < n; ++v) h[v] = eps * field.at(v);
    std::vector<std::array<int, 2>> edges;
    double constant = 0.0;
    for (int v = 0; v < n; ++v) {
      const Coord c = region.coord(v);
      for (Coord nb : {Coord{c.x + 1, c.y}, Coord{c.x, c.y + 1}}) {
        const int w = region.index(nb);
        if (w < 0) continue;
        if (fixed[v] != 0 && fixed[w] != 0) constant += fixed[v] * fixed[w] / T;
        else edges.push_back({v, w});
      }
    }
    return exact_gibbs(make_model(n, std::move(fixed), std::move(edges), std::move(h), T)).log_z + constant;
  };
  return T * (log_z(1, 1) + log_z(-1, -1) - log_z(1, -1) - log_z(-1, 1));
}

GibbsSpec annulus_spec(const Region& annulus, double T, int s_inner, int s_outer, const Field& field, double eps) {
  if (annulus.kind() != RegionKind::annulus) throw std::invalid_argument("annulus_spec needs an annulus");
  const int n_out = annulus.params()[1];
  std::vector<std::int8_t> spins;
  for (int v : annulus.boundary())
    spins.push_back(static_cast<std::int8_t>(linf(annulus.coord(v), annulus.center()) == n_out ? s_outer : s_inner));
  return GibbsSpec(annulus, T, BoundaryCondition::explicit_spins(std::move(spins)), field, eps);
}

double wired_annulus_connection(const Region& annulus, double T) {
  const Model m = compile(annulus_spec(annulus, T, 1, 1, Field(annulus), 0.0));
  const int inner_ring = annulus.params()[0] + 1;
  std::vector<int> inner;
  for (int v : annulus.boundary())
    if (linf(annulus.coord(v), annulus.center()) == inner_ring) inner.push_back(v);
  const Model contracted = contract_free_point(m, inner);
  return exact_gibbs(contracted).mean_spin(contracted.n - 1);
}

}  // namespace rfim
