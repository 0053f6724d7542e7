// Unit tests for the exact enumeration oracle. The reference values come from
// an independent brute-force sum over spin configurations written here from
// lattice coordinates only.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "rfim/disagreement.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"
#include "rfim/verify.hpp"

using namespace rfim;
using Catch::Approx;

namespace {

constexpr double kTol = 1e-10;

struct BruteForce {
  double log_z = 0.0;
  std::vector<double> mean;  // <sigma_v> per vertex
};

/// Sum over all spin configurations of the non-fixed vertices. `fixed[v]` is
/// the boundary spin or 0 for a free vertex; pairs of fixed vertices are
/// skipped, every other nearest-neighbour pair of the region counts once.
BruteForce brute_force(const Region& r, const std::vector<int>& fixed, const Field& f, double eps, double T) {
  std::vector<int> free_v;
  for (int v = 0; v < r.size(); ++v)
    if (fixed[v] == 0) free_v.push_back(v);
  const int n = static_cast<int>(free_v.size());
  std::vector<double> lw(std::size_t{1} << n);
  std::vector<std::vector<int>> spins(lw.size());
  for (std::size_t mask = 0; mask < lw.size(); ++mask) {
    std::vector<int> s = fixed;
    for (int k = 0; k < n; ++k) s[free_v[k]] = (mask >> k) & 1 ? 1 : -1;
    double e = 0.0;
    for (int v = 0; v < r.size(); ++v) {
      const Coord c = r.coord(v);
      for (Coord d : {Coord{c.x + 1, c.y}, Coord{c.x, c.y + 1}}) {
        const int w = r.index(d);
        if (w < 0 || (fixed[v] != 0 && fixed[w] != 0)) continue;
        e += s[v] * s[w];
      }
      if (fixed[v] == 0) e += eps * f.at(v) * s[v];
    }
    lw[mask] = e / T;
    spins[mask] = s;
  }
  const double top = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  std::vector<double> acc(r.size(), 0.0);
  for (std::size_t mask = 0; mask < lw.size(); ++mask) {
    const double w = std::exp(lw[mask] - top);
    z += w;
    for (int v = 0; v < r.size(); ++v) acc[v] += w * spins[mask][v];
  }
  BruteForce out;
  out.log_z = top + std::log(z);
  out.mean.resize(r.size());
  for (int v = 0; v < r.size(); ++v) out.mean[v] = acc[v] / z;
  return out;
}

std::vector<int> fixed_from(const Region& r, const BoundaryCondition& bc) {
  std::vector<int> fixed(r.size(), 0);
  for (std::size_t k = 0; k < r.boundary().size(); ++k) fixed[r.boundary()[k]] = bc.value(k);
  return fixed;
}

BoundaryCondition random_boundary(const Region& r, Rng& rng) {
  std::vector<std::int8_t> s(r.boundary().size());
  for (auto& x : s) x = rng.bernoulli(0.5) ? 1 : -1;
  return BoundaryCondition::explicit_spins(s);
}

/// Minimal union-find for the FK reference computations below.
struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

TEST_CASE("single interior spin closed forms", "[oracle]") {
  const Region b1 = Region::box(1);
  const int o = b1.index({0, 0});
  for (double T : {kTc, 1.0, 4.0}) {
    const GibbsSpec plus(b1, T, BoundaryCondition::plus());
    CHECK(exact_partition(plus) == Approx(std::exp(4.0 / T) + std::exp(-4.0 / T)).epsilon(1e-13));
    CHECK(std::abs(exact_spin_average(plus, o) - std::tanh(4.0 / T)) < kTol);
    const GibbsSpec minus(b1, T, BoundaryCondition::minus());
    CHECK(std::abs(exact_spin_average(minus, o) + std::tanh(4.0 / T)) < kTol);
    for (double h : {-1.7, 0.3, 2.2}) {
      const GibbsSpec fp(b1, T, BoundaryCondition::plus(), constant_field(b1, h), 0.8);
      const double a = (4.0 + 0.8 * h) / T;
      CHECK(exact_log_partition(fp) == Approx(std::log(std::exp(a) + std::exp(-a))).epsilon(1e-13));
      CHECK(std::abs(exact_spin_average(fp, o) - std::tanh(a)) < kTol);
    }
  }
}

TEST_CASE("oracle agrees with the coordinate brute force", "[oracle]") {
  Rng rng(derive_seed(3, StreamTag::test));
  for (const Region& r : {Region::box(1), Region::box(2), Region::annulus(-1, 2), Region::rect(2, 1)}) {
    for (int trial = 0; trial < 4; ++trial) {
      const BoundaryCondition bc = trial == 0   ? BoundaryCondition::plus()
                                   : trial == 1 ? BoundaryCondition::minus()
                                                : random_boundary(r, rng);
      const Field f = sample_field(r, 17, static_cast<std::uint64_t>(trial));
      const double eps = 0.25 * trial;
      const double T = trial % 2 ? kTc : 1.7;
      const GibbsSpec spec(r, T, bc, f, eps);
      const BruteForce ref = brute_force(r, fixed_from(r, bc), f, eps, T);
      CHECK(std::abs(exact_log_partition(spec) - ref.log_z) < kTol);
      for (int v : r.interior()) CHECK(std::abs(exact_spin_average(spec, v) - ref.mean[v]) < kTol);
    }
  }
}

TEST_CASE("frozen box(2) fixtures", "[oracle]") {
  // Values from the coordinate brute force above, frozen as regression guards.
  const Region b2 = Region::box(2);
  const int o = b2.index({0, 0});
  CHECK(std::abs(exact_log_partition(GibbsSpec(b2, kTc, BoundaryCondition::plus())) - 10.903726519152361) < kTol);
  CHECK(std::abs(exact_log_partition(GibbsSpec(b2, kTc, BoundaryCondition::minus())) - 10.903726519152361) < kTol);
  CHECK(std::abs(exact_spin_average(GibbsSpec(b2, kTc, BoundaryCondition::plus()), o) - 0.88583750574522346) <
        kTol);
  const Field f = sample_field(b2, 1, 0);
  const double plus = exact_spin_average(GibbsSpec(b2, kTc, BoundaryCondition::plus(), f, 1.0), o);
  const double minus = exact_spin_average(GibbsSpec(b2, kTc, BoundaryCondition::minus(), f, 1.0), o);
  CHECK(std::abs(plus - 0.82432466779766123) < kTol);
  CHECK(std::abs(minus + 0.85864320891582335) < kTol);
  CHECK(std::abs(0.5 * (plus - minus) - 0.84148393835674229) < kTol);
}

TEST_CASE("spin average is antisymmetric under a global flip", "[oracle][property]") {
  Rng rng(derive_seed(4, StreamTag::test));
  const Region r = Region::box(2);
  for (int k = 0; k < 5; ++k) {
    const GibbsSpec spec(r, kTc, random_boundary(r, rng), sample_field(r, 8, k), 0.7);
    for (int v : r.interior()) CHECK(std::abs(exact_spin_average(spec, v) + exact_spin_average(spec.flipped(), v)) < kTol);
  }
}

TEST_CASE("enumeration caps and bad inputs", "[oracle]") {
  CHECK_THROWS_AS(exact_partition(GibbsSpec(Region::box(3), kTc, BoundaryCondition::plus())), std::length_error);
  const Region b2 = Region::box(2);
  const GibbsSpec spec(b2, kTc, BoundaryCondition::plus());
  CHECK_THROWS_AS(exact_spin_average(spec, b2.index({2, 2})), std::invalid_argument);
  CHECK_THROWS_AS(exact_correlation(spec, {b2.index({2, 0}), b2.index({0, 0})}, false), std::invalid_argument);
  CHECK_THROWS_AS(exact_correlation(spec, {b2.index({0, 0})}, true), std::invalid_argument);
  CHECK_THROWS_AS(GibbsSpec(b2, 1e-4, BoundaryCondition::plus()).validate(), std::invalid_argument);
  CHECK_THROWS_AS(exact_event_prob(spec, EventSpec::spin_value(b2.size() + 50, 1), MeasureKind::ising),
                  std::invalid_argument);
}

TEST_CASE("correlations", "[oracle]") {
  const Region b2 = Region::box(2);
  const GibbsSpec plus(b2, kTc, BoundaryCondition::plus(), sample_field(b2, 2, 0), 0.5);
  CHECK(exact_correlation(plus, {}, false) == Approx(1.0).margin(kTol));
  const Region b1 = Region::box(1);
  const GibbsSpec free_spec(b1, kTc, BoundaryCondition::free());
  for (int v = 0; v < b1.size(); ++v) CHECK(std::abs(exact_spin_average(free_spec, v)) < kTol);
  const int u = b2.index({-1, 0}), v = b2.index({1, 0});
  const GibbsTable g = exact_gibbs(compile(plus));
  CHECK(std::abs(exact_correlation(plus, {u, v}, true) -
                 (g.mean_product({u, v}) - g.mean_spin(u) * g.mean_spin(v))) < kTol);
  // The correlation table is the Walsh transform of the law.
  const auto table = correlation_table(g);
  const Model& m = g.model;
  const std::uint64_t bits = (std::uint64_t{1} << m.free_pos[u]) | (std::uint64_t{1} << m.free_pos[v]);
  CHECK(std::abs(table[bits] - g.mean_product({u, v})) < kTol);
}

TEST_CASE("extended edge spins given agreeing endpoints", "[oracle]") {
  // P(sigma_e = a | endpoints equal a) = 1 / (1 + t^2) = p, and disagreeing
  // endpoints force sigma_e = 0.
  for (double T : {kTc, 1.3, 3.5}) {
    const Region r = Region::rect(2, 1);
    const GibbsSpec spec(r, T, BoundaryCondition::plus(), sample_field(r, 6, 0), 0.9);
    const GibbsTable g = exact_gibbs(compile(spec));
    const Model& m = g.model;
    std::vector<double> agree(m.edge_count(), 0.0), carried(m.edge_count(), 0.0);
    double total = 0.0;
    bool forced_zero = true;
    for_each_extended(g, EdgeWeights::at(T), [&](const ExtendedConfig& c, double p) {
      total += p;
      for (int e = 0; e < m.edge_count(); ++e) {
        const int a = c.s[m.edges[e][0]], b = c.s[m.edges[e][1]];
        const int se = c.edge(m.n, e);
        if (a != b) {
          forced_zero = forced_zero && se == 0;
          continue;
        }
        agree[e] += p;
        if (se == a) carried[e] += p;
        CHECK((se == a || se == 0));
      }
    });
    CHECK(forced_zero);
    CHECK(total == Approx(1.0).margin(kTol));
    const double p = fk_p(T);
    CHECK(1.0 / (1.0 + t_squared(T)) == Approx(p).epsilon(1e-14));
    for (int e = 0; e < m.edge_count(); ++e) CHECK(std::abs(carried[e] / agree[e] - p) < kTol);
  }
  CHECK(fk_p(kTc) == Approx(std::sqrt(2.0) / (1.0 + std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("extended vertex marginal is the Ising measure", "[oracle]") {
  const Region r = Region::rect(2, 1);
  const GibbsSpec spec(r, kTc, BoundaryCondition::minus(), sample_field(r, 5, 1), 1.3);
  for (int v : r.interior()) {
    CHECK(std::abs(exact_event_prob(spec, EventSpec::spin_value(v, 1), MeasureKind::extended) -
                   exact_event_prob(spec, EventSpec::spin_value(v, 1), MeasureKind::ising)) < kTol);
  }
}

TEST_CASE("FK one-arm equals the extended same-sign arm", "[oracle]") {
  SECTION("box(2) at p_c through the edge law") {
    const Region b2 = Region::box(2);
    const GibbsSpec spec(b2, kTc, BoundaryCondition::plus());
    const EventSpec arm = EventSpec::connection({b2.index({0, 0})}, b2.boundary());
    const double fk = exact_event_prob(spec, arm, MeasureKind::fk);
    const double ext = exact_event_prob(spec, arm, MeasureKind::extended);
    CHECK(std::abs(fk - ext) < kTol);
    CHECK(fk > 0.0);
    CHECK(fk < 1.0);
  }
  SECTION("rect(2,1) through signed paths of extended spins") {
    const Region r = Region::rect(2, 1);
    for (double eps : {0.0, 1.0}) {
      const GibbsSpec spec(r, kTc, BoundaryCondition::plus(), sample_field(r, 4, 0), eps);
      const int o = r.index({0, 0});
      const double fk = exact_event_prob(spec, EventSpec::connection({o}, r.boundary()), MeasureKind::fk);
      const double ext = exact_event_prob(spec, EventSpec::signed_path({o}, r.boundary(), 1), MeasureKind::extended);
      CHECK(std::abs(fk - ext) < kTol);
    }
  }
}

TEST_CASE("coupling of FK and extended edge laws", "[oracle]") {
  CheckOptions options;
  const CheckResult ok = check_coupling({1, 2}, options);
  CHECK(ok.passed);
  CHECK(ok.value < kTol);
  options.t2_factor = 1.1;
  const CheckResult tampered = check_coupling({1}, options);
  CHECK_FALSE(tampered.passed);
}

TEST_CASE("disagreement representation and its limits", "[oracle]") {
  const CheckResult r = check_disagreement_identity({1, 2}, {0.0, 0.3, 1.0, 3.0}, CheckOptions{});
  CHECK(r.passed);
  CHECK(r.cases >= 5);

  // A huge positive field pins both chains: both sides vanish.
  const Region b2 = Region::box(2);
  const Field big = constant_field(b2, 10.0);
  const GibbsSpec plus(b2, kTc, BoundaryCondition::plus(), big, 5.0);
  const GibbsSpec minus(b2, kTc, BoundaryCondition::minus(), big, 5.0);
  const double lhs = exact_pair_event_prob(plus, minus, PairEvent::origin());
  const int o = b2.index({0, 0});
  const double rhs = 0.5 * (exact_spin_average(plus, o) - exact_spin_average(minus, o));
  CHECK(std::abs(lhs - rhs) < kTol);
  CHECK(lhs < 1e-12);

  const GibbsSpec other(Region::box(1), kTc, BoundaryCondition::minus());
  CHECK_THROWS_AS(exact_pair_event_prob(plus, other, PairEvent::origin()), std::invalid_argument);
}

TEST_CASE("even-cluster identity for two points", "[oracle]") {
  // <(s_u - s'_u)(s_v - s'_v)> = 4 P(B) under the product of two copies with
  // the same boundary, where B asks u and v to share a pre-disagreement
  // cluster or an anti-disagreement cluster.
  for (const BoundaryCondition& bc : {BoundaryCondition::free(), BoundaryCondition::plus()}) {
    const Region r = bc.kind == BoundaryKind::free ? Region::box(1) : Region::annulus(-1, 2);
    const GibbsSpec spec(r, kTc, bc, sample_field(r, 12, 0), 0.6);
    const GibbsTable g = exact_gibbs(compile(spec));
    const Model& m = g.model;
    const std::vector<std::pair<Coord, Coord>> pairs = {{{0, 1}, {1, 0}}, {{-1, 0}, {1, 0}}, {{-1, -1}, {1, 1}}};
    for (const auto& [cu, cv] : pairs) {
      const int u = r.index(cu), v = r.index(cv);
      if (!m.is_free(u) || !m.is_free(v)) continue;
      const double lhs = 2.0 * g.mean_product({u, v}) - 2.0 * g.mean_spin(u) * g.mean_spin(v);
      VertexQuery q;
      q.kind = VertexQuery::Kind::connect;
      q.from = {u};
      q.to = {v};
      const double b = reduced_pair_prob(g, g, q, false) + reduced_pair_prob(g, g, q, true);
      CHECK(std::abs(lhs - 4.0 * b) < kTol);
    }
  }
}

TEST_CASE("surface tension", "[oracle]") {
  const Region ann = Region::annulus(-1, 2);
  const std::vector<int> inner = {ann.index({0, 0})};
  std::vector<int> outer;
  for (Coord c : ring({0, 0}, 2)) outer.push_back(ann.index(c));

  SECTION("zero field gives a nonnegative tension") {
    for (double T : {kTc, 0.8 * kTc, 3.0}) CHECK(exact_surface_tension(ann, inner, outer, Field(ann), 0.0, T) >= 0.0);
  }
  SECTION("invariant under a global field flip") {
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Field f = sample_field(ann, 21, k);
      const Field g = flip_field(f, ann.interior());
      CHECK(std::abs(exact_surface_tension(ann, inner, outer, f, 1.0, kTc) -
                     exact_surface_tension(ann, inner, outer, g, 1.0, kTc)) < 1e-9);
    }
  }
  SECTION("equals -T log(1 - P(Con))") {
    for (double T : {kTc, 0.8 * kTc})
      for (std::uint64_t k = 0; k < 5; ++k) {
        const Field f = sample_field(ann, 22, k);
        const double tension = exact_surface_tension(ann, inner, outer, f, 1.0, T);
        const double con = exact_pair_event_prob(annulus_spec(ann, T, 1, 1, f, 1.0),
                                                 annulus_spec(ann, T, -1, -1, f, 1.0), PairEvent::con(-1, 2));
        CHECK(std::abs(tension + T * std::log1p(-con)) < 1e-8);
      }
  }
  SECTION("overlapping sets are rejected") {
    CHECK_THROWS_AS(exact_surface_tension(ann, inner, inner, Field(ann), 0.0, kTc), std::invalid_argument);
  }
}

TEST_CASE("truncated correlation dominates the isolated FK connection", "[oracle][property]") {
  // <s_u; s_v> >= P(u <-> v, u not connected to the boundary clusters) under
  // the FK law with the plus and minus boundary parts kept apart.
  const Region b2 = Region::box(2);
  const Model probe = compile(GibbsSpec(b2, kTc, BoundaryCondition::plus()));
  Rng rng(derive_seed(9, StreamTag::test));
  std::vector<BoundaryCondition> bcs = {BoundaryCondition::plus(), random_boundary(b2, rng)};
  std::vector<std::int8_t> alt(b2.boundary().size());
  for (std::size_t k = 0; k < alt.size(); ++k) alt[k] = k % 2 ? 1 : -1;
  bcs.push_back(BoundaryCondition::explicit_spins(alt));
  const std::vector<std::pair<Coord, Coord>> pairs = {{{0, 0}, {1, 0}}, {{-1, -1}, {1, 1}}, {{-1, 1}, {1, 1}}};
  for (const BoundaryCondition& bc : bcs) {
    const GibbsSpec spec(b2, kTc, bc);
    const Model m = compile(spec);
    const auto law = exact_fk_law(m, fk_p(kTc));
    std::vector<double> iso(pairs.size(), 0.0);
    for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
      if (law[mask] == 0.0) continue;
      Dsu d(m.n + 1);
      for (int v = 0; v < m.n; ++v)
        if (!m.is_free(v)) d.unite(v, m.n);
      for (int e = 0; e < m.edge_count(); ++e)
        if ((mask >> e) & 1) d.unite(m.edges[e][0], m.edges[e][1]);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const int u = b2.index(pairs[k].first), v = b2.index(pairs[k].second);
        if (d.find(u) == d.find(v) && d.find(u) != d.find(m.n)) iso[k] += law[mask];
      }
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int u = b2.index(pairs[k].first), v = b2.index(pairs[k].second);
      CHECK(exact_correlation(spec, {u, v}, true) >= iso[k] - kTol);
    }
  }
  CHECK(probe.edge_count() == 24);
}
