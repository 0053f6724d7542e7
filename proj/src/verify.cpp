#include "rfim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rfim/chaos.hpp"
#include "rfim/disagreement.hpp"
#include "rfim/disorder.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"
#include "rfim/sampler.hpp"

namespace rfim {

namespace {

constexpr double kExact = 1e-10;

/// Running worst case for one check.
class Tracker {
 public:
  Tracker(std::string name, double tolerance, bool slack) : slack_(slack) {
    r_.name = std::move(name);
    r_.tolerance = tolerance;
    r_.value = slack ? std::numeric_limits<double>::infinity() : 0.0;
  }

  /// Record an absolute deviation (identity checks).
  void deviation(double d, const std::string& where) {
    ++r_.cases;
    if (!(d <= r_.value) || std::isnan(d)) {
      r_.value = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
      worst_ = where;
    }
  }
  /// Record a slack that should be >= -tolerance (inequality checks).
  void slack(double s, const std::string& where) {
    ++r_.cases;
    if (!(s >= r_.value) || std::isnan(s)) {
      r_.value = std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
      worst_ = where;
    }
  }
  void note(const std::string& extra) { extra_ = extra; }

  CheckResult finish() {
    if (slack_)
      r_.passed = r_.cases > 0 && r_.value >= -r_.tolerance;
    else
      r_.passed = r_.cases > 0 && r_.value <= r_.tolerance;
    std::ostringstream d;
    d << (slack_ ? "min slack " : "max deviation ") << r_.value << " over " << r_.cases << " cases";
    if (!worst_.empty()) d << "; worst at " << worst_;
    if (!extra_.empty()) d << "; " << extra_;
    r_.detail = d.str();
    return r_;
  }

 private:
  CheckResult r_;
  bool slack_;
  std::string worst_;
  std::string extra_;
};

std::string label(const std::string& what, int n, int field, const char* bc, double eps = -1.0) {
  std::ostringstream s;
  s << what << " box(" << n << ") field " << field << " bc " << bc;
  if (eps >= 0.0) s << " eps " << eps;
  return s.str();
}

const char* pattern_name(BoundaryPattern p) {
  switch (p) {
    case BoundaryPattern::plus:
      return "+";
    case BoundaryPattern::minus:
      return "-";
    case BoundaryPattern::mixed:
      return "mixed";
  }
  return "?";
}

BoundaryCondition boundary_for(const Region& r, BoundaryPattern p) {
  switch (p) {
    case BoundaryPattern::plus:
      return BoundaryCondition::plus();
    case BoundaryPattern::minus:
      return BoundaryCondition::minus();
    case BoundaryPattern::mixed: {
      std::vector<std::int8_t> s(r.boundary().size());
      for (std::size_t k = 0; k < s.size(); ++k) s[k] = k % 2 == 0 ? 1 : -1;
      return BoundaryCondition::explicit_spins(std::move(s));
    }
  }
  return BoundaryCondition::plus();
}

Field test_field(const Region& r, const CheckOptions& o, int k) {
  return sample_field(r, derive_seed(o.seed, StreamTag::test), static_cast<std::uint64_t>(k));
}

std::vector<std::int8_t> random_spins(Rng& rng, std::size_t n) {
  std::vector<std::int8_t> s(n);
  for (auto& x : s) x = rng.bernoulli(0.5) ? 1 : -1;
  return s;
}

double half_difference(const GibbsSpec& plus, const GibbsSpec& minus, int v) {
  return 0.5 * (exact_gibbs(compile(plus)).mean_spin(v) - exact_gibbs(compile(minus)).mean_spin(v));
}

/// Centre annulus of box(2): ring 2 outside and the centre as inner boundary.
Region centre_annulus() { return Region::annulus(-1, 2); }

std::vector<int> ring_of(const Region& r, int k) {
  std::vector<int> out;
  for (Coord c : ring(r.center(), k))
    if (r.index(c) >= 0) out.push_back(r.index(c));
  return out;
}

/// Pair measure of box(1) as an explicit list (both extended laws enumerated).
struct PairLaw {
  Model plus;
  Model minus;
  std::map<std::vector<std::int8_t>, double> a;
  std::map<std::vector<std::int8_t>, double> b;
};

PairLaw pair_law(const GibbsSpec& plus, const GibbsSpec& minus) {
  PairLaw law{compile(plus), compile(minus), {}, {}};
  const EdgeWeights w = EdgeWeights::at(plus.T);
  for_each_extended(exact_gibbs(law.plus), w, [&](const ExtendedConfig& c, double p) { law.a[c.s] += p; });
  for_each_extended(exact_gibbs(law.minus), w, [&](const ExtendedConfig& c, double p) { law.b[c.s] += p; });
  return law;
}

}  // namespace

CheckResult check_coupling(const std::vector<int>& boxes, const CheckOptions& options) {
  Tracker t("coupling: FK law equals extended edge law", kExact, false);
  for (int n : boxes) {
    const Region box = Region::box(n);
    for (int k = 0; k < options.fields; ++k) {
      // box(1) runs every boundary pattern; larger boxes cycle through them.
      std::vector<BoundaryPattern> patterns = {BoundaryPattern::plus, BoundaryPattern::minus, BoundaryPattern::mixed};
      if (n > 1) patterns = {patterns[k % 3]};
      for (BoundaryPattern p : patterns) {
        const GibbsSpec spec(box, kTc, boundary_for(box, p), test_field(box, options, k), 1.0);
        const Model m = compile(spec);
        EdgeWeights w = EdgeWeights::at(spec.T);
        w.t2 *= options.t2_factor;
        const double tv = total_variation(exact_fk_law(m, fk_p(spec.T)), exact_extended_edge_law(m, w));
        t.deviation(tv, label("coupling", n, k, pattern_name(p)));
      }
    }
  }
  if (options.t2_factor != 1.0) t.note("t^2 scaled by " + std::to_string(options.t2_factor));
  return t.finish();
}

CheckResult check_disagreement_identity(const std::vector<int>& boxes, const std::vector<double>& eps,
                                        const CheckOptions& options) {
  Tracker t("disagreement representation of the boundary influence", kExact, false);
  for (int n : boxes) {
    const Region box = Region::box(n);
    const int o = box.index(box.center());
    for (int k = 0; k < options.fields; ++k)
      for (double e : eps) {
        const Field f = test_field(box, options, k);
        const GibbsSpec plus(box, kTc, BoundaryCondition::plus(), f, e);
        const GibbsSpec minus(box, kTc, BoundaryCondition::minus(), f, e);
        const double lhs = exact_pair_event_prob(plus, minus, PairEvent::origin());
        t.deviation(std::abs(lhs - half_difference(plus, minus, o)), label("identity", n, k, "+/-", e));
      }
  }
  return t.finish();
}

CheckResult check_pair_reduction(const CheckOptions& options) {
  Tracker t("vertex reduction matches brute-force pair enumeration", kExact, false);
  const Region box = Region::box(1);
  const std::vector<PairEvent> events = {PairEvent::origin(), PairEvent::hcross(1, 1), PairEvent::hcross(1, 0)};
  for (int k = 0; k < options.fields; ++k) {
    const Field f = test_field(box, options, k);
    const GibbsSpec plus(box, kTc, boundary_for(box, BoundaryPattern::mixed), f, 1.0);
    const GibbsSpec minus(box, kTc, BoundaryCondition::minus(), f, 1.0);
    const Model mp = compile(plus);
    const GibbsTable gp = exact_gibbs(mp);
    const GibbsTable gm = exact_gibbs(compile(minus));
    for (const PairEvent& ev : events) {
      const double brute = brute_force_pair_prob(gp, gm, EdgeWeights::at(kTc), [&](const PairConfig& pc) {
        return detect_event(DisagreementSet(mp, pc), ev).holds;
      });
      const double reduced = exact_pair_event_prob(plus, minus, ev);
      t.deviation(std::abs(brute - reduced), label(ev.describe(), 1, k, "mixed/-"));
    }
  }
  return t.finish();
}

CheckResult check_swap_invariance(const CheckOptions& options) {
  Tracker t("pair measure invariant under the swap map", kExact, false);
  const Region box = Region::box(1);
  Rng rng(derive_seed(options.seed, StreamTag::test, 101));
  for (int k = 0; k < options.fields; ++k) {
    const Field f = test_field(box, options, k);
    for (int c = 0; c < 3; ++c) {
      BoundaryCondition bp = BoundaryCondition::plus(), bm = BoundaryCondition::minus();
      const char* name = "+/-";
      if (c == 1) {
        bm = BoundaryCondition::plus();
        name = "+/+";
      } else if (c == 2) {
        bp = BoundaryCondition::explicit_spins(random_spins(rng, box.boundary().size()));
        bm = BoundaryCondition::explicit_spins(random_spins(rng, box.boundary().size()));
        name = "random";
      }
      const PairLaw law = pair_law(GibbsSpec(box, kTc, bp, f, 1.0), GibbsSpec(box, kTc, bm, f, 1.0));
      // A holds the boundary vertices where the two conditions differ.
      std::vector<int> a;
      for (std::size_t i = 0; i < box.boundary().size(); ++i)
        if (bp.value(i) != bm.value(i)) a.push_back(box.boundary()[i]);
      double worst = 0.0;
      for (int s = 0; s < law.plus.site_count(); ++s)
        for (const auto& [x, px] : law.a)
          for (const auto& [y, py] : law.b) {
            const PairConfig r = swap(law.plus, PairConfig{{x}, {y}}, {s}, a);
            const auto ia = law.a.find(r.plus.s);
            const auto ib = law.b.find(r.minus.s);
            const double q = (ia == law.a.end() ? 0.0 : ia->second) * (ib == law.b.end() ? 0.0 : ib->second);
            worst = std::max(worst, std::abs(q - px * py));
          }
      t.deviation(worst, label("swap", 1, k, name));
    }
  }
  return t.finish();
}

CheckResult check_pair_fkg(const CheckOptions& options) {
  Tracker t("FKG for increasing pair events", kExact, true);
  const Region box = Region::box(1);
  for (int k = 0; k < options.fields; ++k) {
    const Field f = test_field(box, options, k);
    const GibbsSpec plus(box, kTc, BoundaryCondition::plus(), f, 1.0);
    const GibbsSpec minus(box, kTc, BoundaryCondition::minus(), f, 1.0);
    const Model mp = compile(plus);
    const GibbsTable gp = exact_gibbs(mp);
    const GibbsTable gm = exact_gibbs(compile(minus));
    const EdgeWeights w = EdgeWeights::at(kTc);
    std::vector<std::function<bool(const PairConfig&)>> events;
    for (int x : mp.free_sites) events.push_back([x](const PairConfig& p) { return p.plus.s[x] > p.minus.s[x]; });
    for (int e = 0; e < mp.edge_count(); ++e) {
      const int x = mp.n + e;
      events.push_back([x](const PairConfig& p) { return p.plus.s[x] > p.minus.s[x]; });
    }
    events.push_back([&](const PairConfig& p) { return detect_event(DisagreementSet(mp, p), PairEvent::origin()).holds; });
    std::vector<double> single(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) single[i] = brute_force_pair_prob(gp, gm, w, events[i]);
    for (std::size_t i = 0; i < events.size(); ++i)
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        const double both =
            brute_force_pair_prob(gp, gm, w, [&](const PairConfig& p) { return events[i](p) && events[j](p); });
        t.slack(both - single[i] * single[j],
                "field " + std::to_string(k) + " events " + std::to_string(i) + "," + std::to_string(j));
      }
  }
  return t.finish();
}

CheckResult check_cbc(bool exhaustive, int samples, const CheckOptions& options) {
  Tracker t("boundary comparison (+/- >= xi+/xi- >= -/+)", kExact, true);
  const Region box = Region::box(1);
  const std::size_t nb = box.boundary().size();
  const PairEvent ev = PairEvent::origin();
  for (int k = 0; k < std::max(1, options.fields / (exhaustive ? 5 : 1)); ++k) {
    const Field f = test_field(box, options, k);
    auto prob = [&](const BoundaryCondition& a, const BoundaryCondition& b) {
      return exact_pair_event_prob(GibbsSpec(box, kTc, a, f, 1.0), GibbsSpec(box, kTc, b, f, 1.0), ev);
    };
    const double top = prob(BoundaryCondition::plus(), BoundaryCondition::minus());
    const double bottom = prob(BoundaryCondition::minus(), BoundaryCondition::plus());
    auto visit = [&](const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
      const double p = prob(BoundaryCondition::explicit_spins(a), BoundaryCondition::explicit_spins(b));
      t.slack(std::min(top - p, p - bottom), "field " + std::to_string(k));
    };
    if (exhaustive) {
      const std::uint32_t count = 1u << nb;
      std::vector<std::int8_t> a(nb), b(nb);
      for (std::uint32_t x = 0; x < count; ++x)
        for (std::uint32_t y = 0; y < count; ++y) {
          for (std::size_t i = 0; i < nb; ++i) {
            a[i] = (x >> i) & 1 ? 1 : -1;
            b[i] = (y >> i) & 1 ? 1 : -1;
          }
          visit(a, b);
        }
    } else {
      Rng rng(derive_seed(options.seed, StreamTag::test, 102, static_cast<std::uint64_t>(k)));
      for (int i = 0; i < samples; ++i) {
        const auto a = random_spins(rng, nb);
        visit(a, random_spins(rng, nb));
      }
    }
  }
  return t.finish();
}

CheckResult check_surface_tension(const std::vector<double>& temperatures, const CheckOptions& options) {
  Tracker t("surface tension equals -T log(1 - P(Con))", 1e-8, false);
  const Region ann = centre_annulus();
  const auto inner = ring_of(ann, 0);
  const auto outer = ring_of(ann, 2);
  for (double T : temperatures)
    for (int k = 0; k < options.fields; ++k) {
      const Field f = test_field(ann, options, k);
      const double tension = exact_surface_tension(ann, inner, outer, f, 1.0, T);
      const double con = exact_pair_event_prob(annulus_spec(ann, T, 1, 1, f, 1.0), annulus_spec(ann, T, -1, -1, f, 1.0),
                                               PairEvent::con(-1, 2));
      t.deviation(std::abs(tension + T * std::log1p(-con)),
                  "T " + std::to_string(T) + " field " + std::to_string(k));
    }
  return t.finish();
}

CheckResult check_surface_tension_bound(double T, int fields, const CheckOptions& options) {
  Tracker t("surface tension below 2T log((1+phi)/(1-phi))", kExact, true);
  const Region ann = centre_annulus();
  const auto inner = ring_of(ann, 0);
  const auto outer = ring_of(ann, 2);
  const double phi = wired_annulus_connection(ann, T);
  const double bound = 2.0 * T * std::log((1.0 + phi) / (1.0 - phi));
  double largest = 0.0;
  for (int k = 0; k < fields; ++k) {
    const double tension = exact_surface_tension(ann, inner, outer, test_field(ann, options, k), 1.0, T);
    largest = std::max(largest, tension);
    t.slack(bound - tension, "field " + std::to_string(k));
  }
  t.note("bound " + std::to_string(bound) + ", largest tension " + std::to_string(largest));
  return t.finish();
}

CheckResult check_chaos_telescoping(const std::vector<int>& boxes, const CheckOptions& options) {
  Tracker t("chaos expansion reproduces the partition ratio", kExact, false);
  for (int n : boxes) {
    const Region box = Region::box(n);
    const int all = box.interior_count();
    for (int k = 0; k < options.fields; ++k)
      for (double e : {0.3, 1.0}) {
        const Field f = test_field(box, options, k);
        const GibbsSpec plus(box, kTc, BoundaryCondition::plus(), f, e);
        const GibbsSpec minus(box, kTc, BoundaryCondition::minus(), f, e);
        t.deviation(std::abs(z_ratio_expansion(plus, all).tail), label("single", n, k, "+", e));
        t.deviation(std::abs(z_ratio_expansion(plus, minus, 2 * all).tail), label("pair", n, k, "+/-", e));
      }
  }
  return t.finish();
}

CheckResult check_chaos_tail(const std::vector<double>& eps, const CheckOptions& options) {
  Tracker t("chaos pair-ratio tail nonincreasing in k_max", 1e-13, true);
  const Region box = Region::box(2);
  const int all = box.interior_count();
  for (int k = 0; k < options.fields; ++k)
    for (double e : eps) {
      const Field f = test_field(box, options, k);
      const GibbsSpec plus(box, kTc, BoundaryCondition::plus(), f, e);
      const GibbsSpec minus(box, kTc, BoundaryCondition::minus(), f, e);
      double previous = std::abs(z_ratio_expansion(plus, minus, 0).tail);
      double worst = std::numeric_limits<double>::infinity();
      for (int km = 1; km <= 2 * all; ++km) {
        const double tail = std::abs(z_ratio_expansion(plus, minus, km).tail);
        worst = std::min(worst, previous - tail);
        previous = tail;
      }
      t.slack(worst, label("tail", 2, k, "+/-", e));
    }
  return t.finish();
}

CheckResult check_influence_expansion(const std::vector<int>& boxes, const CheckOptions& options) {
  Tracker t("boundary-influence expansion assembles the exact difference", kExact, false);
  for (int n : boxes) {
    const Region box = Region::box(n);
    const int o = box.index(box.center());
    for (int k = 0; k < options.fields; ++k)
      for (double e : {0.3, 1.0}) {
        const Field f = test_field(box, options, k);
        const InfluenceExpansion x = boundary_influence_expansion(
            GibbsSpec(box, kTc, BoundaryCondition::plus(), f, e), GibbsSpec(box, kTc, BoundaryCondition::minus(), f, e), o);
        t.deviation(std::abs(x.assembled - x.exact), label("influence", n, k, "+/-", e));
      }
  }
  return t.finish();
}

CheckResult check_kernel_stationarity(const std::vector<int>& boxes, const CheckOptions& options) {
  Tracker t("heat-bath, Wolff and Swendsen-Wang kernels fix the Gibbs law", kExact, false);
  const std::pair<KernelKind, const char*> kernels[] = {
      {KernelKind::heat_bath, "heat-bath"}, {KernelKind::wolff, "wolff"}, {KernelKind::swendsen_wang, "sw"}};
  for (int n : boxes) {
    const Region box = Region::box(n);
    std::vector<std::pair<BoundaryCondition, const char*>> bcs = {{BoundaryCondition::plus(), "+"},
                                                                  {BoundaryCondition::minus(), "-"}};
    if (n == 1) bcs.push_back({BoundaryCondition::free(), "free"});
    for (const auto& [bc, name] : bcs)
      for (double e : {0.0, 1.0}) {
        const Model m = compile(GibbsSpec(box, kTc, bc, test_field(box, options, 0), e));
        const std::vector<double> law = exact_gibbs(m).prob;
        for (const auto& [kind, kname] : kernels) {
          // The exact Swendsen-Wang kernel enumerates bond sets (20 edges at most).
          if (kind == KernelKind::swendsen_wang && m.edge_count() > 20) continue;
          const std::vector<double> next = apply_exact_kernel(m, kind, law);
          double worst = 0.0;
          for (std::size_t i = 0; i < law.size(); ++i) worst = std::max(worst, std::abs(next[i] - law[i]));
          t.deviation(worst, std::string(kname) + " " + label("kernel", n, 0, name, e));
        }
      }
  }
  return t.finish();
}

CheckResult check_con_bound(const std::vector<double>& eps, const CheckOptions& options) {
  Tracker t("P(Con) <= 1 - ((1-phi)/(1+phi))^2", kExact, true);
  const Region ann = centre_annulus();
  const double phi = wired_annulus_connection(ann, kTc);
  const double bound = 1.0 - std::pow((1.0 - phi) / (1.0 + phi), 2);
  for (double e : eps)
    for (int k = 0; k < options.fields; ++k) {
      const Field f = test_field(ann, options, k);
      const double con = exact_pair_event_prob(annulus_spec(ann, kTc, 1, 1, f, e), annulus_spec(ann, kTc, -1, -1, f, e),
                                               PairEvent::con(-1, 2));
      t.slack(bound - con, "eps " + std::to_string(e) + " field " + std::to_string(k));
    }
  t.note("phi " + std::to_string(phi) + ", bound " + std::to_string(bound));
  return t.finish();
}

CheckResult check_bk(int samples, const CheckOptions& options) {
  Tracker t("P(Con2) <= P(Con)^2 at zero field", kExact, true);
  const Region ann = centre_annulus();
  auto visit = [&](const GibbsSpec& a, const GibbsSpec& b, const std::string& where) {
    const double con = exact_pair_event_prob(a, b, PairEvent::con(-1, 2));
    const double con2 = exact_pair_event_prob(a, b, PairEvent::con2(-1, 2));
    t.slack(con * con - con2, where);
  };
  const Field zero(ann);
  for (int x = 0; x < 16; ++x) {
    const int si = x & 1 ? 1 : -1, so = x & 2 ? 1 : -1, ti = x & 4 ? 1 : -1, to = x & 8 ? 1 : -1;
    visit(annulus_spec(ann, kTc, si, so, zero, 0.0), annulus_spec(ann, kTc, ti, to, zero, 0.0),
          "ring-uniform pair " + std::to_string(x));
  }
  Rng rng(derive_seed(options.seed, StreamTag::test, 103));
  const std::size_t nb = ann.boundary().size();
  for (int i = 0; i < samples; ++i) {
    const GibbsSpec a(ann, kTc, BoundaryCondition::explicit_spins(random_spins(rng, nb)));
    const GibbsSpec b(ann, kTc, BoundaryCondition::explicit_spins(random_spins(rng, nb)));
    visit(a, b, "random pair " + std::to_string(i));
  }
  return t.finish();
}

CheckResult check_con2_implies_con(int m, int n, int samples, const CheckOptions& options) {
  Tracker t("Con2 implies Con on every configuration", 0.0, false);
  const Region ann = Region::annulus(m, n);
  const Model g = compile(GibbsSpec(ann, kTc, BoundaryCondition::free()));
  Rng rng(derive_seed(options.seed, StreamTag::test, 104));
  const int sites = g.site_count();
  int both = 0;
  for (int i = 0; i < samples; ++i) {
    // Densities spread over [0.3, 0.9] so that both events occur often.
    const double q = 0.3 + 0.6 * rng.uniform();
    PairConfig p;
    p.plus.s.assign(sites, 1);
    p.minus.s.assign(sites, 1);
    for (int s = 0; s < sites; ++s)
      if (rng.bernoulli(q)) p.minus.s[s] = s < g.n ? -1 : 0;
    const DisagreementSet d(g, p);
    const bool c2 = detect_event(d, PairEvent::con2(m, n)).holds;
    const bool c = detect_event(d, PairEvent::con(m, n)).holds;
    both += c2;
    t.deviation(c2 && !c ? 1.0 : 0.0, "sample " + std::to_string(i));
  }
  t.note(std::to_string(both) + " samples had Con2");
  return t.finish();
}

CheckResult check_single_site(const CheckOptions& options) {
  Tracker t("single-site partition function and magnetization", kExact, false);
  const Region box = Region::box(1);
  const int o = box.index(box.center());
  for (int k = 0; k < options.fields; ++k)
    for (double e : {0.0, 1.0, 3.0}) {
      const Field f = test_field(box, options, k);
      const double a = (4.0 + e * f.at(o)) / kTc;
      const GibbsSpec spec(box, kTc, BoundaryCondition::plus(), f, e);
      // log Z relative to the largest term keeps the comparison well scaled.
      const double log_z = std::abs(a) + std::log1p(std::exp(-2.0 * std::abs(a)));
      t.deviation(std::abs(exact_log_partition(spec) - log_z), label("log Z", 1, k, "+", e));
      t.deviation(std::abs(exact_spin_average(spec, o) - std::tanh(a)), label("<sigma_o>", 1, k, "+", e));
    }
  return t.finish();
}

std::vector<CheckResult> run_verify(VerifyLevel level, const CheckOptions& options) {
  const bool full = level == VerifyLevel::full;
  const std::vector<int> boxes = full ? std::vector<int>{1, 2} : std::vector<int>{1};
  std::vector<CheckResult> out;
  out.push_back(check_single_site(options));
  out.push_back(check_coupling(boxes, options));
  out.push_back(check_disagreement_identity(boxes, {0.0, 0.3, 1.0, 3.0}, options));
  out.push_back(check_pair_reduction(options));
  out.push_back(check_swap_invariance(options));
  out.push_back(check_pair_fkg(options));
  out.push_back(check_cbc(full, 64, options));
  out.push_back(check_surface_tension({kTc, 0.8 * kTc}, options));
  out.push_back(check_surface_tension_bound(kTc, 20, options));
  out.push_back(check_chaos_telescoping(boxes, options));
  if (full) out.push_back(check_chaos_tail({0.1, 0.05, 0.02}, options));
  out.push_back(check_influence_expansion(boxes, options));
  out.push_back(check_kernel_stationarity(boxes, options));
  out.push_back(check_con_bound({0.0, 1.0}, options));
  out.push_back(check_bk(full ? 256 : 16, options));
  out.push_back(check_con2_implies_con(1, 3, full ? 2000 : 200, options));
  if (full) out.push_back(check_con2_implies_con(0, 4, 2000, options));
  return out;
}

}  // namespace rfim
