#include "rfim/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rfim/oracle.hpp"

namespace rfim {

namespace {

/// Zero-field correlations and field factors, both indexed by free-site masks.
struct Expansion {
  Model model;
  std::vector<double> corr;
  std::vector<double> tau;
  double log_cosh = 0.0;
};

Expansion build(const GibbsSpec& spec) {
  GibbsSpec zero = spec;
  zero.eps = 0.0;
  Expansion x;
  x.model = compile(zero);
  x.corr = correlation_table(exact_gibbs(x.model));
  const int f = x.model.free_count();
  std::vector<double> t(f);
  for (int k = 0; k < f; ++k) {
    const double a = spec.eps * spec.field.at(x.model.free_sites[k]) / spec.T;
    t[k] = std::tanh(a);
    x.log_cosh += std::log(std::cosh(a));
  }
  x.tau.assign(x.corr.size(), 1.0);
  for (std::size_t s = 1; s < x.tau.size(); ++s) x.tau[s] = x.tau[s & (s - 1)] * t[std::countr_zero(s)];
  return x;
}

double bracket(const Expansion& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.corr.size(); ++i) s += x.corr[i] * x.tau[i];
  return s;
}

std::vector<double> phi_all(const Expansion& x) {
  std::vector<double> phi(x.model.free_count() + 1, 0.0);
  for (std::size_t i = 0; i < x.corr.size(); ++i) phi[std::popcount(i)] += x.corr[i] * x.tau[i];
  return phi;
}

double exact_ratio(const GibbsSpec& spec, const Expansion& x) {
  return std::exp(exact_log_partition(spec) - exact_gibbs(x.model).log_z - x.log_cosh);
}

void check_pair(const GibbsSpec& a, const GibbsSpec& b) {
  if (!(a.region == b.region) || !(a.field == b.field) || a.eps != b.eps || a.T != b.T)
    throw std::invalid_argument("both copies must share region, field, strength and temperature");
}

double distance(Coord a, Coord b) { return std::hypot(double(a.x - b.x), double(a.y - b.y)); }

double boundary_distance(Coord x, const Region& r) {
  double best = std::numeric_limits<double>::infinity();
  for (int v : r.boundary()) best = std::min(best, distance(x, r.coord(v)));
  return best;
}

}  // namespace

std::vector<ExpansionTerm> expansion_terms(const GibbsSpec& spec, int k) {
  if (k < 0 || k > kMaxTermOrder)
    throw std::length_error("expansion terms are listed up to order " + std::to_string(kMaxTermOrder));
  const Expansion x = build(spec);
  std::vector<ExpansionTerm> out;
  for (std::size_t i = 0; i < x.corr.size(); ++i) {
    if (std::popcount(i) != k) continue;
    ExpansionTerm t;
    t.order = k;
    for (int b = 0; b < x.model.free_count(); ++b)
      if ((i >> b) & 1) t.sites.push_back(x.model.free_sites[b]);
    t.coefficient = x.corr[i];
    t.field_factor = x.tau[i];
    out.push_back(std::move(t));
  }
  return out;
}

double phi_k(const GibbsSpec& spec, int k) {
  if (k < 0) throw std::invalid_argument("expansion order must be >= 0");
  const auto phi = phi_all(build(spec));
  return k < static_cast<int>(phi.size()) ? phi[k] : 0.0;
}

ZRatio z_ratio_expansion(const GibbsSpec& spec, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const Expansion x = build(spec);
  const auto phi = phi_all(x);
  ZRatio r;
  for (int k = 0; k <= k_max && k < static_cast<int>(phi.size()); ++k) r.truncated += phi[k];
  r.exact = exact_ratio(spec, x);
  r.tail = r.exact - r.truncated;
  return r;
}

ZRatio z_ratio_expansion(const GibbsSpec& plus, const GibbsSpec& minus, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  check_pair(plus, minus);
  const Expansion a = build(plus);
  const Expansion b = build(minus);
  const auto pa = phi_all(a);
  const auto pb = phi_all(b);
  ZRatio r;
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size() && static_cast<int>(i + j) <= k_max; ++j) r.truncated += pa[i] * pb[j];
  r.exact = exact_ratio(plus, a) * exact_ratio(minus, b);
  r.tail = r.exact - r.truncated;
  return r;
}

InfluenceExpansion boundary_influence_expansion(const GibbsSpec& plus, const GibbsSpec& minus, int v) {
  check_pair(plus, minus);
  const Expansion a = build(plus);
  const Expansion b = build(minus);
  if (a.model.free_sites != b.model.free_sites) throw std::invalid_argument("both copies must share the free sites");
  if (v < 0 || v >= a.model.n || !a.model.is_free(v)) throw std::invalid_argument("vertex must be interior");
  const std::size_t bit = std::size_t{1} << a.model.free_pos[v];
  // The double sum over (I, J) factorizes into single sums per copy.
  double with_o_plus = 0.0, with_o_minus = 0.0;
  for (std::size_t i = 0; i < a.corr.size(); ++i) {
    with_o_plus += a.corr[i ^ bit] * a.tau[i];
    with_o_minus += b.corr[i ^ bit] * b.tau[i];
  }
  const double plain_plus = bracket(a);
  const double plain_minus = bracket(b);
  InfluenceExpansion out;
  out.numerator = with_o_plus * plain_minus - plain_plus * with_o_minus;
  out.denominator = plain_plus * plain_minus;
  out.assembled = out.numerator / out.denominator;
  out.exact = exact_gibbs(compile(plus)).mean_spin(v) - exact_gibbs(compile(minus)).mean_spin(v);
  out.zero_field = a.corr[bit] - b.corr[bit];
  return out;
}

// The value at zero field equals the bound up to summation roundoff.
constexpr double kMembershipRoundoff = 1e-12;

Membership hstar_membership(const Field& field, double eps, double T, const Region& rect, int side) {
  if (side != 1 && side != -1) throw std::invalid_argument("side must be +1 or -1");
  const BoundaryCondition bc = side > 0 ? BoundaryCondition::plus() : BoundaryCondition::minus();
  const GibbsSpec spec(rect, T, bc, field, eps);
  const auto p = rect.params();
  const int m = rect.kind() == RegionKind::box ? p[0] : std::min(p[0], p[1]);
  Membership out;
  out.value = bracket(build(spec));
  out.bound = 1.0 + std::sqrt(eps * std::pow(double(m), 7.0 / 8.0));
  out.slack = out.bound - std::abs(out.value);
  out.member = out.slack >= -kMembershipRoundoff;
  return out;
}

Membership ho_membership(const Field& field, double eps, double T, const Region& box) {
  if (box.kind() != RegionKind::box) throw std::invalid_argument("ho_membership needs a box");
  const GibbsSpec plus(box, T, BoundaryCondition::plus(), field, eps);
  const GibbsSpec minus(box, T, BoundaryCondition::minus(), field, eps);
  const int o = box.index(box.center());
  const InfluenceExpansion x = boundary_influence_expansion(plus, minus, o);
  // At zero field the minus average is the negated plus average.
  const double plus_zero = 0.5 * x.zero_field;
  Membership out;
  out.value = x.numerator - x.zero_field;
  out.bound = std::sqrt(eps * std::pow(double(box.params()[0]), 7.0 / 8.0)) * plus_zero;
  out.slack = out.bound - std::abs(out.value);
  out.member = out.slack >= -kMembershipRoundoff;
  return out;
}

double f_weight(const std::vector<Coord>& points, const Region& region) {
  double f = 1.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    const int idx = region.index(points[a]);
    if (idx < 0 || region.is_boundary(idx)) throw std::invalid_argument("F weight points must be interior vertices");
    double d = boundary_distance(points[a], region);
    for (std::size_t b = 0; b < points.size(); ++b)
      if (b != a) d = std::min(d, distance(points[a], points[b]));
    if (d <= 0.0) throw std::invalid_argument("F weight points must be distinct");
    f *= std::pow(d, -0.25);
  }
  return f;
}

double f_rect_weight(const std::vector<Coord>& i, const std::vector<Coord>& j, const Region& outer,
                     const Region& inner) {
  std::vector<Coord> all = i;
  all.insert(all.end(), j.begin(), j.end());
  double f = 1.0;
  for (std::size_t a = 0; a < all.size(); ++a) {
    if (!outer.contains(all[a])) throw std::invalid_argument("F_R points must lie in the outer rectangle");
    double d = std::min(boundary_distance(all[a], outer), boundary_distance(all[a], inner));
    for (std::size_t b = 0; b < all.size(); ++b)
      if (b != a) d = std::min(d, 0.5 * distance(all[a], all[b]));
    f *= std::pow(std::max(d - 1.0, 1.0), -0.25);
  }
  return f;
}

double f_square_sum(const Region& region, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  const std::vector<int> interior = region.interior();
  const int n = static_cast<int>(interior.size());
  if (k > n) return 0.0;
  double count = 1.0;
  for (int i = 0; i < k; ++i) count = count * (n - i) / (i + 1);
  if (count > 1e7) throw std::length_error("F square sum is capped at 10^7 subsets");
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  std::vector<Coord> pts(k);
  double total = 0.0;
  while (true) {
    for (int i = 0; i < k; ++i) pts[i] = region.coord(interior[pick[i]]);
    const double f = f_weight(pts, region);
    total += f * f;
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return total;
}

}  // namespace rfim
