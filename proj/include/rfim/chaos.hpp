#pragma once

#include <vector>

#include "rfim/model.hpp"

namespace rfim {

/// The expansions use the Gibbs weight exp(-H/T), so every field factor is
/// tanh(eps h_v / T). Coefficients <sigma^I> always come from the exact
/// zero-field measure with the same region and boundary.

/// Largest order accepted by expansion_terms (the per-order term lists grow
/// binomially; the aggregate quantities below use all orders at once).
constexpr int kMaxTermOrder = 4;

struct ExpansionTerm {
  int order = 0;
  /// Vertex indices of I.
  std::vector<int> sites;
  /// <sigma^I> at zero field.
  double coefficient = 0.0;
  /// prod_{v in I} tanh(eps h_v / T).
  double field_factor = 0.0;
};

/// Every term of order k (k <= kMaxTermOrder), sites ascending.
std::vector<ExpansionTerm> expansion_terms(const GibbsSpec& spec, int k);

/// Phi_k = sum over |I| = k of <sigma^I>_0 prod tanh(eps h_v / T). Zero for k
/// above the number of free sites.
double phi_k(const GibbsSpec& spec, int k);

struct ZRatio {
  double truncated = 0.0;
  double exact = 0.0;
  double tail = 0.0;
};

/// Z(eps h) / (Z(0) prod cosh(eps h_v / T)) against its truncation at k_max.
ZRatio z_ratio_expansion(const GibbsSpec& spec, int k_max);
/// The same for the product of two copies; the truncation keeps |I|+|J| <= k_max.
ZRatio z_ratio_expansion(const GibbsSpec& plus, const GibbsSpec& minus, int k_max);

/// Boundary-influence expansion: numerator sum_{I,J} [<s_o s^I>+ <s^J>- -
/// <s^I>+ <s_o s^J>-] tau^I tau^J and denominator <prod(1+s tau)>+ <prod(1+s tau)>-.
struct InfluenceExpansion {
  double numerator = 0.0;
  double denominator = 0.0;
  /// numerator / denominator.
  double assembled = 0.0;
  /// <sigma_o>+ - <sigma_o>- under the field, computed directly.
  double exact = 0.0;
  /// <sigma_o>+ - <sigma_o>- at zero field.
  double zero_field = 0.0;
};

InfluenceExpansion boundary_influence_expansion(const GibbsSpec& plus, const GibbsSpec& minus, int v);

struct Membership {
  bool member = false;
  double value = 0.0;
  double bound = 0.0;
  /// bound - |value| (for ho_membership: bound - |deviation|).
  double slack = 0.0;
};

/// |<prod(1 + sigma_v tanh(eps h_v / T))>^{side}_{R,0}| <= 1 + sqrt(eps M^(7/8)),
/// M the short half-side of the rectangle (or N for a box).
Membership hstar_membership(const Field& field, double eps, double T, const Region& rect, int side);

/// The origin condition derived from the assembled influence identity: the
/// expansion numerator deviates from the zero-field difference by at most
/// sqrt(eps N^(7/8)) <sigma_o>+_0 on the box of radius N.
Membership ho_membership(const Field& field, double eps, double T, const Region& box);

/// F(I) = prod_{x in I} dist(x, dR u I\{x})^(-1/4), Euclidean distances, with
/// dR the interior boundary of the region. Points must be interior vertices.
double f_weight(const std::vector<Coord>& points, const Region& region);

/// F_R(I, J) with d(x) = min{dist(x, dR), dist(x, dR'), half the distance to
/// the nearest other point of I u J} - 1, floored at 1 before the -1/4 power.
double f_rect_weight(const std::vector<Coord>& i, const std::vector<Coord>& j, const Region& outer,
                     const Region& inner);

/// Sum of F(I)^2 over all k-subsets of the interior vertices (capped at 10^7
/// subsets).
double f_square_sum(const Region& region, int k);

}  // namespace rfim
