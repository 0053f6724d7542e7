#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rfim/disagreement.hpp"
#include "rfim/model.hpp"

namespace rfim {

/// Enumeration caps. Exceeding one raises std::length_error naming the cap.
constexpr int kMaxEnumeratedSpins = 20;
constexpr int kMaxEnumeratedEdges = 26;
constexpr std::uint64_t kMaxExtendedConfigs = std::uint64_t{1} << 22;

/// Exact law of the free spins of a model; entry `mask` is the probability of
/// the configuration in which free site k is +1 iff bit k of mask is set.
struct GibbsTable {
  Model model;
  std::vector<double> prob;
  double log_z = 0.0;

  /// <sigma_v>, exact (fixed sites return their boundary value).
  double mean_spin(int v) const;
  /// <prod_{v in I} sigma_v>.
  double mean_product(const std::vector<int>& sites) const;
};

GibbsTable exact_gibbs(const Model& m);

/// log Z with H summing over pairs with at least one free endpoint.
double exact_log_partition(const GibbsSpec& spec);
double exact_partition(const GibbsSpec& spec);
double exact_spin_average(const GibbsSpec& spec, int v);
/// <sigma^I>, or <sigma_u sigma_v> - <sigma_u><sigma_v> when truncated (|I| = 2).
double exact_correlation(const GibbsSpec& spec, const std::vector<int>& sites, bool truncated);
/// <sigma^I> for every subset I of the free sites, indexed like GibbsTable::prob.
std::vector<double> correlation_table(const GibbsTable& g);

/// Vertex-edge weights of the extended model. The defaults follow from T;
/// overriding t breaks the coupling with the FK model on purpose.
struct EdgeWeights {
  double lambda = 1.0;
  double t2 = 1.0;
  static EdgeWeights at(double T) { return {lambda_weight(T), t_squared(T)}; }
  /// Probability that an edge with agreeing endpoints carries a nonzero spin.
  double open_probability() const { return 1.0 / (1.0 + t2); }
};

/// Exact FK law with field: entry `mask` is the probability of the bond
/// configuration whose open edges are the set bits of mask. Plus and minus
/// fixed sites are wired into two clusters that may not be joined.
std::vector<double> exact_fk_law(const Model& m, double p);

/// Law of the set of edges carrying a nonzero spin under the extended measure
/// built from the W weights (computed independently of the FK law).
std::vector<double> exact_extended_edge_law(const Model& m, const EdgeWeights& w);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

/// Single-configuration events for exact_event_prob.
struct EventSpec {
  enum class Kind { spin_value, spin_product, connection, signed_path };
  Kind kind = Kind::spin_value;
  std::vector<int> a;
  std::vector<int> b;
  int sign = 1;

  static EventSpec spin_value(int v, int s) { return {Kind::spin_value, {v}, {}, s}; }
  /// sigma^I = +1.
  static EventSpec spin_product(std::vector<int> sites) { return {Kind::spin_product, std::move(sites), {}, 1}; }
  /// A joined to B by open edges (FK) or nonzero edge spins (extended).
  static EventSpec connection(std::vector<int> a, std::vector<int> b) {
    return {Kind::connection, std::move(a), std::move(b), 1};
  }
  /// A joined to B through sites whose extended spin equals sign.
  static EventSpec signed_path(std::vector<int> a, std::vector<int> b, int s) {
    return {Kind::signed_path, std::move(a), std::move(b), s};
  }
};

enum class MeasureKind { ising, extended, fk };

/// Exact probability of an event. Edge-only events on the extended measure use
/// the exact edge law; events involving spins enumerate extended configurations.
double exact_event_prob(const GibbsSpec& spec, const EventSpec& event, MeasureKind kind,
                        std::optional<EdgeWeights> weights = std::nullopt);

/// Visit every extended configuration with positive probability.
void for_each_extended(const GibbsTable& g, const EdgeWeights& w,
                       const std::function<void(const ExtendedConfig&, double)>& visit);

/// Brute-force pair probability by enumerating both extended measures.
double brute_force_pair_prob(const GibbsTable& plus, const GibbsTable& minus, const EdgeWeights& w,
                             const std::function<bool(const PairConfig&)>& event);

/// Law of the free vertices lying in the pre-disagreement set (or in the
/// anti-disagreement set): entry W is the probability that they form exactly W.
std::vector<double> disagreement_vertex_law(const GibbsTable& plus, const GibbsTable& minus, bool anti = false);

/// Events that depend only on disagreement vertices and on the edge sites
/// joining two of them. Given the vertex set, each such edge site lies in the
/// set independently with probability d = 1 - (1 - p)^2.
struct VertexQuery {
  enum class Kind { connect, double_crossing };
  Kind kind = Kind::connect;
  std::vector<int> from;
  std::vector<int> to;
  /// Vertices allowed on a connecting path (empty means all).
  std::vector<char> allowed;
};

/// Reduced form of the pair events that admit one (origin, hcross, con, con2).
VertexQuery vertex_query(const Model& m, const PairEvent& event);

/// For each free vertex set W: probability over the edge sites that the query
/// holds, with the fixed sites listed in fixed_in_set also in the set.
std::vector<double> vertex_query_table(const Model& m, const std::vector<char>& fixed_in_set,
                                       const VertexQuery& q, double d);

/// Fixed sites in the pre-disagreement (anti-disagreement) set of two models.
std::vector<char> fixed_disagreement(const Model& plus, const Model& minus, bool anti = false);

/// Exact pair probability through the vertex reduction.
double reduced_pair_prob(const GibbsTable& plus, const GibbsTable& minus, const VertexQuery& q, bool anti = false);

/// Exact probability of a pair event under the product of the two extended
/// measures. Uses the vertex reduction when available and falls back to
/// brute-force enumeration (capped) for the remaining events.
double exact_pair_event_prob(const GibbsSpec& plus, const GibbsSpec& minus, const PairEvent& event);

/// Surface tension T log(Z++ Z-- / (Z+- Z-+)) with A1, A2 fixed and every other
/// vertex of the region free.
double exact_surface_tension(const Region& region, const std::vector<int>& a1, const std::vector<int>& a2,
                             const Field& field, double eps, double T);

/// Zero-field FK probability that the two boundary rings of an annulus are
/// connected when each ring is wired, computed as <sigma_Q> after contracting
/// the inner ring into a free point Q.
double wired_annulus_connection(const Region& annulus, double T);

/// Model of an annulus with boundary spins s_inner on ring M+1 and s_outer on ring N.
GibbsSpec annulus_spec(const Region& annulus, double T, int s_inner, int s_outer, const Field& field, double eps);

}  // namespace rfim
