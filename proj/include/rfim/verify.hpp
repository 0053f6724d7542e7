#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfim/lattice.hpp"

namespace rfim {

/// Outcome of one exact identity or inequality check. `value` is the worst
/// deviation (identities) or the most negative slack (inequalities), compared
/// against `tolerance`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  std::string detail;
};

struct CheckOptions {
  /// Random fields per instance.
  int fields = 5;
  std::uint64_t seed = 1;
  /// Multiplies t^2 in the extended weights; any value other than 1 breaks the
  /// coupling with the FK model and must make the coupling check fail.
  double t2_factor = 1.0;
};

/// Boundary conditions used by the exact checks on a region: all plus, all
/// minus, and an alternating pattern.
enum class BoundaryPattern { plus, minus, mixed };

/// FK bond law against the edge law of the extended model (total variation,
/// which bounds every event difference) on box(n) for n in `boxes`.
CheckResult check_coupling(const std::vector<int>& boxes, const CheckOptions& options);

/// P(o in D_boundary) under the exact pair measure against half the
/// difference of the plus and minus centre averages.
CheckResult check_disagreement_identity(const std::vector<int>& boxes, const std::vector<double>& eps,
                                        const CheckOptions& options);

/// Vertex-reduced pair probabilities against brute-force enumeration of both
/// extended measures on box(1).
CheckResult check_pair_reduction(const CheckOptions& options);

/// The exact pair measure is invariant under the swap map on box(1), for every
/// single-site anchor, with plus/minus, equal and random mixed boundaries.
CheckResult check_swap_invariance(const CheckOptions& options);

/// P(A and B) >= P(A) P(B) for pairs of increasing pair events on box(1).
CheckResult check_pair_fkg(const CheckOptions& options);

/// P^{-/+} <= P^{xi+/xi-} <= P^{+/-} for {o in D_boundary} on box(1), over
/// every boundary pair (exhaustive) or `samples` random pairs.
CheckResult check_cbc(bool exhaustive, int samples, const CheckOptions& options);

/// Surface tension against -T log(1 - P(Con)) on the annulus with the centre
/// as inner boundary, at each temperature.
CheckResult check_surface_tension(const std::vector<double>& temperatures, const CheckOptions& options);

/// Surface tension against the field-free bound 2T log((1+phi)/(1-phi)) over
/// `fields` random fields.
CheckResult check_surface_tension_bound(double T, int fields, const CheckOptions& options);

/// Full chaos expansion (single copy and pair) against the exact ratio.
CheckResult check_chaos_telescoping(const std::vector<int>& boxes, const CheckOptions& options);

/// The pair-ratio tail |exact - truncated| is nonincreasing in k_max at each
/// strength in `eps` (up to a 1e-13 roundoff floor) on box(2).
CheckResult check_chaos_tail(const std::vector<double>& eps, const CheckOptions& options);

/// Boundary-influence expansion assembled from zero-field coefficients against
/// the exact centre difference.
CheckResult check_influence_expansion(const std::vector<int>& boxes, const CheckOptions& options);

/// Exact heat-bath, Wolff and Swendsen-Wang kernels fix the Gibbs vector on
/// box(n), eps in {0, 1}, plus, minus and free boundaries (Swendsen-Wang only
/// where the model has at most 20 edges).
CheckResult check_kernel_stationarity(const std::vector<int>& boxes, const CheckOptions& options);

/// P^{+/-}(Con) <= 1 - ((1-phi)/(1+phi))^2 with phi the wired/wired FK
/// connection, on the annulus with the centre as inner boundary.
CheckResult check_con_bound(const std::vector<double>& eps, const CheckOptions& options);

/// P(Con2) <= P(Con)^2 at zero field, over every pair of ring-uniform
/// boundaries and `samples` random explicit boundary pairs.
CheckResult check_bk(int samples, const CheckOptions& options);

/// Con2 implies Con, as a pure implication on random configuration pairs of
/// annulus(m, n).
CheckResult check_con2_implies_con(int m, int n, int samples, const CheckOptions& options);

/// log Z and <sigma_o> on box(1) with plus boundary against their closed forms.
CheckResult check_single_site(const CheckOptions& options);

enum class VerifyLevel { fast, full };

/// The identity suite. The fast level uses box(1) and the centre annulus of
/// box(2); the full level adds box(2) for every box-based check and the
/// exhaustive boundary sweep.
std::vector<CheckResult> run_verify(VerifyLevel level, const CheckOptions& options);

}  // namespace rfim
