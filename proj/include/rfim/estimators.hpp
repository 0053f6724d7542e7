#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfim/disagreement.hpp"
#include "rfim/sampler.hpp"

namespace rfim {

/// A Monte Carlo estimate with its batch-means standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  /// Sample variance divided by se^2 (equals the sample count for i.i.d. data).
  double effective_samples = 0.0;
  std::uint64_t samples = 0;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::string fingerprint;
};

/// Mean and batch-means error of a correlated series (batches of equal size;
/// trailing samples that do not fill a batch are dropped from the error only).
Estimate batch_means(const std::vector<double>& series, int batches = 32);

/// Mean over replicas with the spread of the replica values as the error.
Estimate replica_mean(const std::vector<Estimate>& replicas);

/// Linear-interpolation quantile (type 7) of unsorted data, q in [0, 1].
double quantile(std::vector<double> data, double q);

/// The quantiles reported for quenched lists.
constexpr std::array<double, 5> kQuenchedLevels = {0.05, 0.25, 0.5, 0.75, 0.95};

/// Run fn(i) for i in [0, count) on `threads` workers. Each index is handled
/// exactly once and results are written by index, so output never depends on
/// the worker count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Shared Monte Carlo settings for the estimators.
struct RunSettings {
  UpdateSchedule schedule;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Batches per chain for the error estimate.
  int batches = 32;
};

struct InfluenceResult {
  /// Average over field replicas of the per-replica boundary influence.
  Estimate annealed;
  /// One estimate per field replica.
  std::vector<Estimate> quenched;
  std::array<double, 5> quantiles{};
};

/// m(T, N, eps) on box(N) from the coupled plus/minus chains through the
/// indicator that o lies in the boundary-anchored disagreement set. Replica r
/// uses the field sample_field(box(N), seed, r) and chain seed derived from
/// (seed, r), so runs are reproducible replica by replica.
InfluenceResult estimate_boundary_influence(double T, int n, double eps, int replicas, const RunSettings& run);

/// Probability of a pair event under the coupled chains of two specs. With
/// replicas > 1 the field of `plus` is replaced per replica by
/// sample_field(region, seed, r) (the specs' strength is kept).
Estimate estimate_event_prob(const PairEvent& event, const GibbsSpec& plus, const GibbsSpec& minus, int replicas,
                             const RunSettings& run);

/// <|G1 ∩ D_dG2|> under the plus/minus product measure on G2 (box(n2)) for G1 =
/// box(n1) with the same centre.
Estimate estimate_disagreement_count(int n1, int n2, const Field& field, double eps, double T,
                                     const RunSettings& run);

enum class Verdict { good, bad, undetermined };
const char* to_string(Verdict v);

struct GoodBoxThresholds {
  /// Lower bound required for the worst tested Around probability.
  double around = 0.1;
  /// Required fraction of sampled points meeting the (ii) condition.
  double fraction = 0.5;
  /// Number of points of the inner box sampled for (ii).
  int points = 8;
  /// Separation, in standard errors, needed for a decided comparison.
  double z = 2.0;
};

struct GoodBoxResult {
  Verdict verdict = Verdict::undetermined;
  Verdict part_i = Verdict::undetermined;
  Verdict part_ii = Verdict::undetermined;
  /// Around probability under the two extreme boundaries (+/- and -/+).
  Estimate around_plus_minus;
  Estimate around_minus_plus;
  /// Fraction of sampled points that met / failed the (ii) condition.
  double ii_met = 0.0;
  double ii_failed = 0.0;
  /// Always "extreme boundaries only": every other boundary pair is untested.
  std::string label;
};

/// Good-box classification of Lambda_M(u) with the field on Lambda_5M(u). The
/// budget is the number of snapshots per chain pair; when the statistics do
/// not separate from the thresholds the verdict is undetermined.
GoodBoxResult classify_good_box(Coord u, int m, const Field& field, double eps, double T,
                                const GoodBoxThresholds& thresholds, const RunSettings& run);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  /// 95% confidence interval of the slope.
  double ci_low = 0.0;
  double ci_high = 0.0;
  double chi2 = 0.0;
};

struct FitRow {
  double n = 0.0;
  double m = 0.0;
  double se = 0.0;
};

/// Weighted least squares of log m on log N with weights (m / se)^2 (equal
/// weights when any se is zero). The slope error is inflated by
/// sqrt(chi2 / dof) when that exceeds one. Needs at least 3 rows with N
/// strictly increasing and m > 0.
PowerLawFit fit_power_law(const std::vector<FitRow>& rows);

enum class XiMode { target, half_zero_field };

struct XiSearch {
  int start = 2;
  int max_n = 256;
  /// Separation, in standard errors, needed to call a point above or below.
  double z = 2.0;
  /// Bisect between the last two doubling points; without it the bracket
  /// stays on the doubling grid.
  bool refine = true;
};

struct XiBracket {
  /// Largest N shown to be above the threshold (0 when none).
  int lower = 0;
  /// Smallest N shown to be below the threshold (0 when open).
  int upper = 0;
  bool open = true;
  /// Every evaluated (N, m, se, threshold, threshold se).
  std::vector<std::array<double, 5>> evaluations;
};

/// Doubling then bisection for the smallest N with m(N) below the threshold:
/// the fixed target (mode target) or half of m0(N) (mode half_zero_field).
/// Points within z standard errors of the threshold stop the refinement.
XiBracket find_correlation_length(const std::function<Estimate(int)>& m_eps,
                                  const std::function<Estimate(int)>& m_zero, XiMode mode, double target,
                                  const XiSearch& search);

struct ScalingRow {
  double T = 0.0;
  int n = 0;
  double eps = 0.0;
  double m = 0.0;
  double se = 0.0;
  double x() const;
  double y() const;
  double y_se() const;
};

/// Annealed m over an (N, eps) grid; rows sorted by (N, eps). Replica fields
/// are shared across eps (only the strength changes).
std::vector<ScalingRow> scaling_table(double T, const std::vector<int>& ns, const std::vector<double>& eps,
                                      int replicas, const RunSettings& run);

/// CSV with header T,N,eps,m,se,x,y and 17 significant digits.
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

enum class FkBoundary { wired, free };

/// Frequency with which Lambda_{1.5q} is good (open crossings of the four
/// q x 3q side strips between their short sides) under the zero-field FK
/// measure on Lambda_2q. Needs p_c < p < 1 and q even.
Estimate fk_good_box_check(double p, int q, FkBoundary boundary, int samples, const RunSettings& run);

/// Whether Lambda_{1.5q} is good in the bond configuration (model built on box(2q)).
bool fk_box_is_good(const Model& m, const BondConfig& bonds, int q);

/// o in the boundary-anchored disagreement set, by search from o.
bool origin_in_boundary_component(const Model& m, const PairConfig& pair, int origin,
                                  const std::vector<char>& is_anchor);

}  // namespace rfim
