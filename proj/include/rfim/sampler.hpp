#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rfim/disagreement.hpp"
#include "rfim/model.hpp"
#include "rfim/rng.hpp"

namespace rfim {

/// One Markov chain: a model (shared, immutable) and the current vertex spins.
/// Fixed sites always hold their boundary value.
class ChainState {
 public:
  /// Free spins start at `initial` (+1 or -1).
  ChainState(std::shared_ptr<const Model> model, std::uint64_t seed, int initial = 1);

  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> model_ptr() const { return model_; }
  const std::vector<std::int8_t>& spins() const { return spins_; }
  std::vector<std::int8_t>& mutable_spins() { return spins_; }
  Rng& rng() { return rng_; }
  std::uint64_t updates() const { return updates_; }
  void count_update() { ++updates_; }

  /// -H/T recomputed from scratch.
  double log_weight() const { return model_->log_weight(spins_); }
  /// Effective field on a free site: eps h_v plus its fixed neighbours.
  double effective_field(int v) const { return effective_[v]; }

 private:
  std::shared_ptr<const Model> model_;
  std::vector<std::int8_t> spins_;
  std::vector<double> effective_;
  Rng rng_;
  std::uint64_t updates_ = 0;
};

/// One pass of single-site heat-bath updates over the free sites in order.
void heat_bath_sweep(ChainState& state);

/// One single-cluster flip. The cluster grows over aligned free neighbours with
/// probability p = 1 - exp(-2/T); each cluster site aligned with its effective
/// field links to the ghost with probability 1 - exp(-2|g_v|/T). A cluster
/// linked to the ghost stays put; any other cluster flips with probability 1/2.
/// Returns the cluster size (0 when the cluster was frozen).
int wolff_update(ChainState& state);

/// Swendsen-Wang step: open FK bonds on agreeing edges, then give every cluster
/// without a fixed site a fresh sign drawn from its field weight.
void sw_update(ChainState& state);

/// Edge spins given vertex spins: an agreeing edge takes the common value with
/// probability 1/(1+t^2), every other edge is 0.
ExtendedConfig resample_extended(const Model& m, const std::vector<std::int8_t>& spins, Rng& rng);
/// FK bonds given vertex spins: agreeing edges open with probability p.
BondConfig resample_bonds(const Model& m, const std::vector<std::int8_t>& spins, Rng& rng);

/// Exact one-step transition applied to a law over the free spins (indexed as
/// GibbsTable::prob). Used to check stationarity on tiny models.
enum class KernelKind { heat_bath, wolff, swendsen_wang };
std::vector<double> apply_exact_kernel(const Model& m, KernelKind kind, const std::vector<double>& law);

enum class ClusterMove { wolff, swendsen_wang };

/// Burn-in and measurement plan for a chain. One update is a cluster move
/// followed by sweeps_per_update heat-bath sweeps.
struct UpdateSchedule {
  ClusterMove cluster = ClusterMove::swendsen_wang;
  int burn_in_cluster = 0;
  int burn_in_sweeps = 0;
  int measurement_updates = 0;
  int thinning = 1;
  int sweeps_per_update = 1;

  int snapshot_count() const { return thinning > 0 ? measurement_updates / thinning : 0; }
  /// Throws std::invalid_argument on negative counts or thinning < 1.
  void validate() const;
  /// Burn-in of 20 heat-bath sweeps and 100 + 4N updates, then one
  /// Swendsen-Wang move plus one sweep per snapshot.
  static UpdateSchedule standard(int n, int snapshots);
};

/// Apply one scheduled update (a cluster move and its sweeps).
void scheduled_update(ChainState& state, const UpdateSchedule& schedule);
/// Run the burn-in phase of a schedule.
void burn_in(ChainState& state, const UpdateSchedule& schedule);

/// Two extended configurations taken at one measurement step.
struct PairState {
  std::uint64_t index = 0;
  PairConfig pair;
};

struct CoupledOptions {
  /// Feed the same random stream (and the same start) to both chains.
  bool share_stream = false;
};

/// Run a plus chain and a minus chain on models with the same graph and hand
/// every snapshot (with freshly resampled edge spins) to `visit`. The plus
/// chain starts from all +1, the minus chain from all -1.
void run_coupled_chains(std::shared_ptr<const Model> plus, std::shared_ptr<const Model> minus,
                        const UpdateSchedule& schedule, std::uint64_t seed,
                        const std::function<void(const PairState&)>& visit, CoupledOptions options = {});

/// Spec-level convenience: compiles both specs (they must share region, field and T).
void run_coupled_chains(const GibbsSpec& plus, const GibbsSpec& minus, const UpdateSchedule& schedule,
                        std::uint64_t seed, const std::function<void(const PairState&)>& visit,
                        CoupledOptions options = {});

/// Binary snapshot dump: magic "RFIMSNP1", then n and E as little-endian
/// uint32, then per snapshot the index (uint64) and both extended
/// configurations at two bits per site (00 = -1, 01 = 0, 10 = +1).
void write_snapshot_header(std::ostream& out, const Model& m);
void write_snapshot(std::ostream& out, const PairState& state);
/// Read back every snapshot of a dump.
std::vector<PairState> read_snapshots(std::istream& in);

}  // namespace rfim
