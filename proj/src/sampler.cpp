#include "rfim/sampler.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rfim/union_find.hpp"

namespace rfim {

ChainState::ChainState(std::shared_ptr<const Model> model, std::uint64_t seed, int initial)
    : model_(std::move(model)), rng_(seed) {
  if (!model_) throw std::invalid_argument("chain needs a model");
  if (initial != 1 && initial != -1) throw std::invalid_argument("initial spin must be +1 or -1");
  if (!(model_->T >= kMinTemperature)) throw std::invalid_argument("temperature below the 1e-3 floor");
  spins_ = model_->fixed;
  effective_.assign(model_->n, 0.0);
  for (int v : model_->free_sites) {
    spins_[v] = static_cast<std::int8_t>(initial);
    effective_[v] = model_->h[v] + model_->fixed_neighbor_sum(v);
  }
}

void heat_bath_sweep(ChainState& state) {
  const Model& m = state.model();
  auto& s = state.mutable_spins();
  const double beta2 = 2.0 * m.beta();
  for (int v : m.free_sites) {
    double local = m.h[v];
    for (int k = m.adj_start[v]; k < m.adj_start[v + 1]; ++k) local += s[m.adj_site[k]];
    const double up = 1.0 / (1.0 + std::exp(-beta2 * local));
    s[v] = state.rng().uniform() < up ? 1 : -1;
  }
  state.count_update();
}

int wolff_update(ChainState& state) {
  const Model& m = state.model();
  state.count_update();
  if (m.free_count() == 0) return 0;
  auto& s = state.mutable_spins();
  Rng& rng = state.rng();
  const double p = fk_p(m.T);
  const double beta2 = 2.0 * m.beta();
  const int seed = m.free_sites[rng.below(m.free_count())];
  const std::int8_t sign = s[seed];

  thread_local std::vector<char> in_cluster;
  thread_local std::vector<int> cluster;
  in_cluster.assign(m.n, 0);
  cluster.clear();
  cluster.push_back(seed);
  in_cluster[seed] = 1;
  for (std::size_t next = 0; next < cluster.size(); ++next) {
    const int v = cluster[next];
    const double g = state.effective_field(v);
    // A ghost link freezes the cluster, and a frozen cluster is left as it is,
    // so growth can stop at the first link.
    if (sign * g > 0.0 && rng.uniform() < -std::expm1(-beta2 * std::abs(g))) return 0;
    for (int k = m.adj_start[v]; k < m.adj_start[v + 1]; ++k) {
      const int w = m.adj_site[k];
      if (in_cluster[w] || !m.is_free(w) || s[w] != sign) continue;
      if (rng.uniform() < p) {
        in_cluster[w] = 1;
        cluster.push_back(w);
      }
    }
  }
  if (rng.uniform() < 0.5) {
    for (int v : cluster) s[v] = static_cast<std::int8_t>(-sign);
  }
  return static_cast<int>(cluster.size());
}

void sw_update(ChainState& state) {
  const Model& m = state.model();
  auto& s = state.mutable_spins();
  Rng& rng = state.rng();
  const double p = fk_p(m.T);
  UnionFind uf(m.n);
  for (const auto& e : m.edges)
    if (s[e[0]] == s[e[1]] && rng.uniform() < p) uf.unite(e[0], e[1]);
  std::vector<double> field(m.n, 0.0);
  std::vector<std::int8_t> sign(m.n, 0);
  for (int v = 0; v < m.n; ++v) {
    const int r = uf.find(v);
    if (!m.is_free(v)) sign[r] = m.fixed[v];
    else field[r] += m.h[v];
  }
  const double beta2 = 2.0 * m.beta();
  for (int v : m.free_sites) {
    const int r = uf.find(v);
    if (sign[r] == 0) sign[r] = rng.uniform() < 1.0 / (1.0 + std::exp(-beta2 * field[r])) ? 1 : -1;
    s[v] = sign[r];
  }
  state.count_update();
}

ExtendedConfig resample_extended(const Model& m, const std::vector<std::int8_t>& spins, Rng& rng) {
  if (static_cast<int>(spins.size()) != m.n) throw std::invalid_argument("spin vector has the wrong size");
  const double keep = 1.0 / (1.0 + t_squared(m.T));
  ExtendedConfig c;
  c.s.resize(m.site_count());
  std::memcpy(c.s.data(), spins.data(), m.n);
  for (int e = 0; e < m.edge_count(); ++e) {
    const std::int8_t a = spins[m.edges[e][0]];
    c.s[m.n + e] = a == spins[m.edges[e][1]] && rng.uniform() < keep ? a : 0;
  }
  return c;
}

BondConfig resample_bonds(const Model& m, const std::vector<std::int8_t>& spins, Rng& rng) {
  if (static_cast<int>(spins.size()) != m.n) throw std::invalid_argument("spin vector has the wrong size");
  const double p = fk_p(m.T);
  BondConfig b(m.edge_count(), 0);
  for (int e = 0; e < m.edge_count(); ++e)
    b[e] = spins[m.edges[e][0]] == spins[m.edges[e][1]] && rng.uniform() < p;
  return b;
}

namespace {

constexpr int kMaxKernelSpins = 12;

std::vector<double> heat_bath_kernel(const Model& m, std::vector<double> law) {
  const double beta2 = 2.0 * m.beta();
  for (int k = 0; k < m.free_count(); ++k) {
    const int v = m.free_sites[k];
    const std::uint64_t bit = std::uint64_t{1} << k;
    for (std::uint64_t low = 0; low < law.size(); ++low) {
      if (low & bit) continue;
      double local = m.h[v];
      for (int j = m.adj_start[v]; j < m.adj_start[v + 1]; ++j) {
        const int w = m.adj_site[j];
        local += m.is_free(w) ? ((low >> m.free_pos[w]) & 1 ? 1.0 : -1.0) : m.fixed[w];
      }
      const double up = 1.0 / (1.0 + std::exp(-beta2 * local));
      const double total = law[low] + law[low | bit];
      law[low | bit] = total * up;
      law[low] = total * (1.0 - up);
    }
  }
  return law;
}

std::vector<double> wolff_kernel(const Model& m, const std::vector<double>& law) {
  const int f = m.free_count();
  const double p = fk_p(m.T);
  const double q = 1.0 - p;
  const double beta2 = 2.0 * m.beta();
  std::vector<std::pair<int, int>> inner;
  for (const auto& e : m.edges)
    if (m.is_free(e[0]) && m.is_free(e[1])) inner.push_back({m.free_pos[e[0]], m.free_pos[e[1]]});
  auto cut = [&](std::uint64_t a, std::uint64_t b) {
    int c = 0;
    for (const auto& [i, j] : inner) {
      const bool ia = (a >> i) & 1, ja = (a >> j) & 1, ib = (b >> i) & 1, jb = (b >> j) & 1;
      c += (ia && jb) || (ja && ib);
    }
    return c;
  };
  // Probability that the open internal edges of C connect C, by splitting off
  // the component of the lowest site.
  const std::size_t size = std::size_t{1} << f;
  std::vector<double> connected(size, 0.0);
  for (std::uint64_t c = 1; c < size; ++c) {
    const std::uint64_t low = c & (~c + 1);
    if (c == low) {
      connected[c] = 1.0;
      continue;
    }
    const std::uint64_t rest = c ^ low;
    double split = 0.0;
    for (std::uint64_t sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
      const std::uint64_t part = sub | low;
      split += connected[part] * std::pow(q, cut(part, c ^ part));
      if (sub == 0) break;
    }
    connected[c] = 1.0 - split;
  }
  std::vector<double> stay(f);
  std::vector<double> g(f);
  for (int k = 0; k < f; ++k) {
    const int v = m.free_sites[k];
    g[k] = m.h[v] + m.fixed_neighbor_sum(v);
    stay[k] = std::exp(-beta2 * std::abs(g[k]));
  }
  std::vector<double> out(size, 0.0);
  const std::uint64_t full = size - 1;
  for (std::uint64_t sigma = 0; sigma < size; ++sigma) {
    const double w = law[sigma] / f;
    if (w == 0.0) continue;
    double moved = 0.0;
    for (int k0 = 0; k0 < f; ++k0) {
      const bool up = (sigma >> k0) & 1;
      const std::uint64_t same = up ? sigma : ~sigma & full;
      const std::uint64_t seed = std::uint64_t{1} << k0;
      const std::uint64_t others = same ^ seed;
      for (std::uint64_t sub = others;; sub = (sub - 1) & others) {
        const std::uint64_t c = sub | seed;
        if (connected[c] > 0.0) {
          double pc = connected[c] * std::pow(q, cut(c, same ^ c));
          for (int k = 0; k < f; ++k)
            if (((c >> k) & 1) && (up ? g[k] > 0.0 : g[k] < 0.0)) pc *= stay[k];
          const double flip = 0.5 * pc * w;
          out[sigma ^ c] += flip;
          moved += flip;
        }
        if (sub == 0) break;
      }
    }
    out[sigma] += law[sigma] - moved;
  }
  return out;
}

std::vector<double> sw_kernel(const Model& m, const std::vector<double>& law) {
  const double p = fk_p(m.T);
  const double beta2 = 2.0 * m.beta();
  std::vector<double> out(law.size(), 0.0);
  UnionFind uf(m.n);
  for (std::uint64_t sigma = 0; sigma < law.size(); ++sigma) {
    if (law[sigma] == 0.0) continue;
    const auto spins = m.spins_from_mask(sigma);
    std::vector<int> agree;
    for (int e = 0; e < m.edge_count(); ++e)
      if (spins[m.edges[e][0]] == spins[m.edges[e][1]]) agree.push_back(e);
    if (agree.size() > 20) throw std::length_error("exact Swendsen-Wang kernel is capped at 20 agreeing edges");
    for (std::uint64_t open = 0; open < (std::uint64_t{1} << agree.size()); ++open) {
      const int k_open = std::popcount(open);
      const double pb = std::pow(p, k_open) * std::pow(1.0 - p, static_cast<double>(agree.size()) - k_open);
      uf.reset(m.n);
      for (std::size_t j = 0; j < agree.size(); ++j)
        if ((open >> j) & 1) uf.unite(m.edges[agree[j]][0], m.edges[agree[j]][1]);
      std::vector<std::int8_t> sign(m.n, 0);
      std::vector<double> field(m.n, 0.0);
      std::vector<std::uint64_t> members(m.n, 0);
      for (int v = 0; v < m.n; ++v) {
        const int r = uf.find(v);
        if (!m.is_free(v)) sign[r] = m.fixed[v];
        else {
          field[r] += m.h[v];
          members[r] |= std::uint64_t{1} << m.free_pos[v];
        }
      }
      std::uint64_t forced = 0;
      std::vector<std::pair<std::uint64_t, double>> free_clusters;
      for (int r = 0; r < m.n; ++r) {
        if (uf.find(r) != r || members[r] == 0) continue;
        if (sign[r] > 0) forced |= members[r];
        else if (sign[r] == 0) free_clusters.push_back({members[r], 1.0 / (1.0 + std::exp(-beta2 * field[r]))});
      }
      const std::uint64_t outcomes = std::uint64_t{1} << free_clusters.size();
      for (std::uint64_t pick = 0; pick < outcomes; ++pick) {
        std::uint64_t target = forced;
        double pr = law[sigma] * pb;
        for (std::size_t c = 0; c < free_clusters.size(); ++c) {
          if ((pick >> c) & 1) {
            target |= free_clusters[c].first;
            pr *= free_clusters[c].second;
          } else {
            pr *= 1.0 - free_clusters[c].second;
          }
        }
        out[target] += pr;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> apply_exact_kernel(const Model& m, KernelKind kind, const std::vector<double>& law) {
  if (m.free_count() > kMaxKernelSpins)
    throw std::length_error("exact kernels are capped at " + std::to_string(kMaxKernelSpins) + " free spins");
  if (law.size() != (std::size_t{1} << m.free_count()))
    throw std::invalid_argument("law must have one entry per free-spin configuration");
  if (m.free_count() == 0) return law;
  switch (kind) {
    case KernelKind::heat_bath:
      return heat_bath_kernel(m, law);
    case KernelKind::wolff:
      return wolff_kernel(m, law);
    case KernelKind::swendsen_wang:
      return sw_kernel(m, law);
  }
  return law;
}

void UpdateSchedule::validate() const {
  if (burn_in_cluster < 0 || burn_in_sweeps < 0 || measurement_updates < 0 || sweeps_per_update < 0)
    throw std::invalid_argument("schedule counts must be >= 0");
  if (thinning < 1) throw std::invalid_argument("schedule thinning must be >= 1");
}

UpdateSchedule UpdateSchedule::standard(int n, int snapshots) {
  UpdateSchedule s;
  s.cluster = ClusterMove::swendsen_wang;
  s.burn_in_cluster = 100 + 4 * n;
  s.burn_in_sweeps = 20;
  s.thinning = 1;
  s.sweeps_per_update = 1;
  s.measurement_updates = snapshots;
  return s;
}

void scheduled_update(ChainState& state, const UpdateSchedule& schedule) {
  if (schedule.cluster == ClusterMove::wolff)
    wolff_update(state);
  else
    sw_update(state);
  for (int i = 0; i < schedule.sweeps_per_update; ++i) heat_bath_sweep(state);
}

void burn_in(ChainState& state, const UpdateSchedule& schedule) {
  for (int i = 0; i < schedule.burn_in_sweeps; ++i) heat_bath_sweep(state);
  for (int i = 0; i < schedule.burn_in_cluster; ++i) scheduled_update(state, schedule);
}

void run_coupled_chains(std::shared_ptr<const Model> plus, std::shared_ptr<const Model> minus,
                        const UpdateSchedule& schedule, std::uint64_t seed,
                        const std::function<void(const PairState&)>& visit, CoupledOptions options) {
  schedule.validate();
  if (schedule.snapshot_count() == 0) throw std::invalid_argument("schedule has no measurements");
  if (!plus || !minus) throw std::invalid_argument("coupled chains need two models");
  if (plus->n != minus->n || plus->edges != minus->edges || plus->free_sites != minus->free_sites)
    throw std::invalid_argument("coupled chains must share the graph and the free sites");
  const std::uint64_t plus_seed = derive_seed(seed, StreamTag::chain_plus);
  const std::uint64_t minus_seed = options.share_stream ? plus_seed : derive_seed(seed, StreamTag::chain_minus);
  ChainState a(std::move(plus), plus_seed, 1);
  ChainState b(std::move(minus), minus_seed, options.share_stream ? 1 : -1);
  burn_in(a, schedule);
  burn_in(b, schedule);
  PairState snap;
  for (int k = 0; k < schedule.snapshot_count(); ++k) {
    for (int i = 0; i < schedule.thinning; ++i) {
      scheduled_update(a, schedule);
      scheduled_update(b, schedule);
    }
    snap.index = static_cast<std::uint64_t>(k);
    snap.pair.plus = resample_extended(a.model(), a.spins(), a.rng());
    snap.pair.minus = resample_extended(b.model(), b.spins(), b.rng());
    visit(snap);
  }
}

void run_coupled_chains(const GibbsSpec& plus, const GibbsSpec& minus, const UpdateSchedule& schedule,
                        std::uint64_t seed, const std::function<void(const PairState&)>& visit,
                        CoupledOptions options) {
  if (!(plus.region == minus.region) || !(plus.field == minus.field) || plus.eps != minus.eps || plus.T != minus.T)
    throw std::invalid_argument("coupled chains must share region, field, strength and temperature");
  run_coupled_chains(std::make_shared<const Model>(compile(plus)), std::make_shared<const Model>(compile(minus)),
                     schedule, seed, visit, options);
}

namespace {

constexpr char kSnapshotMagic[8] = {'R', 'F', 'I', 'M', 'S', 'N', 'P', '1'};

void put_u32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

bool get_bytes(std::istream& in, unsigned char* b, std::size_t n) {
  in.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

void put_config(std::ostream& out, const ExtendedConfig& c) {
  std::vector<unsigned char> bytes((c.s.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < c.s.size(); ++i) bytes[i / 4] |= static_cast<unsigned char>((c.s[i] + 1) << (2 * (i % 4)));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ExtendedConfig get_config(std::istream& in, std::size_t sites) {
  std::vector<unsigned char> bytes((sites + 3) / 4);
  if (!get_bytes(in, bytes.data(), bytes.size())) throw std::runtime_error("snapshot dump is truncated");
  ExtendedConfig c;
  c.s.resize(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    const int code = (bytes[i / 4] >> (2 * (i % 4))) & 3;
    if (code == 3) throw std::runtime_error("snapshot dump holds an invalid spin code");
    c.s[i] = static_cast<std::int8_t>(code - 1);
  }
  return c;
}

}  // namespace

void write_snapshot_header(std::ostream& out, const Model& m) {
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put_u32(out, static_cast<std::uint32_t>(m.n));
  put_u32(out, static_cast<std::uint32_t>(m.edge_count()));
}

void write_snapshot(std::ostream& out, const PairState& state) {
  put_u64(out, state.index);
  put_config(out, state.pair.plus);
  put_config(out, state.pair.minus);
}

std::vector<PairState> read_snapshots(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kSnapshotMagic, 8) != 0)
    throw std::runtime_error("not a snapshot dump (bad magic)");
  unsigned char b[8];
  if (!get_bytes(in, b, 8)) throw std::runtime_error("snapshot dump header is truncated");
  std::uint32_t n = 0, e = 0;
  for (int i = 0; i < 4; ++i) {
    n |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    e |= static_cast<std::uint32_t>(b[4 + i]) << (8 * i);
  }
  const std::size_t sites = static_cast<std::size_t>(n) + e;
  std::vector<PairState> out;
  while (in.peek() != std::char_traits<char>::eof()) {
    if (!get_bytes(in, b, 8)) throw std::runtime_error("snapshot dump is truncated");
    PairState s;
    for (int i = 0; i < 8; ++i) s.index |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    s.pair.plus = get_config(in, sites);
    s.pair.minus = get_config(in, sites);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rfim
