#include "rfim/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rfim/disorder.hpp"

namespace rfim {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Error floor for a mean of indicators: the spread of (k+2)/(n+4), which stays
/// positive when every sample agrees.
double indicator_floor(double mean, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double p = (mean * nn + 2.0) / (nn + 4.0);
  return std::sqrt(p * (1.0 - p) / (nn + 4.0));
}

void check_run(const RunSettings& run) {
  run.schedule.validate();
  if (run.schedule.snapshot_count() < 1) throw std::invalid_argument("schedule has no measurements");
  if (run.batches < 2) throw std::invalid_argument("batch count must be >= 2");
}

std::vector<char> anchor_mask(const Model& m) {
  std::vector<char> mask(m.site_count(), 0);
  for (int v : outer_boundary_sites(m)) mask[v] = 1;
  return mask;
}

/// Boundary influence at `origin` for one field: the fraction of snapshots
/// where the origin lies in the anchored disagreement set.
Estimate influence_for_field(const Field& field, double eps, double T, Coord origin, std::uint64_t chain_seed,
                             const RunSettings& run) {
  const Region& region = field.region();
  const GibbsSpec plus(region, T, BoundaryCondition::plus(), field, eps);
  const GibbsSpec minus(region, T, BoundaryCondition::minus(), field, eps);
  auto mp = std::make_shared<const Model>(compile(plus));
  auto mm = std::make_shared<const Model>(compile(minus));
  const std::vector<char> anchors = anchor_mask(*mp);
  const int o = region.index(origin);
  if (o < 0) throw std::invalid_argument("origin lies outside the region");
  std::vector<double> series;
  series.reserve(run.schedule.snapshot_count());
  run_coupled_chains(mp, mm, run.schedule, chain_seed, [&](const PairState& s) {
    series.push_back(origin_in_boundary_component(*mp, s.pair, o, anchors) ? 1.0 : 0.0);
  });
  Estimate e = batch_means(series, run.batches);
  e.se = std::max(e.se, indicator_floor(e.value, e.samples));
  e.seed = chain_seed;
  return e;
}

/// Field on `target` copied from `ambient` by coordinate.
Field restrict_field(const Field& ambient, const Region& target) {
  Field f(target);
  for (int v : target.interior()) {
    const int a = ambient.region().index(target.coord(v));
    if (a < 0) throw std::invalid_argument("field does not cover " + target.describe());
    f.set(v, ambient.at(a));
  }
  f.set_provenance(ambient.seed(), ambient.replica());
  return f;
}

Verdict compare(const Estimate& e, double threshold, double z) {
  if (e.value - z * e.se >= threshold) return Verdict::good;
  if (e.value + z * e.se < threshold) return Verdict::bad;
  return Verdict::undetermined;
}

/// Open path between the two short sides of the strip [x0,x1] x [y0,y1]
/// (relative to the centre) using edges inside the strip.
bool strip_crossing(const Model& m, const BondConfig& bonds, const Region& region, int x0, int x1, int y0, int y1,
                    bool vertical) {
  const Coord c = region.center();
  auto inside = [&](Coord p) {
    const int dx = p.x - c.x, dy = p.y - c.y;
    return dx >= x0 && dx <= x1 && dy >= y0 && dy <= y1;
  };
  auto start = [&](Coord p) { return vertical ? p.y - c.y == y0 : p.x - c.x == x0; };
  auto finish = [&](Coord p) { return vertical ? p.y - c.y == y1 : p.x - c.x == x1; };
  std::vector<char> seen(m.n, 0);
  std::vector<int> stack;
  for (int v = 0; v < m.n; ++v) {
    const Coord p = region.coord(v);
    if (inside(p) && start(p)) {
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (finish(region.coord(v))) return true;
    for (int k = m.adj_start[v]; k < m.adj_start[v + 1]; ++k) {
      const int w = m.adj_site[k];
      if (!bonds[m.adj_edge[k]] || seen[w] || !inside(region.coord(w))) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

}  // namespace

Estimate batch_means(const std::vector<double>& series, int batches) {
  if (series.empty()) throw std::invalid_argument("batch means need at least one sample");
  if (batches < 2) throw std::invalid_argument("batch count must be >= 2");
  Estimate e;
  const std::size_t n = series.size();
  e.samples = n;
  e.value = mean_of(series);
  double var = 0.0;
  for (double x : series) var += (x - e.value) * (x - e.value);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), n);
  const std::size_t len = n / b;
  if (b < 2) {
    e.effective_samples = static_cast<double>(n);
    return e;
  }
  std::vector<double> means(b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += series[i * len + k];
    means[i] = s / static_cast<double>(len);
  }
  const double bm = mean_of(means);
  double bv = 0.0;
  for (double x : means) bv += (x - bm) * (x - bm);
  bv /= static_cast<double>(b - 1);
  e.se = std::sqrt(bv / static_cast<double>(b));
  e.effective_samples = e.se > 0.0 ? var / (e.se * e.se) : static_cast<double>(n);
  return e;
}

Estimate replica_mean(const std::vector<Estimate>& replicas) {
  if (replicas.empty()) throw std::invalid_argument("replica mean needs at least one replica");
  Estimate e;
  std::vector<double> values;
  values.reserve(replicas.size());
  for (const Estimate& r : replicas) {
    values.push_back(r.value);
    e.samples += r.samples;
    e.effective_samples += r.effective_samples;
  }
  e.value = mean_of(values);
  e.replicas = static_cast<int>(replicas.size());
  if (replicas.size() == 1) {
    e.se = replicas[0].se;
    return e;
  }
  double v = 0.0;
  for (double x : values) v += (x - e.value) * (x - e.value);
  v /= static_cast<double>(values.size() - 1);
  // The spread of replica values already contains the chain noise; the chain
  // errors set a floor when every replica lands on the same value.
  double chain = 0.0;
  for (const Estimate& r : replicas) chain += r.se * r.se;
  chain /= static_cast<double>(replicas.size() * replicas.size());
  e.se = std::max(std::sqrt(v / static_cast<double>(values.size())), std::sqrt(chain));
  return e;
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) throw std::invalid_argument("quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(data.begin(), data.end());
  const double h = q * static_cast<double>(data.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex guard;
  int failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        // Keep the failure of the lowest index so the reported error does not
        // depend on scheduling.
        std::lock_guard<std::mutex> lock(guard);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool origin_in_boundary_component(const Model& m, const PairConfig& pair, int origin,
                                  const std::vector<char>& is_anchor) {
  const auto& a = pair.plus.s;
  const auto& b = pair.minus.s;
  if (!(a[origin] > b[origin])) return false;
  if (is_anchor[origin]) return true;
  thread_local std::vector<std::uint32_t> stamp;
  thread_local std::uint32_t round = 0;
  thread_local std::vector<int> stack;
  const std::size_t sites = static_cast<std::size_t>(m.site_count());
  if (stamp.size() < sites || ++round == 0) {
    stamp.assign(std::max(stamp.size(), sites), 0);
    round = 1;
  }
  stack.clear();
  stack.push_back(origin);
  stamp[origin] = round;
  bool found = false;
  while (!stack.empty() && !found) {
    const int s = stack.back();
    stack.pop_back();
    for_each_site_neighbor(m, s, [&](int t) {
      if (found || stamp[t] == round || !(a[t] > b[t])) return;
      if (is_anchor[t]) {
        found = true;
        return;
      }
      stamp[t] = round;
      stack.push_back(t);
    });
  }
  return found;
}

InfluenceResult estimate_boundary_influence(double T, int n, double eps, int replicas, const RunSettings& run) {
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  if (replicas < 1) throw std::invalid_argument("at least one field replica is required");
  check_run(run);
  const Region box = Region::box(n);
  InfluenceResult out;
  out.quenched.resize(replicas);
  parallel_for(replicas, run.threads, [&](int r) {
    const Field field = sample_field(box, run.seed, static_cast<std::uint64_t>(r));
    out.quenched[r] = influence_for_field(field, eps, T, box.center(),
                                          derive_seed(run.seed, StreamTag::replica, static_cast<std::uint64_t>(r)), run);
  });
  out.annealed = replica_mean(out.quenched);
  out.annealed.seed = run.seed;
  std::vector<double> values;
  for (const Estimate& e : out.quenched) values.push_back(e.value);
  for (std::size_t k = 0; k < kQuenchedLevels.size(); ++k) out.quantiles[k] = quantile(values, kQuenchedLevels[k]);
  return out;
}

Estimate estimate_event_prob(const PairEvent& event, const GibbsSpec& plus, const GibbsSpec& minus, int replicas,
                             const RunSettings& run) {
  if (replicas < 1) throw std::invalid_argument("at least one replica is required");
  check_run(run);
  plus.validate();
  minus.validate();
  std::vector<Estimate> per(replicas);
  parallel_for(replicas, run.threads, [&](int r) {
    GibbsSpec a = plus, b = minus;
    if (replicas > 1) {
      a.field = sample_field(plus.region, run.seed, static_cast<std::uint64_t>(r));
      b.field = a.field;
    }
    auto ma = std::make_shared<const Model>(compile(a));
    auto mb = std::make_shared<const Model>(compile(b));
    std::vector<double> series;
    const std::uint64_t chain_seed = derive_seed(run.seed, StreamTag::replica, static_cast<std::uint64_t>(r));
    run_coupled_chains(ma, mb, run.schedule, chain_seed, [&](const PairState& s) {
      const DisagreementSet d(*ma, s.pair);
      series.push_back(detect_event(d, event).holds ? 1.0 : 0.0);
    });
    per[r] = batch_means(series, run.batches);
    per[r].se = std::max(per[r].se, indicator_floor(per[r].value, per[r].samples));
    per[r].seed = chain_seed;
  });
  Estimate e = replica_mean(per);
  e.seed = run.seed;
  return e;
}

Estimate estimate_disagreement_count(int n1, int n2, const Field& field, double eps, double T,
                                     const RunSettings& run) {
  if (n1 < 0 || n1 > n2) throw std::invalid_argument("the inner box must lie inside the outer box");
  check_run(run);
  const Region outer = Region::box(n2, field.region().center());
  const Field f = field.region() == outer ? field : restrict_field(field, outer);
  const GibbsSpec plus(outer, T, BoundaryCondition::plus(), f, eps);
  const GibbsSpec minus(outer, T, BoundaryCondition::minus(), f, eps);
  auto mp = std::make_shared<const Model>(compile(plus));
  auto mm = std::make_shared<const Model>(compile(minus));
  std::vector<int> inner;
  for (int v = 0; v < outer.size(); ++v)
    if (linf(outer.coord(v), outer.center()) <= n1) inner.push_back(v);
  const std::vector<int> anchors = outer_boundary_sites(*mp);
  std::vector<double> series;
  const std::uint64_t chain_seed = derive_seed(run.seed, StreamTag::replica);
  run_coupled_chains(mp, mm, run.schedule, chain_seed, [&](const PairState& s) {
    const DisagreementSet d(*mp, s.pair);
    const std::vector<char> mask = d.anchored_mask(anchors);
    double count = 0.0;
    for (int v : inner) count += mask[v];
    series.push_back(count);
  });
  Estimate e = batch_means(series, run.batches);
  e.seed = run.seed;
  return e;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::good:
      return "good";
    case Verdict::bad:
      return "bad";
    case Verdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

GoodBoxResult classify_good_box(Coord u, int m, const Field& field, double eps, double T,
                                const GoodBoxThresholds& thresholds, const RunSettings& run) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  if (thresholds.points < 1) throw std::invalid_argument("at least one point is needed for part (ii)");
  check_run(run);
  const Region big = Region::box(5 * m, u);
  const Field local = restrict_field(field, big);
  GoodBoxResult out;
  out.label = "extreme boundaries only";

  // Part (i): the anchored circuit under +/- and under -/+ (the worse one).
  const PairEvent around = PairEvent::around({0, 0}, m);
  const GibbsSpec p(big, T, BoundaryCondition::plus(), local, eps);
  const GibbsSpec n(big, T, BoundaryCondition::minus(), local, eps);
  RunSettings serial = run;
  serial.threads = 1;
  RunSettings first = serial, second = serial;
  first.seed = derive_seed(run.seed, StreamTag::search, 1);
  second.seed = derive_seed(run.seed, StreamTag::search, 2);
  out.around_plus_minus = estimate_event_prob(around, p, n, 1, first);
  out.around_minus_plus = estimate_event_prob(around, n, p, 1, second);
  const Verdict a = compare(out.around_plus_minus, thresholds.around, thresholds.z);
  const Verdict b = compare(out.around_minus_plus, thresholds.around, thresholds.z);
  if (a == Verdict::bad || b == Verdict::bad)
    out.part_i = Verdict::bad;
  else if (a == Verdict::good && b == Verdict::good)
    out.part_i = Verdict::good;

  // Part (ii): sampled points x of the M-box, each compared on Lambda_4M(x)
  // with half of the zero-field influence.
  const Region inner = Region::box(m, u);
  const int count = std::min(thresholds.points, inner.size());
  Rng pick(derive_seed(run.seed, StreamTag::search, 3));
  std::vector<int> order(inner.size());
  for (int i = 0; i < inner.size(); ++i) order[i] = i;
  for (int i = 0; i < count; ++i) std::swap(order[i], order[i + pick.below(inner.size() - i)]);
  const Region zero_box = Region::box(4 * m);
  const Estimate m0 = influence_for_field(Field(zero_box), 0.0, T, zero_box.center(),
                                          derive_seed(run.seed, StreamTag::search, 4), serial);
  std::vector<Verdict> per(count);
  parallel_for(count, run.threads, [&](int i) {
    const Coord x = inner.coord(order[i]);
    const Field fx = restrict_field(local, Region::box(4 * m, x));
    const Estimate mx = influence_for_field(fx, eps, T, x,
                                            derive_seed(run.seed, StreamTag::search, 5, static_cast<std::uint64_t>(i)),
                                            serial);
    Estimate diff;
    diff.value = mx.value - 0.5 * m0.value;
    diff.se = std::sqrt(mx.se * mx.se + 0.25 * m0.se * m0.se);
    per[i] = compare(diff, 0.0, thresholds.z);
  });
  int met = 0, failed = 0;
  for (Verdict v : per) {
    met += v == Verdict::good;
    failed += v == Verdict::bad;
  }
  out.ii_met = static_cast<double>(met) / count;
  out.ii_failed = static_cast<double>(failed) / count;
  if (out.ii_met >= thresholds.fraction)
    out.part_ii = Verdict::good;
  else if (out.ii_failed > 1.0 - thresholds.fraction)
    out.part_ii = Verdict::bad;

  if (out.part_i == Verdict::bad || out.part_ii == Verdict::bad)
    out.verdict = Verdict::bad;
  else if (out.part_i == Verdict::good && out.part_ii == Verdict::good)
    out.verdict = Verdict::good;
  return out;
}

PowerLawFit fit_power_law(const std::vector<FitRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("a power-law fit needs at least 3 rows");
  bool weighted = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].m > 0.0)) throw std::invalid_argument("power-law fit rejects nonpositive m");
    if (!(rows[i].n > 0.0)) throw std::invalid_argument("power-law fit needs positive N");
    if (i > 0 && !(rows[i].n > rows[i - 1].n)) throw std::invalid_argument("N must be strictly increasing");
    if (!(rows[i].se > 0.0)) weighted = false;
  }
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const FitRow& r : rows) {
    const double x = std::log(r.n), y = std::log(r.m);
    const double rel = r.se / r.m;
    const double w = weighted ? 1.0 / (rel * rel) : 1.0;
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double det = sw * sxx - sx * sx;
  PowerLawFit fit;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / sw;
  for (const FitRow& r : rows) {
    const double rel = r.se / r.m;
    const double w = weighted ? 1.0 / (rel * rel) : 1.0;
    const double res = std::log(r.m) - fit.intercept - fit.slope * std::log(r.n);
    fit.chi2 += w * res * res;
  }
  const double dof = static_cast<double>(rows.size() - 2);
  double var = sw / det;
  if (!weighted)
    var *= fit.chi2 / dof;
  else
    var *= std::max(1.0, fit.chi2 / dof);
  fit.slope_se = std::sqrt(var);
  fit.ci_low = fit.slope - 1.96 * fit.slope_se;
  fit.ci_high = fit.slope + 1.96 * fit.slope_se;
  return fit;
}

XiBracket find_correlation_length(const std::function<Estimate(int)>& m_eps,
                                  const std::function<Estimate(int)>& m_zero, XiMode mode, double target,
                                  const XiSearch& search) {
  if (search.start < 1 || search.max_n < search.start) throw std::invalid_argument("invalid search range");
  if (mode == XiMode::target && !(target > 0.0)) throw std::invalid_argument("target must be positive");
  if (mode == XiMode::half_zero_field && !m_zero) throw std::invalid_argument("ratio mode needs the zero-field curve");
  XiBracket out;
  std::map<int, int> cache;  // N -> -1 below, 0 ambiguous, +1 above
  auto classify = [&](int n) {
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    const Estimate e = m_eps(n);
    double thr = target, thr_se = 0.0;
    if (mode == XiMode::half_zero_field) {
      const Estimate z = m_zero(n);
      thr = 0.5 * z.value;
      thr_se = 0.5 * z.se;
    }
    out.evaluations.push_back({double(n), e.value, e.se, thr, thr_se});
    const double diff = e.value - thr;
    const double s = search.z * std::sqrt(e.se * e.se + thr_se * thr_se);
    const int c = diff + s <= 0.0 ? -1 : (diff - s > 0.0 ? 1 : 0);
    cache[n] = c;
    return c;
  };
  int lower = 0, upper = 0;
  for (int n = search.start;;) {
    const int c = classify(n);
    if (c > 0) lower = n;
    if (c < 0) {
      upper = n;
      break;
    }
    if (n >= search.max_n) break;
    n = std::min(2 * n, search.max_n);
  }
  if (upper > 0 && search.refine) {
    while (upper - lower > 1) {
      const int mid = lower + (upper - lower) / 2;
      const int c = classify(mid);
      if (c > 0)
        lower = mid;
      else if (c < 0)
        upper = mid;
      else
        break;
    }
  }
  out.lower = lower;
  out.upper = upper;
  out.open = upper == 0;
  return out;
}

double ScalingRow::x() const { return std::pow(eps, 8.0 / 7.0) * n; }
double ScalingRow::y() const { return m * std::pow(double(n), 0.125); }
double ScalingRow::y_se() const { return se * std::pow(double(n), 0.125); }

std::vector<ScalingRow> scaling_table(double T, const std::vector<int>& ns, const std::vector<double>& eps,
                                      int replicas, const RunSettings& run) {
  if (ns.empty() || eps.empty()) throw std::invalid_argument("scaling grid must be nonempty");
  std::vector<ScalingRow> rows;
  for (int n : ns)
    for (double e : eps) {
      const InfluenceResult r = estimate_boundary_influence(T, n, e, replicas, run);
      rows.push_back({T, n, e, r.annealed.value, r.annealed.se});
    }
  std::stable_sort(rows.begin(), rows.end(), [](const ScalingRow& a, const ScalingRow& b) {
    return a.n != b.n ? a.n < b.n : a.eps < b.eps;
  });
  return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "T,N,eps,m,se,x,y\n";
  char buf[256];
  for (const ScalingRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.T, r.n, r.eps, r.m, r.se, r.x(),
                  r.y());
    out << buf;
  }
}

bool fk_box_is_good(const Model& m, const BondConfig& bonds, int q) {
  if (!m.region) throw std::invalid_argument("FK good-box check needs a lattice model");
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("q must be even and >= 2");
  const Region& r = *m.region;
  if (r.kind() != RegionKind::box || r.params()[0] < 3 * q / 2)
    throw std::invalid_argument("the model region must contain Lambda_{1.5q}");
  const int a = 3 * q / 2, b = q / 2;
  return strip_crossing(m, bonds, r, -a, -b, -a, a, true) && strip_crossing(m, bonds, r, b, a, -a, a, true) &&
         strip_crossing(m, bonds, r, -a, a, -a, -b, false) && strip_crossing(m, bonds, r, -a, a, b, a, false);
}

Estimate fk_good_box_check(double p, int q, FkBoundary boundary, int samples, const RunSettings& run) {
  const double pc = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
  if (!(p > pc && p < 1.0)) throw std::invalid_argument("p must lie in (p_c, 1)");
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("q must be even and >= 2");
  if (samples < 2) throw std::invalid_argument("at least two samples are required");
  if (run.schedule.thinning < 1) throw std::invalid_argument("schedule thinning must be >= 1");
  const BoundaryCondition bc = boundary == FkBoundary::wired ? BoundaryCondition::plus() : BoundaryCondition::free();
  const GibbsSpec spec(Region::box(2 * q), temperature_for_p(p), bc);
  auto model = std::make_shared<const Model>(compile(spec));
  const std::uint64_t chain_seed = derive_seed(run.seed, StreamTag::replica);
  ChainState chain(model, chain_seed, 1);
  for (int i = 0; i < std::max(run.schedule.burn_in_cluster, 1); ++i) sw_update(chain);
  std::vector<double> series;
  series.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < run.schedule.thinning; ++i) sw_update(chain);
    const BondConfig bonds = resample_bonds(*model, chain.spins(), chain.rng());
    series.push_back(fk_box_is_good(*model, bonds, q) ? 1.0 : 0.0);
  }
  Estimate e = batch_means(series, std::max(2, std::min(run.batches, samples)));
  e.se = std::max(e.se, indicator_floor(e.value, e.samples));
  e.seed = run.seed;
  return e;
}

}  // namespace rfim
