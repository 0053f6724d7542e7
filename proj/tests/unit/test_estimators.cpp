// Unit tests for the Monte Carlo estimators, fits and bracket searches.

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rfim/estimators.hpp"
#include "rfim/oracle.hpp"
#include "rfim/verify.hpp"

using namespace rfim;

namespace {

RunSettings settings(int n, int snapshots, std::uint64_t seed) {
  RunSettings run;
  run.schedule = UpdateSchedule::standard(n, snapshots);
  run.seed = seed;
  return run;
}

/// Half the plus/minus difference of <sigma_v>, which equals P(v in D_d).
double exact_influence(const Region& r, const Field& f, double eps, int v) {
  const GibbsSpec plus(r, kTc, BoundaryCondition::plus(), f, eps);
  const GibbsSpec minus(r, kTc, BoundaryCondition::minus(), f, eps);
  return 0.5 * (exact_spin_average(plus, v) - exact_spin_average(minus, v));
}

/// E_h of the one-site influence tanh((4 + eps h)/T) - tanh((eps h - 4)/T),
/// halved, by trapezoid quadrature on [-12, 12].
double one_site_influence(double eps) {
  const int steps = 24000;
  const double a = -12.0, b = 12.0, dx = (b - a) / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double h = a + i * dx;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    const double g = std::exp(-0.5 * h * h) / std::sqrt(2.0 * M_PI);
    sum += w * g * 0.5 * (std::tanh((4.0 + eps * h) / kTc) - std::tanh((eps * h - 4.0) / kTc));
  }
  return sum * dx;
}

}  // namespace

TEST_CASE("batch means on i.i.d. and constant data", "[estimators]") {
  std::vector<double> constant(640, 2.5);
  const Estimate c = batch_means(constant, 32);
  CHECK(c.value == 2.5);
  CHECK(c.se == 0.0);
  CHECK(c.samples == 640);

  Rng rng(derive_seed(1, StreamTag::test));
  std::vector<double> xs(64000);
  for (double& x : xs) x = rng.uniform();
  const Estimate e = batch_means(xs, 32);
  // Uniform variance is 1/12.
  const double iid_se = std::sqrt(1.0 / 12.0 / xs.size());
  CHECK(std::abs(e.value - 0.5) < 4.0 * iid_se);
  CHECK(e.se == Catch::Approx(iid_se).epsilon(0.5));
  CHECK(e.effective_samples == Catch::Approx(64000.0).epsilon(0.6));
  CHECK_THROWS_AS(batch_means({}, 32), std::invalid_argument);
  CHECK_THROWS_AS(batch_means(xs, 1), std::invalid_argument);
}

TEST_CASE("replica mean and quantiles", "[estimators]") {
  std::vector<Estimate> rs(4);
  for (int i = 0; i < 4; ++i) rs[i].value = i;
  const Estimate m = replica_mean(rs);
  CHECK(m.value == 1.5);
  // Sample standard deviation sqrt(5/3) over sqrt(4).
  CHECK(m.se == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK(m.replicas == 4);

  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == Catch::Approx(1.75));
  CHECK(quantile({5.0}, 0.9) == 5.0);
  CHECK(quantile({1.0, 2.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 2.0}, 1.0) == 2.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once", "[estimators]") {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(97, threads, [&](int i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("power-law fit", "[estimators]") {
  std::vector<FitRow> rows;
  for (double n : {8.0, 16.0, 32.0, 64.0}) rows.push_back({n, 1.3 * std::pow(n, -0.125), 0.001});
  const PowerLawFit f = fit_power_law(rows);
  CHECK(f.slope == Catch::Approx(-0.125).margin(1e-9));
  CHECK(f.intercept == Catch::Approx(std::log(1.3)).margin(1e-9));
  CHECK(f.chi2 < 1e-12);
  CHECK(f.ci_low <= f.slope);
  CHECK(f.ci_high >= f.slope);

  // Noisy input: the true slope lies within four standard errors.
  Rng rng(derive_seed(2, StreamTag::test));
  std::vector<FitRow> noisy;
  for (double n : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    const double m = std::pow(n, -0.3);
    noisy.push_back({n, m * (1.0 + 0.01 * (rng.uniform() - 0.5)), 0.01 * m / std::sqrt(12.0)});
  }
  const PowerLawFit g = fit_power_law(noisy);
  CHECK(std::abs(g.slope + 0.3) < 4.0 * g.slope_se);
  CHECK(g.slope_se > 0.0);

  CHECK_THROWS_AS(fit_power_law({{1.0, 1.0, 0.1}, {2.0, 0.9, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({{1.0, 1.0, 0.1}, {2.0, 0.0, 0.1}, {4.0, 0.5, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({{2.0, 1.0, 0.1}, {1.0, 0.9, 0.1}, {4.0, 0.5, 0.1}}), std::invalid_argument);
}

TEST_CASE("correlation length bracket on synthetic curves", "[estimators]") {
  auto decay = [](int n) {
    Estimate e;
    e.value = std::exp(-double(n));
    e.se = 1e-9;
    return e;
  };
  const XiBracket b = find_correlation_length(decay, decay, XiMode::target, std::exp(-4.5), XiSearch{});
  CHECK_FALSE(b.open);
  CHECK(b.lower == 4);
  CHECK(b.upper == 5);
  CHECK_FALSE(b.evaluations.empty());
  // Without refinement the bracket stays on the doubling grid 2, 4, 8.
  XiSearch coarse;
  coarse.refine = false;
  const XiBracket c = find_correlation_length(decay, decay, XiMode::target, std::exp(-4.5), coarse);
  CHECK(c.lower == 4);
  CHECK(c.upper == 8);

  // Identical weak and zero-field curves never drop to half: open bracket.
  auto power = [](int n) {
    Estimate e;
    e.value = std::pow(double(n), -0.125);
    e.se = 1e-6;
    return e;
  };
  XiSearch s;
  s.max_n = 64;
  const XiBracket open = find_correlation_length(power, power, XiMode::half_zero_field, 0.0, s);
  CHECK(open.open);
  CHECK(open.upper == 0);
  CHECK(open.lower == 64);
}

TEST_CASE("one-site influence matches the Gaussian integral", "[estimators]") {
  CHECK(one_site_influence(0.0) == Catch::Approx(std::tanh(4.0 / kTc)).epsilon(1e-10));
  RunSettings run = settings(1, 4000, 3);
  const InfluenceResult r = estimate_boundary_influence(kTc, 1, 1.0, 64, run);
  const double expected = one_site_influence(1.0);
  INFO("estimate " << r.annealed.value << " +- " << r.annealed.se << " exact " << expected);
  CHECK(std::abs(r.annealed.value - expected) < 3.0 * r.annealed.se);
  REQUIRE(r.quenched.size() == 64);
  CHECK(r.quantiles[0] <= r.quantiles[2]);
  CHECK(r.quantiles[2] <= r.quantiles[4]);
  // Per-replica values against the exact one-site formula.
  const Region b1 = Region::box(1);
  int within = 0;
  for (int i = 0; i < 64; ++i) {
    const double exact = exact_influence(b1, sample_field(b1, 3, i), 1.0, b1.index({0, 0}));
    within += std::abs(r.quenched[i].value - exact) < 3.0 * r.quenched[i].se;
  }
  CHECK(within >= 58);
}

TEST_CASE("influence on box(2) against the exact oracle", "[estimators]") {
  const Region b2 = Region::box(2);
  RunSettings run = settings(2, 20000, 4);
  const InfluenceResult r = estimate_boundary_influence(kTc, 2, 0.7, 1, run);
  const double exact = exact_influence(b2, sample_field(b2, 4, 0), 0.7, b2.index({0, 0}));
  INFO(r.annealed.value << " +- " << r.annealed.se << " exact " << exact);
  CHECK(std::abs(r.annealed.value - exact) < 3.0 * r.annealed.se);
}

TEST_CASE("randomized estimator consistency", "[estimators][property]") {
  // 100 random (box, eps, seed) cases; at least 95 must lie within 3 standard
  // errors of the oracle.
  Rng rng(derive_seed(5, StreamTag::test));
  int within = 0;
  for (int c = 0; c < 100; ++c) {
    const int n = 1 + static_cast<int>(rng.below(2));
    const double eps = 1.5 * rng.uniform();
    const std::uint64_t seed = 1000 + c;
    const InfluenceResult r = estimate_boundary_influence(kTc, n, eps, 1, settings(n, 2000, seed));
    const Region b = Region::box(n);
    const double exact = exact_influence(b, sample_field(b, seed, 0), eps, b.index({0, 0}));
    within += std::abs(r.annealed.value - exact) <= 3.0 * r.annealed.se;
  }
  INFO(within << " of 100 within 3 s.e.");
  CHECK(within >= 95);
}

TEST_CASE("event probability of Con on the centre annulus", "[estimators]") {
  const Region ann = Region::annulus(-1, 2);
  const Field f = sample_field(ann, 6, 0);
  const GibbsSpec plus = annulus_spec(ann, kTc, 1, 1, f, 1.0);
  const GibbsSpec minus = annulus_spec(ann, kTc, -1, -1, f, 1.0);
  const double exact = exact_pair_event_prob(plus, minus, PairEvent::con(-1, 2));
  // Failures are rare (about 0.5%), so the run is long enough to see a few hundred.
  const Estimate e = estimate_event_prob(PairEvent::con(-1, 2), plus, minus, 1, settings(2, 100000, 1));
  INFO(e.value << " +- " << e.se << " exact " << exact);
  CHECK(std::abs(e.value - exact) < 3.0 * e.se);
  CHECK(check_cbc(false, 200, CheckOptions{}).passed);
}

TEST_CASE("expected disagreement count", "[estimators]") {
  const Region b2 = Region::box(2);
  const Field f = sample_field(b2, 7, 0);
  const Estimate e = estimate_disagreement_count(1, 2, f, 0.5, kTc, settings(2, 20000, 7));
  double exact = 0.0;
  for (int v = 0; v < b2.size(); ++v)
    if (linf(b2.coord(v), {0, 0}) <= 1) exact += exact_influence(b2, f, 0.5, v);
  INFO(e.value << " +- " << e.se << " exact " << exact);
  CHECK(std::abs(e.value - exact) < 3.0 * e.se);
  CHECK(e.value <= 9.0);
  CHECK_THROWS_AS(estimate_disagreement_count(3, 2, f, 0.5, kTc, settings(2, 100, 7)), std::invalid_argument);
}

TEST_CASE("FK good-box frequency", "[estimators]") {
  RunSettings run = settings(4, 0, 8);
  const Estimate near_one = fk_good_box_check(0.999, 2, FkBoundary::wired, 50, run);
  CHECK(near_one.value == 1.0);
  const Estimate wired = fk_good_box_check(0.62, 4, FkBoundary::wired, 400, run);
  const Estimate free = fk_good_box_check(0.62, 4, FkBoundary::free, 400, run);
  INFO("wired " << wired.value << " free " << free.value);
  CHECK(wired.value >= free.value - 3.0 * std::hypot(wired.se, free.se));
  CHECK_THROWS_AS(fk_good_box_check(0.5, 4, FkBoundary::wired, 10, run), std::invalid_argument);
  CHECK_THROWS_AS(fk_good_box_check(0.7, 3, FkBoundary::wired, 10, run), std::invalid_argument);
}

TEST_CASE("a strong positive field makes a box bad", "[estimators]") {
  const Field f = constant_field(Region::box(5), 10.0);
  const GoodBoxResult g = classify_good_box({0, 0}, 1, f, 1.0, kTc, GoodBoxThresholds{}, settings(5, 400, 9));
  CHECK(g.verdict == Verdict::bad);
  CHECK(g.around_plus_minus.value < 0.1);
  CHECK_FALSE(g.label.empty());
  CHECK(std::string(to_string(Verdict::good)) == "good");
}

TEST_CASE("scaling table rows and CSV", "[estimators]") {
  const auto rows = scaling_table(kTc, {2, 1}, {0.5, 0.0}, 2, settings(2, 500, 10));
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::make_pair(rows[i - 1].n, rows[i - 1].eps) < std::make_pair(rows[i].n, rows[i].eps));
  const ScalingRow& r = rows.back();
  CHECK(r.x() == Catch::Approx(std::pow(0.5, 8.0 / 7.0) * 2.0));
  CHECK(r.y() == Catch::Approx(r.m * std::pow(2.0, 0.125)));
  std::stringstream s;
  write_scaling_csv(s, rows);
  std::string header;
  std::getline(s, header);
  CHECK(header == "T,N,eps,m,se,x,y");
  int lines = 0;
  for (std::string line; std::getline(s, line);) ++lines;
  CHECK(lines == 4);
}

TEST_CASE("influence does not grow with the box at zero field", "[estimators][property]") {
  // m(N) is non-increasing in N: exact on boxes 1 and 2.
  const double m1 = exact_influence(Region::box(1), Field(Region::box(1)), 0.0, Region::box(1).index({0, 0}));
  const double m2 = exact_influence(Region::box(2), Field(Region::box(2)), 0.0, Region::box(2).index({0, 0}));
  CHECK(m1 > m2);
  // At zero field the minus average is minus the plus average.
  CHECK(m2 == Catch::Approx(0.88583750574522346).epsilon(1e-12));
}
