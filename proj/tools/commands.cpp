#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "rfim/oracle.hpp"
#include "rfim/verify.hpp"

namespace rfim::cli {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Builds one CSV file row by row.
class Csv {
 public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }
  Csv& field(const std::string& s) {
    sep();
    out_ << quote(s);
    return *this;
  }
  Csv& field(double x) {
    sep();
    out_ << format_double(x);
    return *this;
  }
  Csv& field(int x) {
    sep();
    out_ << x;
    return *this;
  }
  Csv& field(std::uint64_t x) {
    sep();
    out_ << x;
    return *this;
  }
  Csv& blank() {
    sep();
    return *this;
  }
  void end() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostringstream out_;
  bool first_ = true;
};

RunSettings settings(const RunConfig& c, int threads) {
  RunSettings run;
  run.schedule = c.schedule;
  run.seed = c.seed;
  run.threads = threads;
  run.batches = c.batches;
  return run;
}

std::string header_line(const RunConfig& c) {
  std::ostringstream s;
  s << command_name(c.command) << " at T = " << format_double(c.T) << ", seed " << c.seed << '\n';
  return s.str();
}

CommandOutput run_verify_command(const RunConfig& c) {
  CheckOptions options;
  options.seed = c.seed;
  const auto results = run_verify(c.level == "full" ? VerifyLevel::full : VerifyLevel::fast, options);
  Csv csv("check,passed,value,tolerance,cases,detail");
  std::ostringstream s;
  s << "verify (" << c.level << "), seed " << c.seed << '\n';
  int failed = 0;
  for (const CheckResult& r : results) {
    csv.field(r.name).field(r.passed ? 1 : 0).field(r.value).field(r.tolerance).field(r.cases).field(r.detail).end();
    s << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << '\n';
    if (!r.passed) ++failed;
  }
  s << results.size() - failed << " of " << results.size() << " checks passed\n";
  CommandOutput out;
  out.files.push_back({"verify.csv", csv.str()});
  out.summary = s.str();
  out.verification_failed = failed > 0;
  return out;
}

CommandOutput run_estimate_m(const RunConfig& c, int threads) {
  const RunSettings run = settings(c, threads);
  Csv rows("T,N,eps,replicas,m,se,effective_samples,q05,q25,q50,q75,q95");
  Csv quenched("T,N,eps,replica,field_seed,m,se,effective_samples");
  std::ostringstream s;
  s << header_line(c);
  for (int n : c.ns)
    for (double e : c.eps) {
      const InfluenceResult r = estimate_boundary_influence(c.T, n, e, c.replicas, run);
      rows.field(c.T).field(n).field(e).field(c.replicas).field(r.annealed.value).field(r.annealed.se);
      rows.field(r.annealed.effective_samples);
      for (double q : r.quantiles) rows.field(q);
      rows.end();
      for (std::size_t k = 0; k < r.quenched.size(); ++k) {
        const Estimate& q = r.quenched[k];
        quenched.field(c.T).field(n).field(e).field(static_cast<int>(k)).field(q.seed);
        quenched.field(q.value).field(q.se).field(q.effective_samples).end();
      }
      char line[160];
      std::snprintf(line, sizeof line, "N %4d  eps %-10.4g m %.6f +- %.6f\n", n, e, r.annealed.value,
                    r.annealed.se);
      s << line;
    }
  CommandOutput out;
  out.files.push_back({"estimate_m.csv", rows.str()});
  out.files.push_back({"quenched.csv", quenched.str()});
  out.summary = s.str();
  return out;
}

CommandOutput run_sweep(const RunConfig& c, int threads) {
  const auto rows = scaling_table(c.T, c.ns, c.eps, c.replicas, settings(c, threads));
  std::ostringstream table;
  write_scaling_csv(table, rows);
  Csv fits("eps,slope,slope_se,ci_low,ci_high,intercept,chi2");
  std::ostringstream s;
  s << header_line(c);
  for (const ScalingRow& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "N %4d  eps %-10.4g m %.6f +- %.6f  x %.4g  y %.4f\n", r.n, r.eps, r.m, r.se,
                  r.x(), r.y());
    s << line;
  }
  if (c.ns.size() >= 3) {
    for (double e : c.eps) {
      std::vector<FitRow> pts;
      for (const ScalingRow& r : rows)
        if (r.eps == e) pts.push_back({static_cast<double>(r.n), r.m, r.se});
      bool positive = true;
      for (const FitRow& p : pts) positive = positive && p.m > 0.0;
      if (!positive) {
        s << "eps " << format_double(e) << ": no fit (some m is zero)\n";
        continue;
      }
      const PowerLawFit f = fit_power_law(pts);
      fits.field(e).field(f.slope).field(f.slope_se).field(f.ci_low).field(f.ci_high).field(f.intercept);
      fits.field(f.chi2).end();
      char line[200];
      std::snprintf(line, sizeof line, "eps %-10.4g slope %.4f +- %.4f  95%% [%.4f, %.4f]\n", e, f.slope, f.slope_se,
                    f.ci_low, f.ci_high);
      s << line;
    }
  }
  CommandOutput out;
  out.files.push_back({"scaling.csv", table.str()});
  out.files.push_back({"fit.csv", fits.str()});
  out.summary = s.str();
  return out;
}

BoundaryCondition sign_boundary(int sign) {
  return sign > 0 ? BoundaryCondition::plus() : BoundaryCondition::minus();
}

CommandOutput run_crossing(const RunConfig& c, int threads) {
  const Field field = sample_field(c.region, c.seed, 0);
  const GibbsSpec plus(c.region, c.T, sign_boundary(c.plus_sign), field, c.eps[0]);
  const GibbsSpec minus(c.region, c.T, sign_boundary(c.minus_sign), field, c.eps[0]);
  const Estimate e = estimate_event_prob(c.event, plus, minus, c.replicas, settings(c, threads));
  Csv csv("region,event,T,eps,plus,minus,replicas,p,se,effective_samples");
  csv.field(c.region.describe()).field(c.event.describe()).field(c.T).field(c.eps[0]);
  csv.field(c.plus_sign > 0 ? "+" : "-").field(c.minus_sign > 0 ? "+" : "-").field(c.replicas);
  csv.field(e.value).field(e.se).field(e.effective_samples).end();
  std::ostringstream s;
  s << header_line(c) << c.event.describe() << " on " << c.region.describe() << ": P = " << format_double(e.value)
    << " +- " << format_double(e.se) << '\n';
  CommandOutput out;
  out.files.push_back({"crossing.csv", csv.str()});
  out.summary = s.str();
  return out;
}

CommandOutput run_goodbox(const RunConfig& c, int threads) {
  const Field field = sample_field(Region::box(5 * c.m, c.u), c.seed, 0);
  const GoodBoxResult g = classify_good_box(c.u, c.m, field, c.eps[0], c.T, c.thresholds, settings(c, threads));
  Csv csv(
      "M,ux,uy,T,eps,verdict,part_i,part_ii,around_plus_minus,around_plus_minus_se,around_minus_plus,"
      "around_minus_plus_se,ii_met,ii_failed,label");
  csv.field(c.m).field(c.u.x).field(c.u.y).field(c.T).field(c.eps[0]);
  csv.field(to_string(g.verdict)).field(to_string(g.part_i)).field(to_string(g.part_ii));
  csv.field(g.around_plus_minus.value).field(g.around_plus_minus.se);
  csv.field(g.around_minus_plus.value).field(g.around_minus_plus.se);
  csv.field(g.ii_met).field(g.ii_failed).field(g.label).end();
  std::ostringstream s;
  s << header_line(c) << "box M = " << c.m << " at (" << c.u.x << ", " << c.u.y << "): " << to_string(g.verdict)
    << " (part i " << to_string(g.part_i) << ", part ii " << to_string(g.part_ii) << "; " << g.label << ")\n";
  CommandOutput out;
  out.files.push_back({"goodbox.csv", csv.str()});
  out.summary = s.str();
  return out;
}

CommandOutput run_xi(const RunConfig& c, int threads) {
  const RunSettings run = settings(c, threads);
  const char* mode = c.mode == XiMode::target ? "target" : "half";
  Csv brackets("T,eps,mode,target,lower,upper,open");
  Csv evals("T,eps,N,m,se,threshold,threshold_se");
  std::ostringstream s;
  s << header_line(c);
  std::map<int, Estimate> zero_field;
  for (double e : c.eps) {
    auto m_eps = [&](int n) { return estimate_boundary_influence(c.T, n, e, c.replicas, run).annealed; };
    auto m_zero = [&](int n) {
      auto it = zero_field.find(n);
      if (it == zero_field.end())
        it = zero_field.emplace(n, estimate_boundary_influence(c.T, n, 0.0, c.replicas, run).annealed).first;
      return it->second;
    };
    const XiBracket b = find_correlation_length(m_eps, m_zero, c.mode, c.target, c.search);
    brackets.field(c.T).field(e).field(mode).field(c.target).field(b.lower);
    if (b.open)
      brackets.blank();
    else
      brackets.field(b.upper);
    brackets.field(b.open ? 1 : 0).end();
    for (const auto& row : b.evaluations) {
      evals.field(c.T).field(e).field(static_cast<int>(row[0]));
      for (int k = 1; k < 5; ++k) evals.field(row[k]);
      evals.end();
    }
    s << "eps " << format_double(e) << ": N in (" << b.lower << ", ";
    if (b.open)
      s << "open";
    else
      s << b.upper;
    s << "]\n";
  }
  CommandOutput out;
  out.files.push_back({"xi.csv", brackets.str()});
  out.files.push_back({"xi_evaluations.csv", evals.str()});
  out.summary = s.str();
  return out;
}

std::vector<int> ring_indices(const Region& r, int k) {
  std::vector<int> out;
  for (Coord x : ring(r.center(), k))
    if (r.index(x) >= 0) out.push_back(r.index(x));
  return out;
}

/// Exact P(Con) is enumerated only on annuli this small.
constexpr int kMaxConInterior = 8;

CommandOutput run_surface(const RunConfig& c) {
  const Region ann = Region::annulus(c.annulus_m, c.annulus_n);
  const auto inner = ring_indices(ann, c.annulus_m + 1);
  const auto outer = ring_indices(ann, c.annulus_n);
  const double phi = wired_annulus_connection(ann, c.T);
  const double bound = 2.0 * c.T * std::log((1.0 + phi) / (1.0 - phi));
  const bool with_con = ann.interior_count() <= kMaxConInterior;
  Csv csv("M,N,T,eps,field,tension,con,minus_T_log_one_minus_con,phi,bound");
  double largest = 0.0;
  for (int f = 0; f < c.fields; ++f) {
    const Field field = sample_field(ann, c.seed, static_cast<std::uint64_t>(f));
    const double tension = exact_surface_tension(ann, inner, outer, field, c.eps[0], c.T);
    largest = std::max(largest, tension);
    csv.field(c.annulus_m).field(c.annulus_n).field(c.T).field(c.eps[0]).field(f).field(tension);
    if (with_con) {
      const double con = exact_pair_event_prob(annulus_spec(ann, c.T, 1, 1, field, c.eps[0]),
                                               annulus_spec(ann, c.T, -1, -1, field, c.eps[0]),
                                               PairEvent::con(c.annulus_m, c.annulus_n));
      csv.field(con).field(-c.T * std::log1p(-con));
    } else {
      csv.blank().blank();
    }
    csv.field(phi).field(bound).end();
  }
  std::ostringstream s;
  s << header_line(c) << ann.describe() << ": largest tension " << format_double(largest) << " over " << c.fields
    << " fields, bound " << format_double(bound) << " (phi " << format_double(phi) << ")\n";
  CommandOutput out;
  out.files.push_back({"surface.csv", csv.str()});
  out.summary = s.str();
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CommandOutput execute(const RunConfig& config, int threads) {
  switch (config.command) {
    case Command::verify:
      return run_verify_command(config);
    case Command::estimate_m:
      return run_estimate_m(config, threads);
    case Command::sweep:
      return run_sweep(config, threads);
    case Command::crossing:
      return run_crossing(config, threads);
    case Command::goodbox:
      return run_goodbox(config, threads);
    case Command::xi:
      return run_xi(config, threads);
    case Command::surface:
      return run_surface(config);
  }
  throw std::invalid_argument("unknown command");
}

}  // namespace rfim::cli
