#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rfim::cli {

namespace {

/// Default field replicas for annealed curves (estimate-m, sweep, xi).
constexpr int kAnnealedReplicas = 64;

using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so that any
/// other key can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(where("") + " must be a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw std::invalid_argument("missing required key " + where(key));
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), where(key));
  }

  int integer(const std::string& key, int fallback, int lo, int hi = std::numeric_limits<int>::max()) {
    if (!has(key)) return fallback;
    return as_int(j_.at(key), where(key), lo, hi);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw std::invalid_argument(where(key) + " must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw std::invalid_argument(where(key) + " must be true or false");
    return v.get<bool>();
  }

  /// Reject every key that no accessor asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw std::invalid_argument("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? "\"" + key + "\"" : "\"" + path_ + "." + key + "\"";
  }

  static double as_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw std::invalid_argument(name + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw std::invalid_argument(name + " must be finite");
    return x;
  }

  static int as_int(const json& v, const std::string& name, int lo, int hi) {
    if (!v.is_number_integer()) throw std::invalid_argument(name + " must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
      throw std::invalid_argument(name + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                  "], got " + std::to_string(x));
    return static_cast<int>(x);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<int> int_list(ObjectReader& r, const std::string& key, int lo) {
  const json& v = r.at(key);
  if (!v.is_array() || v.empty()) throw std::invalid_argument(r.where(key) + " must be a nonempty array");
  std::vector<int> out;
  for (const json& x : v) out.push_back(ObjectReader::as_int(x, r.where(key), lo, kMaxRegionRadius));
  return out;
}

std::vector<double> number_list(ObjectReader& r, const std::string& key) {
  const json& v = r.at(key);
  if (!v.is_array() || v.empty()) throw std::invalid_argument(r.where(key) + " must be a nonempty array");
  std::vector<double> out;
  for (const json& x : v) {
    const double e = ObjectReader::as_number(x, r.where(key));
    if (e < 0.0) throw std::invalid_argument(r.where(key) + " entries must be >= 0");
    out.push_back(e);
  }
  return out;
}

double strength(ObjectReader& r, double fallback = 0.0) {
  const double e = r.number("eps", fallback);
  if (e < 0.0) throw std::invalid_argument(r.where("eps") + " must be >= 0");
  return e;
}

int sign_of(const std::string& s, const std::string& name) {
  if (s == "+") return 1;
  if (s == "-") return -1;
  throw std::invalid_argument(name + " must be \"+\" or \"-\"");
}

json schedule_json(const UpdateSchedule& s, int batches) {
  return {{"cluster", s.cluster == ClusterMove::wolff ? "wolff" : "sw"},
          {"burn_in_cluster", s.burn_in_cluster},
          {"burn_in_sweeps", s.burn_in_sweeps},
          {"measurement_updates", s.measurement_updates},
          {"thinning", s.thinning},
          {"sweeps_per_update", s.sweeps_per_update},
          {"batches", batches}};
}

void read_schedule(ObjectReader& top, RunConfig& c) {
  c.schedule = UpdateSchedule::standard(0, 4000);
  c.schedule.burn_in_cluster = 200;
  c.batches = 32;
  if (top.has("schedule")) {
    ObjectReader r(top.at("schedule"), "schedule");
    const std::string kind = r.text("cluster", "sw");
    if (kind == "sw")
      c.schedule.cluster = ClusterMove::swendsen_wang;
    else if (kind == "wolff")
      c.schedule.cluster = ClusterMove::wolff;
    else
      throw std::invalid_argument(r.where("cluster") + " must be \"sw\" or \"wolff\"");
    c.schedule.burn_in_cluster = r.integer("burn_in_cluster", c.schedule.burn_in_cluster, 0);
    c.schedule.burn_in_sweeps = r.integer("burn_in_sweeps", c.schedule.burn_in_sweeps, 0);
    c.schedule.measurement_updates = r.integer("measurement_updates", c.schedule.measurement_updates, 1);
    c.schedule.thinning = r.integer("thinning", c.schedule.thinning, 1);
    c.schedule.sweeps_per_update = r.integer("sweeps_per_update", c.schedule.sweeps_per_update, 0);
    c.batches = r.integer("batches", c.batches, 2);
    r.finish();
  }
  if (c.schedule.snapshot_count() < c.batches)
    throw std::invalid_argument("schedule must give at least as many snapshots as batches");
  c.normalized["schedule"] = schedule_json(c.schedule, c.batches);
}

Region read_region(ObjectReader& top) {
  ObjectReader r(top.at("region"), "region");
  const std::string kind = r.text("kind", "box");
  const json& p = r.at("params");
  if (!p.is_array()) throw std::invalid_argument(r.where("params") + " must be an array");
  std::vector<int> params;
  for (const json& x : p) params.push_back(ObjectReader::as_int(x, r.where("params"), -1, kMaxRegionRadius));
  r.finish();
  RegionKind k;
  if (kind == "box")
    k = RegionKind::box;
  else if (kind == "annulus")
    k = RegionKind::annulus;
  else if (kind == "rect")
    k = RegionKind::rect;
  else
    throw std::invalid_argument(r.where("kind") + " must be box, annulus or rect");
  return build_region(k, params);
}

PairEvent read_event(ObjectReader& top) {
  ObjectReader r(top.at("event"), "event");
  const std::string kind = r.text("kind", "origin");
  PairEvent ev;
  auto coord = [&] {
    Coord u{};
    if (r.has("u")) {
      const json& v = r.at("u");
      if (!v.is_array() || v.size() != 2) throw std::invalid_argument(r.where("u") + " must be [x, y]");
      u.x = ObjectReader::as_int(v[0], r.where("u"), -kMaxRegionRadius, kMaxRegionRadius);
      u.y = ObjectReader::as_int(v[1], r.where("u"), -kMaxRegionRadius, kMaxRegionRadius);
    }
    return u;
  };
  const int lo = -1;
  if (kind == "origin") {
    ev = PairEvent::origin();
  } else if (kind == "hcross") {
    ev = PairEvent::hcross(r.integer("a", 1, 0), r.integer("b", 1, 0));
  } else if (kind == "con") {
    ev = PairEvent::con(r.integer("a", 1, lo), r.integer("b", 2, 0));
  } else if (kind == "con2") {
    ev = PairEvent::con2(r.integer("a", 1, lo), r.integer("b", 3, 0));
  } else if (kind == "around") {
    const Coord u = coord();
    ev = PairEvent::around(u, r.integer("a", 1, 1));
  } else if (kind == "daround") {
    const Coord u = coord();
    ev = PairEvent::daround(u, r.integer("a", 1, 1));
  } else if (kind == "fractal") {
    ev = PairEvent::fractal(r.number("alpha", 0.5), r.integer("a", 16, 1), r.integer("b", 1, 1));
  } else {
    throw std::invalid_argument(r.where("kind") + " must be origin, hcross, con, con2, around, daround or fractal");
  }
  r.finish();
  return ev;
}

json event_json(const PairEvent& ev) {
  json j;
  switch (ev.kind) {
    case PairEventKind::origin_disagreement:
      return {{"kind", "origin"}};
    case PairEventKind::hcross:
      return {{"kind", "hcross"}, {"a", ev.a}, {"b", ev.b}};
    case PairEventKind::con:
      return {{"kind", "con"}, {"a", ev.a}, {"b", ev.b}};
    case PairEventKind::con2:
      return {{"kind", "con2"}, {"a", ev.a}, {"b", ev.b}};
    case PairEventKind::around:
      return {{"kind", "around"}, {"a", ev.a}, {"u", {ev.u.x, ev.u.y}}};
    case PairEventKind::daround:
      return {{"kind", "daround"}, {"a", ev.a}, {"u", {ev.u.x, ev.u.y}}};
    case PairEventKind::fractal:
      return {{"kind", "fractal"}, {"a", ev.a}, {"b", ev.b}, {"alpha", ev.alpha}};
  }
  return j;
}

const char* region_kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::box:
      return "box";
    case RegionKind::annulus:
      return "annulus";
    case RegionKind::rect:
      return "rect";
  }
  return "box";
}

json region_json(const Region& r) {
  json params = json::array();
  params.push_back(r.params()[0]);
  if (r.kind() != RegionKind::box) params.push_back(r.params()[1]);
  return {{"kind", region_kind_name(r.kind())}, {"params", params}};
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::verify:
      return "verify";
    case Command::estimate_m:
      return "estimate-m";
    case Command::crossing:
      return "crossing";
    case Command::goodbox:
      return "goodbox";
    case Command::sweep:
      return "sweep";
    case Command::xi:
      return "xi";
    case Command::surface:
      return "surface";
  }
  return "verify";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::verify, Command::estimate_m, Command::crossing, Command::goodbox, Command::sweep,
                    Command::xi, Command::surface})
    if (name == command_name(c)) return c;
  throw std::invalid_argument("unknown command \"" + name + "\"");
}

RunConfig parse_config(const json& input, Command command) {
  // A manifest carries the normalized config of an earlier run.
  const json& j = input.is_object() && input.contains("tool_version") && input.contains("config") ? input.at("config")
                                                                                                 : input;
  ObjectReader r(j, "");
  RunConfig c;
  c.command = command;
  const int version = r.integer("schema_version", kSchemaVersion, 0);
  if (version != kSchemaVersion)
    throw std::invalid_argument("unsupported schema_version " + std::to_string(version) + " (expected " +
                                std::to_string(kSchemaVersion) + ")");
  if (r.has("command") && parse_command(r.text("command", "")) != command)
    throw std::invalid_argument("config is for command \"" + r.text("command", "") + "\", not \"" +
                                command_name(command) + "\"");
  if (r.has("seed")) {
    const json& s = r.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw std::invalid_argument("\"seed\" must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.normalized = {{"schema_version", kSchemaVersion}, {"command", command_name(command)}};
  bool t_is_tc = true;
  if (r.has("T")) {
    const json& t = r.at("T");
    if (t.is_string()) {
      if (t.get<std::string>() != "Tc") throw std::invalid_argument("\"T\" must be a number or \"Tc\"");
    } else {
      c.T = ObjectReader::as_number(t, "\"T\"");
      if (c.T < kMinTemperature) throw std::invalid_argument("\"T\" must be >= " + std::to_string(kMinTemperature));
      t_is_tc = false;
    }
  }
  auto set_t = [&] { c.normalized["T"] = t_is_tc ? json("Tc") : json(c.T); };

  switch (command) {
    case Command::verify: {
      c.level = r.text("level", "full");
      if (c.level != "fast" && c.level != "full") throw std::invalid_argument("\"level\" must be fast or full");
      c.normalized["level"] = c.level;
      break;
    }
    case Command::estimate_m:
    case Command::sweep: {
      c.ns = int_list(r, "N", 1);
      c.eps = number_list(r, "eps");
      if (command == Command::sweep) {
        std::sort(c.ns.begin(), c.ns.end());
        std::sort(c.eps.begin(), c.eps.end());
        if (std::adjacent_find(c.ns.begin(), c.ns.end()) != c.ns.end())
          throw std::invalid_argument("\"N\" entries must be distinct");
      }
      c.replicas = r.integer("replicas", kAnnealedReplicas, 1);
      read_schedule(r, c);
      set_t();
      c.normalized["N"] = c.ns;
      c.normalized["eps"] = c.eps;
      c.normalized["replicas"] = c.replicas;
      break;
    }
    case Command::crossing: {
      c.region = read_region(r);
      c.event = read_event(r);
      if (r.has("boundary")) {
        ObjectReader b(r.at("boundary"), "boundary");
        c.plus_sign = sign_of(b.text("plus", "+"), b.where("plus"));
        c.minus_sign = sign_of(b.text("minus", "-"), b.where("minus"));
        b.finish();
      }
      c.eps = {strength(r)};
      c.replicas = r.integer("replicas", 1, 1);
      read_schedule(r, c);
      // Evaluate the event once on an empty set so that bad geometry fails now.
      const Model g = compile(GibbsSpec(c.region, c.T, BoundaryCondition::plus()));
      PairConfig empty;
      empty.plus.s.assign(g.site_count(), 0);
      empty.minus.s.assign(g.site_count(), 0);
      detect_event(DisagreementSet(g, empty), c.event);
      set_t();
      c.normalized["region"] = region_json(c.region);
      c.normalized["event"] = event_json(c.event);
      c.normalized["boundary"] = {{"plus", c.plus_sign > 0 ? "+" : "-"}, {"minus", c.minus_sign > 0 ? "+" : "-"}};
      c.normalized["eps"] = c.eps[0];
      c.normalized["replicas"] = c.replicas;
      break;
    }
    case Command::goodbox: {
      c.m = r.integer("M", 1, 1, kMaxRegionRadius / 5);
      if (r.has("u")) {
        const json& v = r.at("u");
        if (!v.is_array() || v.size() != 2) throw std::invalid_argument("\"u\" must be [x, y]");
        c.u.x = ObjectReader::as_int(v[0], "\"u\"", -kMaxRegionRadius, kMaxRegionRadius);
        c.u.y = ObjectReader::as_int(v[1], "\"u\"", -kMaxRegionRadius, kMaxRegionRadius);
      }
      c.eps = {strength(r)};
      if (r.has("thresholds")) {
        ObjectReader t(r.at("thresholds"), "thresholds");
        c.thresholds.around = t.number("around", c.thresholds.around);
        c.thresholds.fraction = t.number("fraction", c.thresholds.fraction);
        c.thresholds.points = t.integer("points", c.thresholds.points, 1);
        c.thresholds.z = t.number("z", c.thresholds.z);
        t.finish();
        if (!(c.thresholds.around >= 0.0 && c.thresholds.around <= 1.0) ||
            !(c.thresholds.fraction >= 0.0 && c.thresholds.fraction <= 1.0) || !(c.thresholds.z >= 0.0))
          throw std::invalid_argument("thresholds must satisfy 0 <= around, fraction <= 1 and z >= 0");
      }
      read_schedule(r, c);
      set_t();
      c.normalized["M"] = c.m;
      c.normalized["u"] = {c.u.x, c.u.y};
      c.normalized["eps"] = c.eps[0];
      c.normalized["thresholds"] = {{"around", c.thresholds.around},
                                    {"fraction", c.thresholds.fraction},
                                    {"points", c.thresholds.points},
                                    {"z", c.thresholds.z}};
      break;
    }
    case Command::xi: {
      const std::string mode = r.text("mode", "half");
      if (mode == "half")
        c.mode = XiMode::half_zero_field;
      else if (mode == "target")
        c.mode = XiMode::target;
      else
        throw std::invalid_argument("\"mode\" must be half or target");
      c.target = r.number("target", 0.0);
      if (c.mode == XiMode::target && !(c.target > 0.0 && c.target < 1.0))
        throw std::invalid_argument("\"target\" must lie in (0, 1) in target mode");
      c.eps = number_list(r, "eps");
      c.replicas = r.integer("replicas", kAnnealedReplicas, 1);
      if (r.has("search")) {
        ObjectReader s(r.at("search"), "search");
        c.search.start = s.integer("start", c.search.start, 1, kMaxRegionRadius);
        c.search.max_n = s.integer("max_n", c.search.max_n, 1, kMaxRegionRadius);
        c.search.z = s.number("z", c.search.z);
        c.search.refine = s.flag("refine", c.search.refine);
        s.finish();
        if (c.search.max_n < c.search.start) throw std::invalid_argument("\"search.max_n\" must be >= start");
        if (!(c.search.z >= 0.0)) throw std::invalid_argument("\"search.z\" must be >= 0");
      }
      read_schedule(r, c);
      set_t();
      c.normalized["mode"] = mode;
      c.normalized["target"] = c.target;
      c.normalized["eps"] = c.eps;
      c.normalized["replicas"] = c.replicas;
      c.normalized["search"] = {
          {"start", c.search.start}, {"max_n", c.search.max_n}, {"z", c.search.z}, {"refine", c.search.refine}};
      break;
    }
    case Command::surface: {
      const json& a = r.at("annulus");
      if (!a.is_array() || a.size() != 2) throw std::invalid_argument("\"annulus\" must be [M, N]");
      c.annulus_m = ObjectReader::as_int(a[0], "\"annulus\"", -1, kMaxRegionRadius);
      c.annulus_n = ObjectReader::as_int(a[1], "\"annulus\"", 1, kMaxRegionRadius);
      if (c.annulus_m >= c.annulus_n) throw std::invalid_argument("\"annulus\" needs M < N");
      const Region ann = Region::annulus(c.annulus_m, c.annulus_n);
      if (ann.interior_count() < 1) throw std::invalid_argument("\"annulus\" has no interior vertex");
      if (ann.interior_count() > 20)
        throw std::length_error("surface tension is enumerated only up to 20 interior vertices");
      c.eps = {strength(r, 1.0)};
      c.fields = r.integer("fields", 5, 1, 100000);
      set_t();
      c.normalized["annulus"] = {c.annulus_m, c.annulus_n};
      c.normalized["eps"] = c.eps[0];
      c.normalized["fields"] = c.fields;
      break;
    }
  }
  r.finish();
  c.normalized["seed"] = c.seed;
  return c;
}

}  // namespace rfim::cli
