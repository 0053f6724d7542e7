#include "rfim/disorder.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rfim/rng.hpp"

namespace rfim {

Field::Field(Region region) : region_(std::move(region)), values_(region_.size(), 0.0) {}

void Field::set(int v, double h) {
  if (v < 0 || v >= region_.size()) throw std::out_of_range("field vertex outside region");
  if (region_.is_boundary(v)) throw std::invalid_argument("boundary vertices carry no field");
  values_[v] = h;
}

double site_normal(std::uint64_t seed, std::uint64_t replica, Coord c) {
  const std::uint64_t key = derive_seed(seed, StreamTag::field, replica);
  const std::uint64_t site = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                             static_cast<std::uint32_t>(c.y);
  return counter_normal(key, site);
}

Field sample_field(const Region& region, std::uint64_t seed, std::uint64_t replica) {
  Field f(region);
  for (int v : region.interior()) f.set(v, site_normal(seed, replica, region.coord(v)));
  f.set_provenance(seed, replica);
  return f;
}

Field constant_field(const Region& region, double h) {
  Field f(region);
  for (int v : region.interior()) f.set(v, h);
  return f;
}

Field flip_field(const Field& field, const std::vector<int>& a) {
  Field out = field;
  const Region& r = field.region();
  for (int v : a) {
    if (v < 0 || v >= r.size()) throw std::invalid_argument("flip set contains a vertex outside the region");
    if (r.is_boundary(v)) throw std::invalid_argument("flip set must contain interior vertices only");
    out.set(v, -field.at(v));
  }
  return out;
}

namespace {

std::string region_token(const Region& r) {
  std::ostringstream s;
  switch (r.kind()) {
    case RegionKind::box:
      s << "box:" << r.params()[0];
      break;
    case RegionKind::annulus:
      s << "annulus:" << r.params()[0] << ":" << r.params()[1];
      break;
    case RegionKind::rect:
      s << "rect:" << r.params()[0] << ":" << r.params()[1];
      break;
  }
  s << ":" << r.center().x << ":" << r.center().y;
  return s.str();
}

Region parse_region_token(const std::string& tok) {
  std::vector<std::string> parts;
  std::stringstream ss(tok);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.empty()) throw std::invalid_argument("empty region token");
  std::vector<int> nums;
  for (std::size_t i = 1; i < parts.size(); ++i) nums.push_back(std::stoi(parts[i]));
  if (parts[0] == "box" && nums.size() == 3) return Region::box(nums[0], {nums[1], nums[2]});
  if (parts[0] == "annulus" && nums.size() == 4)
    return Region::annulus(nums[0], nums[1], {nums[2], nums[3]});
  if (parts[0] == "rect" && nums.size() == 4) return Region::rect(nums[0], nums[1], {nums[2], nums[3]});
  throw std::invalid_argument("malformed region token: " + tok);
}

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = "# " + key + "=";
  if (line.rfind(prefix, 0) != 0) throw std::invalid_argument("field file: expected header '" + prefix + "'");
  return line.substr(prefix.size());
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& field) {
  const Region& r = field.region();
  out << "# rfim-field v1\n";
  out << "# seed=" << field.seed() << "\n";
  out << "# replica=" << field.replica() << "\n";
  out << "# region=" << region_token(r) << "\n";
  out << "x,y,h\n";
  char buf[64];
  for (int v : r.interior()) {
    const Coord c = r.coord(v);
    std::snprintf(buf, sizeof buf, "%.17g", field.at(v));
    out << c.x << "," << c.y << "," << buf << "\n";
  }
}

Field read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# rfim-field v1")
    throw std::invalid_argument("field file: missing 'rfim-field v1' header");
  std::getline(in, line);
  const std::uint64_t seed = std::stoull(header_value(line, "seed"));
  std::getline(in, line);
  const std::uint64_t replica = std::stoull(header_value(line, "replica"));
  std::getline(in, line);
  Field f(parse_region_token(header_value(line, "region")));
  f.set_provenance(seed, replica);
  if (!std::getline(in, line) || line != "x,y,h") throw std::invalid_argument("field file: missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string xs, ys, hs;
    std::getline(ss, xs, ',');
    std::getline(ss, ys, ',');
    std::getline(ss, hs, ',');
    const Coord c{std::stoi(xs), std::stoi(ys)};
    const int v = f.region().index(c);
    if (v < 0) throw std::invalid_argument("field file: vertex outside region");
    double h = 0.0;
    auto res = std::from_chars(hs.data(), hs.data() + hs.size(), h);
    if (res.ec != std::errc()) throw std::invalid_argument("field file: bad value '" + hs + "'");
    f.set(v, h);
  }
  return f;
}

}  // namespace rfim
