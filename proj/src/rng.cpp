#include "rfim/rng.hpp"

#include <cmath>
#include <numbers>

namespace rfim {

double counter_normal(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t a = mix64(key ^ mix64(2 * counter));
  const std::uint64_t b = mix64(key ^ mix64(2 * counter + 1));
  const double u1 = bits_to_open_unit(a);
  const double u2 = bits_to_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = bits_to_open_unit(engine_());
  const double u2 = bits_to_unit(engine_());
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rfim
