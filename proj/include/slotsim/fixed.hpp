#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace slotsim {

// Probability-scale quantity held as an integer count of 1e-4 units, so that
// additive modifier arithmetic and decay back to baseline are exact.
class Fixed4 {
public:
  static constexpr std::int64_t kScale = 10000;

  constexpr Fixed4() = default;

  static constexpr Fixed4 from_units(std::int64_t units) {
    Fixed4 f;
    f.units_ = units;
    return f;
  }
  static Fixed4 from_double(double value) {
    return from_units(static_cast<std::int64_t>(std::llround(value * kScale)));
  }
  static constexpr Fixed4 zero() { return from_units(0); }
  static constexpr Fixed4 one() { return from_units(kScale); }

  [[nodiscard]] constexpr std::int64_t units() const { return units_; }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(units_) / static_cast<double>(kScale);
  }

  [[nodiscard]] constexpr Fixed4 abs() const { return from_units(units_ < 0 ? -units_ : units_); }

  [[nodiscard]] constexpr Fixed4 clamp(Fixed4 lo, Fixed4 hi) const {
    if (units_ < lo.units_) return lo;
    if (units_ > hi.units_) return hi;
    return *this;
  }
  [[nodiscard]] constexpr Fixed4 clamp01() const { return clamp(zero(), one()); }

  // value * num / den, rounded half away from zero.
  [[nodiscard]] constexpr Fixed4 scaled_round(std::int64_t num, std::int64_t den) const {
    const std::int64_t p = units_ * num;
    const std::int64_t q = p >= 0 ? (2 * p + den) / (2 * den) : -((-2 * p + den) / (2 * den));
    return from_units(q);
  }
  // value * num / den, truncated toward zero (never grows in magnitude).
  [[nodiscard]] constexpr Fixed4 scaled_trunc(std::int64_t num, std::int64_t den) const {
    return from_units(units_ * num / den);
  }

  constexpr Fixed4& operator+=(Fixed4 o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Fixed4& operator-=(Fixed4 o) {
    units_ -= o.units_;
    return *this;
  }
  friend constexpr Fixed4 operator+(Fixed4 a, Fixed4 b) { return from_units(a.units_ + b.units_); }
  friend constexpr Fixed4 operator-(Fixed4 a, Fixed4 b) { return from_units(a.units_ - b.units_); }
  friend constexpr Fixed4 operator-(Fixed4 a) { return from_units(-a.units_); }
  // Product of two probability-scale values, rounded to the nearest unit.
  friend constexpr Fixed4 operator*(Fixed4 a, Fixed4 b) { return a.scaled_round(b.units_, kScale); }

  friend constexpr auto operator<=>(Fixed4, Fixed4) = default;

private:
  std::int64_t units_ = 0;
};

inline std::string to_string(Fixed4 f) {
  const std::int64_t u = f.units();
  const std::int64_t a = u < 0 ? -u : u;
  std::string frac = std::to_string(a % Fixed4::kScale);
  frac.insert(0, 4 - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = (u < 0 ? "-" : "") + std::to_string(a / Fixed4::kScale);
  if (!frac.empty()) out += "." + frac;
  return out;
}

}  // namespace slotsim
