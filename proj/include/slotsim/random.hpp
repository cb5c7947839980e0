#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace slotsim {

// Source of uniform draws in [0, 1). Every draw the spin consumes goes
// through this interface so that traces can be replayed.
class RandomSource {
public:
  virtual ~RandomSource() = default;
  virtual double next_unit() = 0;
};

// mt19937_64 is fully specified by the standard; the unit mapping below uses
// the top 53 bits so sequences are identical across standard libraries.
class SeededRandom final : public RandomSource {
public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  double next_unit() override { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

// Replays a fixed list of draws; throws std::out_of_range when exhausted.
class ScriptedRandom final : public RandomSource {
public:
  explicit ScriptedRandom(std::vector<double> draws) : draws_(std::move(draws)) {}
  double next_unit() override { return draws_.at(next_++); }
  [[nodiscard]] std::size_t consumed() const { return next_; }

private:
  std::vector<double> draws_;
  std::size_t next_ = 0;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-(turn, student) spin seed, so a student's draws do not depend on the
// order in which classmates are processed.
constexpr std::uint64_t derive_spin_seed(std::uint64_t session_seed, int turn, std::string_view student_id) {
  return splitmix64(splitmix64(session_seed ^ fnv1a64(student_id)) + static_cast<std::uint64_t>(turn));
}

}  // namespace slotsim
