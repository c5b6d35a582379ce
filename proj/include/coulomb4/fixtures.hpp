#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "core.hpp"

namespace coulomb4 {

/// Published parameter sets, rounded to four decimals. The G sets sit on the ground-state
/// constraint surface at alpha1 = -1/10, the E sets on the first-excited surface at alpha1 = -1/5.
struct Fixture {
  std::string_view name;
  int n;
  PotentialParams params;
};

inline constexpr std::array<Fixture, 6> kFixtures{{
    {"G1", 0, {-0.1, -0.0776, -0.0097, 0.0053}},
    {"G2", 0, {-0.1, -0.0603, -0.0070, 0.0037}},
    {"G3", 0, {-0.1, -0.0527, -0.0102, 0.0053}},
    {"E1", 1, {-0.2, -0.0301, -0.0002, 0.0029}},
    {"E2", 1, {-0.2, -0.0141, -0.0003, 0.0569}},
    {"E3", 1, {-0.2, -0.0880, -0.0075, 0.0438}},
}};

/// Half a unit in the last published decimal.
inline constexpr double kFixtureRounding = 5e-5;

inline std::optional<Fixture> find_fixture(std::string_view name) {
  for (const auto& f : kFixtures)
    if (f.name == name) return f;
  return std::nullopt;
}

}  // namespace coulomb4
