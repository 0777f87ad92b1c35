#pragma once

#include <cstdint>
#include <string_view>

namespace dotvm {

// Two-point information-flow lattice: Concrete < Pseudonym.
enum class Taint : std::uint8_t { Concrete = 0, Pseudonym = 1 };

constexpr Taint taint_join(Taint a, Taint b) {
  return (a == Taint::Pseudonym || b == Taint::Pseudonym) ? Taint::Pseudonym
                                                          : Taint::Concrete;
}

constexpr std::string_view to_string(Taint t) {
  return t == Taint::Pseudonym ? "pseudonym" : "concrete";
}

}  // namespace dotvm
