#pragma once

#include <cstdint>
#include <vector>

#include "dotvm/fixed.hpp"
#include "dotvm/taint.hpp"

namespace dotvm {

// Dense row-major matrix of fixed-point cells. Taint is per block.
struct Block {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<FixedScalar> cells;
  Taint taint = Taint::Concrete;

  Block() = default;
  Block(std::int64_t r, std::int64_t c, Taint t = Taint::Concrete)
      : rows(r), cols(c), cells(static_cast<std::size_t>(r * c)), taint(t) {}

  FixedScalar& at(std::int64_t r, std::int64_t c) { return cells[static_cast<std::size_t>(r * cols + c)]; }
  const FixedScalar& at(std::int64_t r, std::int64_t c) const {
    return cells[static_cast<std::size_t>(r * cols + c)];
  }
  std::size_t size() const { return cells.size(); }

  friend bool operator==(const Block&, const Block&) = default;
};

struct Scalar {
  FixedScalar value;
  Taint taint = Taint::Concrete;
  friend bool operator==(const Scalar&, const Scalar&) = default;
};

}  // namespace dotvm
