#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace dotvm {

// Leaf operations of the fixed-point library. Every public entry point in
// dotvm::fixed bumps exactly one of these per call.
enum class LeafOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod, Pow, Neg,
  Abs, Sign, Sqrt, Floor, Ceiling, Exp, Log, Sin, Cos, Tan,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Not,
  IsNa, IsNan, IsInf,
  Select, FromDouble, ToDouble,
  kCount
};

// Primitive steps executed inside leaf operations.
enum class Step : std::uint8_t {
  Select,      // masked two-way choice
  Compare,     // mask-producing comparison
  WideMul,     // 64x64 -> 128 multiply
  DivStep,     // one restoring-division iteration
  RootStep,    // one square-root digit iteration
  SeriesTerm,  // one polynomial / series term
  CordicStep,  // one CORDIC rotation
  ShiftStage,  // one barrel-shifter stage
  kCount
};

std::string_view to_string(LeafOp op);
std::string_view to_string(Step s);

class OpCount {
 public:
  static constexpr std::size_t kLeafOps = static_cast<std::size_t>(LeafOp::kCount);
  static constexpr std::size_t kSteps = static_cast<std::size_t>(Step::kCount);

  void add_leaf(LeafOp op) { ++leaf_[static_cast<std::size_t>(op)]; }
  void add_step(Step s, std::uint64_t n) { steps_[static_cast<std::size_t>(s)] += n; }

  std::uint64_t leaf(LeafOp op) const { return leaf_[static_cast<std::size_t>(op)]; }
  std::uint64_t step(Step s) const { return steps_[static_cast<std::size_t>(s)]; }
  std::uint64_t total_leaf() const;
  std::uint64_t total_steps() const;

  OpCount& operator+=(const OpCount& o);
  friend OpCount operator-(OpCount a, const OpCount& b);
  friend bool operator==(const OpCount&, const OpCount&) = default;

  std::string describe() const;

 private:
  std::array<std::uint64_t, kLeafOps> leaf_{};
  std::array<std::uint64_t, kSteps> steps_{};
};

// Installs `count` as the calling thread's active counter for the lifetime
// of the scope. Scopes nest; the previous counter is restored on exit.
class CountScope {
 public:
  explicit CountScope(OpCount& count);
  ~CountScope();
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCount* previous_;
};

namespace detail {
extern thread_local OpCount* active_count;

inline void tick(Step s, std::uint64_t n = 1) {
  if (active_count) active_count->add_step(s, n);
}
inline void tick(LeafOp op) {
  if (active_count) active_count->add_leaf(op);
}
}  // namespace detail

}  // namespace dotvm
