#include "dotvm/opcount.hpp"

#include <numeric>

namespace dotvm {

namespace detail {
thread_local OpCount* active_count = nullptr;
}

std::string_view to_string(LeafOp op) {
  static constexpr std::array<std::string_view, OpCount::kLeafOps> names = {
      "add",   "sub", "mul",  "div",   "mod",   "pow",   "neg",     "abs",
      "sign",  "sqrt", "floor", "ceiling", "exp", "log", "sin",     "cos",
      "tan",   "eq",  "ne",   "lt",    "le",    "gt",    "ge",      "and",
      "or",    "not", "is_na", "is_nan", "is_inf", "select", "from_double", "to_double"};
  return names[static_cast<std::size_t>(op)];
}

std::string_view to_string(Step s) {
  static constexpr std::array<std::string_view, OpCount::kSteps> names = {
      "select", "compare", "wide_mul", "div_step", "root_step", "series_term", "cordic_step",
      "shift_stage"};
  return names[static_cast<std::size_t>(s)];
}

std::uint64_t OpCount::total_leaf() const {
  return std::accumulate(leaf_.begin(), leaf_.end(), std::uint64_t{0});
}

std::uint64_t OpCount::total_steps() const {
  return std::accumulate(steps_.begin(), steps_.end(), std::uint64_t{0});
}

OpCount& OpCount::operator+=(const OpCount& o) {
  for (std::size_t i = 0; i < kLeafOps; ++i) leaf_[i] += o.leaf_[i];
  for (std::size_t i = 0; i < kSteps; ++i) steps_[i] += o.steps_[i];
  return *this;
}

OpCount operator-(OpCount a, const OpCount& b) {
  for (std::size_t i = 0; i < OpCount::kLeafOps; ++i) a.leaf_[i] -= b.leaf_[i];
  for (std::size_t i = 0; i < OpCount::kSteps; ++i) a.steps_[i] -= b.steps_[i];
  return a;
}

std::string OpCount::describe() const {
  std::string out;
  for (std::size_t i = 0; i < kLeafOps; ++i)
    if (leaf_[i]) out += std::string(to_string(static_cast<LeafOp>(i))) + "=" + std::to_string(leaf_[i]) + " ";
  for (std::size_t i = 0; i < kSteps; ++i)
    if (steps_[i]) out += std::string(to_string(static_cast<Step>(i))) + "=" + std::to_string(steps_[i]) + " ";
  if (!out.empty()) out.pop_back();
  return out;
}

CountScope::CountScope(OpCount& count) : previous_(detail::active_count) {
  detail::active_count = &count;
}

CountScope::~CountScope() { detail::active_count = previous_; }

}  // namespace dotvm
