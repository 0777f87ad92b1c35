#pragma once

// Q31.32 fixed-point scalars with R's NA / NaN / Inf classes.
//
// Every operation in dotvm::fixed executes the same sequence of primitive
// steps for a given opcode, whatever the operand values or classes. Class
// tags are combined with mask arithmetic and two-way masked selects; loops
// run a fixed number of iterations. When a CountScope is active, each call
// records one leaf op plus its primitive steps (see opcount.hpp).

#include <cstdint>
#include <limits>
#include <string>

namespace dotvm {

enum class Tag : std::uint8_t { Num = 0, Na = 1, NaN = 2, PosInf = 3, NegInf = 4 };

struct FixedScalar {
  static constexpr int kFracBits = 32;
  static constexpr std::int64_t kOne = std::int64_t{1} << kFracBits;

  std::int64_t raw = 0;  // value * 2^32 when tag == Num, else 0
  Tag tag = Tag::Num;

  static constexpr FixedScalar from_raw(std::int64_t r) { return {r, Tag::Num}; }
  // Exact for |v| < 2^31; public values (loop indices, dims) only.
  static constexpr FixedScalar from_int(std::int64_t v) { return {v * kOne, Tag::Num}; }
  static constexpr FixedScalar na() { return {0, Tag::Na}; }
  static constexpr FixedScalar nan() { return {0, Tag::NaN}; }
  static constexpr FixedScalar pos_inf() { return {0, Tag::PosInf}; }
  static constexpr FixedScalar neg_inf() { return {0, Tag::NegInf}; }
  static constexpr FixedScalar max_num() { return {std::numeric_limits<std::int64_t>::max(), Tag::Num}; }
  static constexpr FixedScalar min_num() { return {std::numeric_limits<std::int64_t>::min(), Tag::Num}; }

  friend bool operator==(const FixedScalar&, const FixedScalar&) = default;
};

namespace fixed {

// R's NA_real_: a quiet NaN whose low 32-bit word is 1954.
inline constexpr std::uint64_t kNaRealBits = 0x7FF00000000007A2ULL;
double na_real();
bool is_na_real(double x);

FixedScalar from_double(double x);
double to_double(FixedScalar x);

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Pow };
enum class MathOp : std::uint8_t { Abs, Sign, Sqrt, Floor, Ceiling, Exp, Log, Sin, Cos, Tan, Neg };
enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp : std::uint8_t { And, Or, Not };
enum class ClassOp : std::uint8_t { IsNa, IsNan, IsInf };

FixedScalar arith(ArithOp op, FixedScalar a, FixedScalar b);
FixedScalar math1(MathOp op, FixedScalar a);
FixedScalar compare(CompareOp op, FixedScalar a, FixedScalar b);
// `b` is ignored for Not.
FixedScalar logic(LogicOp op, FixedScalar a, FixedScalar b = {});
FixedScalar is_class(ClassOp op, FixedScalar a);
// t when cond is truthy, f when cond is zero, NA when cond is NA or NaN.
FixedScalar ct_select(FixedScalar cond, FixedScalar t, FixedScalar f);

FixedScalar add(FixedScalar a, FixedScalar b);
FixedScalar sub(FixedScalar a, FixedScalar b);
FixedScalar mul(FixedScalar a, FixedScalar b);
FixedScalar div(FixedScalar a, FixedScalar b);
FixedScalar mod(FixedScalar a, FixedScalar b);
FixedScalar pow(FixedScalar a, FixedScalar b);
FixedScalar neg(FixedScalar a);

// Human-readable rendering: NA, NaN, Inf, -Inf or a decimal with at most
// `digits` fractional digits (trailing zeros trimmed).
std::string format(FixedScalar x, int digits = 8);

}  // namespace fixed
}  // namespace dotvm
