#pragma once

// Constant-time integer primitives. Nothing here branches on, or indexes
// memory by, its arguments; shift amounts and loop trip counts that vary with
// data go through fixed-stage barrel shifters.

#include <cstdint>

#include "dotvm/fixed.hpp"
#include "dotvm/opcount.hpp"

namespace dotvm::ct {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

using detail::tick;

// 0/1 predicates -----------------------------------------------------------

inline u64 nonzero(u64 x) { return (x | (u64{0} - x)) >> 63; }
inline u64 is_zero(u64 x) { return 1 ^ nonzero(x); }
inline u64 eq(u64 a, u64 b) { return is_zero(a ^ b); }
inline u64 mask(u64 bit) { return u64{0} - bit; }
inline u128 mask128(u64 bit) { return u128{0} - bit; }

inline u64 lt_u(u64 a, u64 b) {
  tick(Step::Compare);
  return static_cast<u64>((static_cast<u128>(a) - static_cast<u128>(b)) >> 127);
}

inline u64 lt_s(i64 a, i64 b) {
  tick(Step::Compare);
  return static_cast<u64>(static_cast<u128>(static_cast<i128>(a) - static_cast<i128>(b)) >> 127);
}

inline u64 neg_bit(i64 a) { return static_cast<u64>(a) >> 63; }

// Unsigned 128-bit a < b, via the borrow out of a - b.
inline u64 lt_u128(u128 a, u128 b) {
  tick(Step::Compare);
  const u128 d = a - b;
  return static_cast<u64>(((~a & b) | (~(a ^ b) & d)) >> 127);
}

// Signed 128-bit a < b for operands whose difference cannot overflow.
inline u64 lt_s128(i128 a, i128 b) {
  tick(Step::Compare);
  return static_cast<u64>(static_cast<u128>(a - b) >> 127);
}

// Selects -------------------------------------------------------------------

inline u64 sel(u64 bit, u64 a, u64 b) {
  tick(Step::Select);
  const u64 m = mask(bit);
  return (a & m) | (b & ~m);
}

inline i64 sel(u64 bit, i64 a, i64 b) {
  return static_cast<i64>(sel(bit, static_cast<u64>(a), static_cast<u64>(b)));
}

inline u128 sel128(u64 bit, u128 a, u128 b) {
  tick(Step::Select);
  const u128 m = mask128(bit);
  return (a & m) | (b & ~m);
}

inline i128 sel128(u64 bit, i128 a, i128 b) {
  return static_cast<i128>(sel128(bit, static_cast<u128>(a), static_cast<u128>(b)));
}

// Two's-complement negate when bit is 1.
inline i64 cneg(u64 bit, i64 v) {
  const u64 m = mask(bit);
  return static_cast<i64>((static_cast<u64>(v) ^ m) - m);
}

inline u64 abs_u(i64 v) { return static_cast<u64>(cneg(neg_bit(v), v)); }

// Clamp a signed amount into [lo, hi].
inline i64 clamp(i64 v, i64 lo, i64 hi) {
  v = sel(lt_s(v, lo), lo, v);
  return sel(lt_s(hi, v), hi, v);
}

// Barrel shifters --------------------------------------------------------------

inline u64 shr64(u64 v, u64 amount /* 0..63 */) {
  for (int b = 0; b < 6; ++b) {
    tick(Step::ShiftStage);
    v = sel((amount >> b) & 1, v >> (1u << b), v);
  }
  return v;
}

inline u64 shl64(u64 v, u64 amount /* 0..63 */) {
  for (int b = 0; b < 6; ++b) {
    tick(Step::ShiftStage);
    v = sel((amount >> b) & 1, v << (1u << b), v);
  }
  return v;
}

inline u128 shr128(u128 v, u64 amount /* 0..127 */) {
  for (int b = 0; b < 7; ++b) {
    tick(Step::ShiftStage);
    v = sel128((amount >> b) & 1, v >> (1u << b), v);
  }
  return v;
}

inline u128 shl128(u128 v, u64 amount /* 0..127 */) {
  for (int b = 0; b < 7; ++b) {
    tick(Step::ShiftStage);
    v = sel128((amount >> b) & 1, v << (1u << b), v);
  }
  return v;
}

// Index of the highest set bit (0 for v == 0).
inline u64 msb64(u64 v) {
  u64 n = 0;
  for (int s = 32; s >= 1; s >>= 1) {
    tick(Step::ShiftStage);
    const u64 t = v >> s;
    const u64 hit = nonzero(t);
    n += static_cast<u64>(s) & mask(hit);
    v = sel(hit, t, v);
  }
  return n;
}

// Restoring division. Requires (n >> QuotBits) < d; produces the low
// QuotBits of the quotient and the remainder in exactly QuotBits steps.
template <int QuotBits>
struct DivResult {
  u128 quot;
  u64 rem;
};

template <int QuotBits>
DivResult<QuotBits> udiv(u128 n, u64 d) {
  static_assert(QuotBits > 0 && QuotBits < 128);
  u128 rem = n >> QuotBits;
  u128 q = 0;
  for (int i = QuotBits - 1; i >= 0; --i) {
    tick(Step::DivStep);
    rem = (rem << 1) | ((n >> i) & 1);
    const u64 ge = 1 ^ lt_u128(rem, d);
    rem -= static_cast<u128>(d) & mask128(ge);
    q |= static_cast<u128>(ge) << i;
  }
  return {q, static_cast<u64>(rem)};
}

inline i128 wide_mul(i64 a, i64 b) {
  tick(Step::WideMul);
  return static_cast<i128>(a) * static_cast<i128>(b);
}

inline u128 wide_mul_u(u64 a, u64 b) {
  tick(Step::WideMul);
  return static_cast<u128>(a) * static_cast<u128>(b);
}

// Tag lanes --------------------------------------------------------------------

struct Class {
  u64 num, na, nan, pinf, ninf;
};

inline Class classify(FixedScalar x) {
  const u64 t = static_cast<u64>(x.tag);
  return {eq(t, 0), eq(t, 1), eq(t, 2), eq(t, 3), eq(t, 4)};
}

// Builds a result from class flags; priority NA > NaN > +Inf > -Inf > Num.
inline FixedScalar assemble(u64 na, u64 nan, u64 pinf, u64 ninf, i64 raw) {
  u64 tag = static_cast<u64>(Tag::Num);
  tag = sel(ninf, static_cast<u64>(Tag::NegInf), tag);
  tag = sel(pinf, static_cast<u64>(Tag::PosInf), tag);
  tag = sel(nan, static_cast<u64>(Tag::NaN), tag);
  tag = sel(na, static_cast<u64>(Tag::Na), tag);
  raw = sel(eq(tag, 0), raw, i64{0});
  return {raw, static_cast<Tag>(tag)};
}

// Overflow flags for a Q32 value held in 128 bits.
struct Saturation {
  u64 over, under;
};

inline Saturation saturation(i128 v) {
  return {lt_s128(static_cast<i128>(INT64_MAX), v), lt_s128(v, static_cast<i128>(INT64_MIN))};
}

}  // namespace dotvm::ct
