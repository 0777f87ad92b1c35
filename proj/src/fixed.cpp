#include "dotvm/fixed.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include "ct.hpp"
#include "fixed_internal.hpp"

namespace dotvm::fixed {

using namespace ct;
using detail::tick;

namespace {

constexpr u64 kFracMask = 0xFFFFFFFFULL;
constexpr u64 kNaNBits = 0x7FF8000000000000ULL;
constexpr u64 kPosInfBits = 0x7FF0000000000000ULL;
constexpr u64 kNegInfBits = 0xFFF0000000000000ULL;

// Nonzero-and-finite or infinite counts as true.
struct Truth {
  u64 known_true, known_false, unknown;
};

Truth truth(FixedScalar x) {
  const Class c = classify(x);
  const u64 nz = nonzero(static_cast<u64>(x.raw));
  return {(c.num & nz) | c.pinf | c.ninf, c.num & (1 ^ nz), c.na | c.nan};
}

FixedScalar logical(u64 bit) { return {sel(bit, FixedScalar::kOne, i64{0}), Tag::Num}; }

FixedScalar add_impl(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const i128 s = static_cast<i128>(a.raw) + static_cast<i128>(b.raw);
  const Saturation sat = saturation(s);
  const u64 num = ca.num & cb.num;
  return assemble(ca.na | cb.na,
                  ca.nan | cb.nan | (ca.pinf & cb.ninf) | (ca.ninf & cb.pinf),
                  ca.pinf | cb.pinf | (num & sat.over),
                  ca.ninf | cb.ninf | (num & sat.under),
                  static_cast<i64>(s));
}

FixedScalar sub_impl(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const i128 s = static_cast<i128>(a.raw) - static_cast<i128>(b.raw);
  const Saturation sat = saturation(s);
  const u64 num = ca.num & cb.num;
  return assemble(ca.na | cb.na,
                  ca.nan | cb.nan | (ca.pinf & cb.pinf) | (ca.ninf & cb.ninf),
                  ca.pinf | cb.ninf | (num & sat.over),
                  ca.ninf | cb.pinf | (num & sat.under),
                  static_cast<i64>(s));
}

FixedScalar neg_impl(FixedScalar a) {
  const Class c = classify(a);
  const i128 s = -static_cast<i128>(a.raw);
  const Saturation sat = saturation(s);
  return assemble(c.na, c.nan, c.ninf | (c.num & sat.over), c.pinf, static_cast<i64>(s));
}

FixedScalar mul_impl(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const i128 p = wide_mul(a.raw, b.raw) >> FixedScalar::kFracBits;
  const Saturation sat = saturation(p);
  const u64 num = ca.num & cb.num;
  const u64 za = ca.num & is_zero(static_cast<u64>(a.raw));
  const u64 zb = cb.num & is_zero(static_cast<u64>(b.raw));
  const u64 ainf = ca.pinf | ca.ninf, binf = cb.pinf | cb.ninf;
  const u64 sign = (neg_bit(a.raw) | ca.ninf) ^ (neg_bit(b.raw) | cb.ninf);
  const u64 inf = ainf | binf;
  return assemble(ca.na | cb.na,
                  ca.nan | cb.nan | (za & binf) | (zb & ainf),
                  (inf & (1 ^ sign)) | (num & sat.over),
                  (inf & sign) | (num & sat.under),
                  static_cast<i64>(p));
}

FixedScalar div_impl(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const u64 num = ca.num & cb.num;
  const u64 za = ca.num & is_zero(static_cast<u64>(a.raw));
  const u64 zb = cb.num & is_zero(static_cast<u64>(b.raw));
  const u64 ainf = ca.pinf | ca.ninf, binf = cb.pinf | cb.ninf;
  // b's sign bit is 0 when b is zero, so x/0 takes the dividend's sign.
  const u64 sign = (neg_bit(a.raw) | ca.ninf) ^ (neg_bit(b.raw) | cb.ninf);

  const u128 n = static_cast<u128>(abs_u(a.raw)) << FixedScalar::kFracBits;
  const u64 d = sel(zb, u64{1}, abs_u(b.raw));
  const u128 q = udiv<96>(n, d).quot;
  const u64 ovf = lt_u128(static_cast<u128>(INT64_MAX) + sign, q);
  i64 raw = cneg(sign, static_cast<i64>(static_cast<u64>(q)));
  raw = sel(binf, i64{0}, raw);

  const u64 inf = (ainf & cb.num) | (num & zb & (1 ^ za)) | (num & (1 ^ zb) & ovf);
  return assemble(ca.na | cb.na,
                  ca.nan | cb.nan | (ainf & binf) | (za & zb),
                  inf & (1 ^ sign),
                  inf & sign,
                  raw);
}

// Result takes the divisor's sign, as R's %% does.
FixedScalar mod_impl(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const u64 zb = cb.num & is_zero(static_cast<u64>(b.raw));
  const u64 sa = neg_bit(a.raw), sb = neg_bit(b.raw);
  const u64 ab = sel(zb, u64{1}, abs_u(b.raw));

  const u64 r0 = udiv<64>(static_cast<u128>(abs_u(a.raw)), ab).rem;
  const u64 flip = (sa ^ sb) & nonzero(r0);
  const u64 r = sel(flip, ab - r0, r0);
  i64 raw = cneg(sb, static_cast<i64>(r));
  raw = sel(cb.pinf | cb.ninf, a.raw, raw);

  const u64 apos = ca.num & (1 ^ sa) & nonzero(static_cast<u64>(a.raw));
  return assemble(ca.na | cb.na,
                  ca.nan | cb.nan | ca.pinf | ca.ninf | zb,
                  cb.pinf & ca.num & sa,
                  cb.ninf & apos,
                  raw);
}

FixedScalar abs_impl(FixedScalar a) {
  const Class c = classify(a);
  const i128 s = static_cast<i128>(abs_u(a.raw));
  const Saturation sat = saturation(s);
  return assemble(c.na, c.nan, c.pinf | c.ninf | (c.num & sat.over), 0, static_cast<i64>(s));
}

FixedScalar sign_impl(FixedScalar a) {
  const Class c = classify(a);
  const u64 neg = neg_bit(a.raw) | c.ninf;
  const u64 pos = (c.num & (1 ^ neg_bit(a.raw)) & nonzero(static_cast<u64>(a.raw))) | c.pinf;
  i64 raw = sel(pos, FixedScalar::kOne, i64{0});
  raw = sel(neg, -FixedScalar::kOne, raw);
  return assemble(c.na, c.nan, 0, 0, raw);
}

FixedScalar floor_impl(FixedScalar a) {
  const Class c = classify(a);
  return assemble(c.na, c.nan, c.pinf, c.ninf, static_cast<i64>(static_cast<u64>(a.raw) & ~kFracMask));
}

FixedScalar ceiling_impl(FixedScalar a) {
  const Class c = classify(a);
  const i128 s = (static_cast<i128>(a.raw) + static_cast<i128>(kFracMask)) & ~static_cast<i128>(kFracMask);
  const Saturation sat = saturation(s);
  return assemble(c.na, c.nan, c.pinf | (c.num & sat.over), c.ninf, static_cast<i64>(s));
}

// Ordering key: finite values keep their raw value, infinities sit just
// outside the representable range.
i128 order_key(FixedScalar x, const Class& c) {
  i128 k = static_cast<i128>(x.raw);
  k = sel128(c.pinf, static_cast<i128>(INT64_MAX) + 1, k);
  return sel128(c.ninf, static_cast<i128>(INT64_MIN) - 1, k);
}

}  // namespace

double na_real() { return std::bit_cast<double>(kNaRealBits); }

bool is_na_real(double x) {
  const u64 bits = std::bit_cast<u64>(x);
  return std::isnan(x) && (bits & kFracMask) == 1954;
}

FixedScalar from_double(double x) {
  tick(LeafOp::FromDouble);
  const u64 bits = std::bit_cast<u64>(x);
  const u64 sign = bits >> 63;
  const u64 expo = (bits >> 52) & 0x7FF;
  const u64 frac = bits & ((u64{1} << 52) - 1);

  const u64 special = eq(expo, 0x7FF);
  const u64 nan_any = special & nonzero(frac);
  const u64 na = nan_any & eq(bits & kFracMask, 1954);
  const u64 inf = special & is_zero(frac);

  // value = m * 2^(e - 1075), raw = m * 2^(e - 1043); subnormals use e = 1.
  const u64 normal = nonzero(expo);
  const u64 m = frac | (normal << 52);
  const i64 e = static_cast<i64>(sel(normal, expo, u64{1}));
  const i64 shift = e - 1043;
  const u64 big = lt_s(11, shift);
  const u64 left = static_cast<u64>(clamp(shift, 0, 11));
  const u64 right = static_cast<u64>(clamp(-shift, 0, 127));
  const u128 scaled = shl128(static_cast<u128>(m), left) << 1;
  const u128 mag = (shr128(scaled, right) + 1) >> 1;  // round half away from zero

  const u64 ovf = big | lt_u128(static_cast<u128>(INT64_MAX) + sign, mag);
  const u64 finite_ovf = (1 ^ special) & ovf;
  const i64 raw = cneg(sign, static_cast<i64>(static_cast<u64>(mag)));
  return assemble(na, nan_any & (1 ^ na), (inf | finite_ovf) & (1 ^ sign), (inf | finite_ovf) & sign, raw);
}

double to_double(FixedScalar x) {
  tick(LeafOp::ToDouble);
  const Class c = classify(x);
  const double v = static_cast<double>(x.raw) * 0x1p-32;
  u64 bits = std::bit_cast<u64>(v);
  bits = sel(c.na, kNaRealBits, bits);
  bits = sel(c.nan, kNaNBits, bits);
  bits = sel(c.pinf, kPosInfBits, bits);
  bits = sel(c.ninf, kNegInfBits, bits);
  return std::bit_cast<double>(bits);
}

FixedScalar add(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Add);
  return add_impl(a, b);
}

FixedScalar sub(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Sub);
  return sub_impl(a, b);
}

FixedScalar mul(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Mul);
  return mul_impl(a, b);
}

FixedScalar div(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Div);
  return div_impl(a, b);
}

FixedScalar mod(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Mod);
  return mod_impl(a, b);
}

FixedScalar pow(FixedScalar a, FixedScalar b) {
  tick(LeafOp::Pow);
  return impl::pow(a, b);
}

FixedScalar neg(FixedScalar a) {
  tick(LeafOp::Neg);
  return neg_impl(a);
}

FixedScalar arith(ArithOp op, FixedScalar a, FixedScalar b) {
  switch (op) {
    case ArithOp::Add: return add(a, b);
    case ArithOp::Sub: return sub(a, b);
    case ArithOp::Mul: return mul(a, b);
    case ArithOp::Div: return div(a, b);
    case ArithOp::Mod: return mod(a, b);
    case ArithOp::Pow: return pow(a, b);
  }
  return FixedScalar::nan();
}

FixedScalar math1(MathOp op, FixedScalar a) {
  switch (op) {
    case MathOp::Abs: tick(LeafOp::Abs); return abs_impl(a);
    case MathOp::Sign: tick(LeafOp::Sign); return sign_impl(a);
    case MathOp::Sqrt: tick(LeafOp::Sqrt); return impl::sqrt(a);
    case MathOp::Floor: tick(LeafOp::Floor); return floor_impl(a);
    case MathOp::Ceiling: tick(LeafOp::Ceiling); return ceiling_impl(a);
    case MathOp::Exp: tick(LeafOp::Exp); return impl::exp(a);
    case MathOp::Log: tick(LeafOp::Log); return impl::log(a);
    case MathOp::Sin: tick(LeafOp::Sin); return impl::sin(a);
    case MathOp::Cos: tick(LeafOp::Cos); return impl::cos(a);
    case MathOp::Tan: tick(LeafOp::Tan); return impl::tan(a);
    case MathOp::Neg: return neg(a);
  }
  return FixedScalar::nan();
}

FixedScalar compare(CompareOp op, FixedScalar a, FixedScalar b) {
  static constexpr LeafOp kLeaf[] = {LeafOp::Eq, LeafOp::Ne, LeafOp::Lt, LeafOp::Le, LeafOp::Gt, LeafOp::Ge};
  tick(kLeaf[static_cast<int>(op)]);
  const Class ca = classify(a), cb = classify(b);
  const i128 ka = order_key(a, ca), kb = order_key(b, cb);
  const u64 lt = lt_s128(ka, kb);
  const u64 gt = lt_s128(kb, ka);
  const u64 same = (1 ^ lt) & (1 ^ gt);
  u64 bit = 0;
  switch (op) {
    case CompareOp::Eq: bit = same; break;
    case CompareOp::Ne: bit = 1 ^ same; break;
    case CompareOp::Lt: bit = lt; break;
    case CompareOp::Le: bit = lt | same; break;
    case CompareOp::Gt: bit = gt; break;
    case CompareOp::Ge: bit = gt | same; break;
  }
  const u64 unknown = ca.na | ca.nan | cb.na | cb.nan;
  return assemble(unknown, 0, 0, 0, sel(bit, FixedScalar::kOne, i64{0}));
}

FixedScalar logic(LogicOp op, FixedScalar a, FixedScalar b) {
  const Truth ta = truth(a), tb = truth(b);
  switch (op) {
    case LogicOp::And: {
      tick(LeafOp::And);
      const u64 f = ta.known_false | tb.known_false;
      const u64 na = (1 ^ f) & (ta.unknown | tb.unknown);
      return assemble(na, 0, 0, 0, sel((1 ^ f) & (1 ^ na), FixedScalar::kOne, i64{0}));
    }
    case LogicOp::Or: {
      tick(LeafOp::Or);
      const u64 t = ta.known_true | tb.known_true;
      const u64 na = (1 ^ t) & (ta.unknown | tb.unknown);
      return assemble(na, 0, 0, 0, sel(t, FixedScalar::kOne, i64{0}));
    }
    case LogicOp::Not:
      tick(LeafOp::Not);
      return assemble(ta.unknown, 0, 0, 0, sel(ta.known_false, FixedScalar::kOne, i64{0}));
  }
  return FixedScalar::na();
}

FixedScalar is_class(ClassOp op, FixedScalar a) {
  const Class c = classify(a);
  switch (op) {
    case ClassOp::IsNa: tick(LeafOp::IsNa); return logical(c.na | c.nan);
    case ClassOp::IsNan: tick(LeafOp::IsNan); return logical(c.nan);
    case ClassOp::IsInf: tick(LeafOp::IsInf); return logical(c.pinf | c.ninf);
  }
  return FixedScalar::na();
}

FixedScalar ct_select(FixedScalar cond, FixedScalar t, FixedScalar f) {
  tick(LeafOp::Select);
  const Truth tc = truth(cond);
  i64 raw = sel(tc.known_true, t.raw, f.raw);
  u64 tag = sel(tc.known_true, static_cast<u64>(t.tag), static_cast<u64>(f.tag));
  raw = sel(tc.unknown, i64{0}, raw);
  tag = sel(tc.unknown, static_cast<u64>(Tag::Na), tag);
  return {raw, static_cast<Tag>(tag)};
}

std::string format(FixedScalar x, int digits) {
  switch (x.tag) {
    case Tag::Na: return "NA";
    case Tag::NaN: return "NaN";
    case Tag::PosInf: return "Inf";
    case Tag::NegInf: return "-Inf";
    case Tag::Num: break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, static_cast<double>(x.raw) * 0x1p-32);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

}  // namespace dotvm::fixed
