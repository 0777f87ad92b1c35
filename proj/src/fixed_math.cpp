#include <array>

#include "ct.hpp"
#include "fixed_internal.hpp"

namespace dotvm::fixed::impl {

using namespace ct;
using detail::tick;

namespace {

constexpr u64 kFracMask = 0xFFFFFFFFULL;
constexpr i64 kOne = FixedScalar::kOne;

constexpr u64 kTwoPiQ90Hi = 0x1921fb54ULL;
constexpr u64 kTwoPiQ90Lo = 0x442d18469898cc51ULL;
constexpr i64 kInvTwoPiQ64 = 0x28be60db9391054aLL;
constexpr i64 kPiQ60 = 0x3243f6a8885a308dLL;
constexpr i64 kHalfPiQ60 = 0x1921fb54442d1847LL;
constexpr i64 kLn2Q62 = 0x2c5c85fdf473de6bLL;
constexpr i64 kInvLn2Q62 = 0x5c551d94ae0bf85eLL;
constexpr i64 kCordicGainQ60 = 0x9b74eda8435e5a6LL;

constexpr int kCordicSteps = 60;
constexpr std::array<i64, kCordicSteps> kAtanQ60 = {
    0xc90fdaa22168c23LL, 0x76b19c1586ed3daLL, 0x3eb6ebf25901bacLL, 0x1fd5ba9aac2f6dcLL,
    0xffaaddb967ef4eLL,  0x7ff556eea5d893LL,  0x3ffeaab776e535LL,  0x1fffd555bbba97LL,
    0xffffaaaaddddcLL,   0x7ffff55556eefLL,   0x3ffffeaaaab77LL,   0x1fffffd55555cLL,
    0xffffffaaaaabLL,    0x7ffffff55555LL,    0x3ffffffeaaabLL,    0x1fffffffd555LL,
    0xffffffffaabLL,     0x7ffffffff55LL,     0x3ffffffffebLL,     0x1fffffffffdLL,
    0x10000000000LL,     0x8000000000LL,      0x4000000000LL,      0x2000000000LL,
    0x1000000000LL,      0x800000000LL,       0x400000000LL,       0x200000000LL,
    0x100000000LL,       0x80000000LL,        0x40000000LL,        0x20000000LL,
    0x10000000LL,        0x8000000LL,         0x4000000LL,         0x2000000LL,
    0x1000000LL,         0x800000LL,          0x400000LL,          0x200000LL,
    0x100000LL,          0x80000LL,           0x40000LL,           0x20000LL,
    0x10000LL,           0x8000LL,            0x4000LL,            0x2000LL,
    0x1000LL,            0x800LL,             0x400LL,             0x200LL,
    0x100LL,             0x80LL,              0x40LL,              0x20LL,
    0x10LL,              0x8LL,               0x4LL,               0x2LL,
};

constexpr int kExpDegree = 16;
constexpr int kLogTerms = 20;
constexpr int kSqrtSteps = 48;

// 1/k! in Q60.
constexpr std::array<i64, kExpDegree + 1> kInvFactQ60 = [] {
  std::array<i64, kExpDegree + 1> c{};
  u64 f = 1;
  for (int k = 0; k <= kExpDegree; ++k) {
    if (k > 0) f *= static_cast<u64>(k);
    c[k] = static_cast<i64>(((u64{1} << 60) + f / 2) / f);
  }
  return c;
}();

// 1/(2j+1) in Q62.
constexpr std::array<i64, kLogTerms + 1> kInvOddQ62 = [] {
  std::array<i64, kLogTerms + 1> c{};
  for (int j = 0; j <= kLogTerms; ++j) {
    const u64 d = 2 * static_cast<u64>(j) + 1;
    c[j] = static_cast<i64>(((u64{1} << 62) + d / 2) / d);
  }
  return c;
}();

// e^y for y in Q58. Returns the Q32 magnitude, which may exceed INT64_MAX.
u128 exp_q58(i128 y) {
  const i128 lim = static_cast<i128>(31) << 58;
  y = sel128(lt_s128(y, -lim), -lim, y);
  y = sel128(lt_s128(lim, y), lim, y);

  const i128 t = wide_mul(static_cast<i64>(y), kInvLn2Q62);  // Q120
  const i64 k = static_cast<i64>((t + (static_cast<i128>(1) << 119)) >> 120);
  const i128 r62 = (y << 4) - wide_mul(k, kLn2Q62);
  const i128 r = r62 >> 2;  // Q60, |r| <= ln2/2

  i128 p = kInvFactQ60[kExpDegree];
  for (int j = kExpDegree - 1; j >= 0; --j) {
    tick(Step::SeriesTerm);
    tick(Step::WideMul);
    p = ((p * r) >> 60) + kInvFactQ60[j];
  }

  // p * 2^k in Q32, rounded: shift (p << 64) right by 92 - k.
  const u64 sh = static_cast<u64>(clamp(92 - k, 47, 127));
  const u128 v = shr128(static_cast<u128>(p) << 64, sh - 1);
  return (v + 1) >> 1;
}

// ln(x) in Q58 for x > 0 given as a Q32 magnitude. Output for x == 0 is
// meaningless; callers mask it.
i64 log_q58(u64 x) {
  const u64 p = msb64(x);
  const u64 m = shl64(x, 62 - p);  // mantissa in [1, 2) as Q62
  const u64 one = u64{1} << 62;
  const u128 num = static_cast<u128>(m - one) << 62;
  const i128 s = static_cast<i128>(udiv<62>(num, m + one).quot);  // (m-1)/(m+1) < 1/3
  tick(Step::WideMul);
  const i128 s2 = (s * s) >> 62;

  // ln m = 2 * atanh(s) = 2 * sum s^(2j+1) / (2j+1)
  i128 q = kInvOddQ62[kLogTerms];
  for (int j = kLogTerms - 1; j >= 0; --j) {
    tick(Step::SeriesTerm);
    tick(Step::WideMul);
    q = ((q * s2) >> 62) + kInvOddQ62[j];
  }
  tick(Step::WideMul);
  const i128 ln_m = (s * q) >> 61;
  const i128 total = ln_m + wide_mul(static_cast<i64>(p) - 32, kLn2Q62);
  return static_cast<i64>((total + 8) >> 4);
}

struct SinCos {
  i64 s, c;  // Q60
};

SinCos sincos_q60(i64 raw) {
  const i128 t = wide_mul(raw, kInvTwoPiQ64);  // Q96
  const i64 k = static_cast<i64>((t + (static_cast<i128>(1) << 95)) >> 96);
  const i128 two_pi = static_cast<i128>((static_cast<u128>(kTwoPiQ90Hi) << 64) | kTwoPiQ90Lo);
  tick(Step::WideMul);
  const i128 r90 = (static_cast<i128>(raw) << 58) - static_cast<i128>(k) * two_pi;
  i64 r = static_cast<i64>(r90 >> 30);  // Q60 in [-pi, pi]

  const u64 hi = lt_s(kHalfPiQ60, r);
  const u64 lo = lt_s(r, -kHalfPiQ60);
  r = sel(hi, kPiQ60 - r, r);
  r = sel(lo, -kPiQ60 - r, r);
  const u64 flip = hi | lo;

  i64 x = kCordicGainQ60, y = 0, z = r;
  for (int i = 0; i < kCordicSteps; ++i) {
    tick(Step::CordicStep);
    const u64 n = neg_bit(z);
    const i64 dx = cneg(n, y >> i);
    const i64 dy = cneg(n, x >> i);
    x -= dx;
    y += dy;
    z -= cneg(n, kAtanQ60[i]);
  }
  return {y, cneg(flip, x)};
}

i64 q60_to_q32(i64 v) { return (v + (i64{1} << 27)) >> 28; }

}  // namespace

FixedScalar sqrt(FixedScalar a) {
  const Class c = classify(a);
  const u64 neg = neg_bit(a.raw);
  const u128 n = static_cast<u128>(sel(neg, u64{0}, static_cast<u64>(a.raw))) << 32;
  u128 rem = 0, root = 0;
  for (int i = kSqrtSteps - 1; i >= 0; --i) {
    tick(Step::RootStep);
    rem = (rem << 2) | ((n >> (2 * i)) & 3);
    const u128 trial = (root << 2) | 1;
    const u64 ge = 1 ^ lt_u128(rem, trial);
    rem -= trial & mask128(ge);
    root = (root << 1) | ge;
  }
  return assemble(c.na, c.nan | (c.num & neg) | c.ninf, c.pinf, 0, static_cast<i64>(root));
}

FixedScalar exp(FixedScalar a) {
  const Class c = classify(a);
  const u128 mag = exp_q58(static_cast<i128>(a.raw) << 26);
  const u64 ovf = lt_u128(static_cast<u128>(INT64_MAX), mag);
  const i64 raw = sel(c.ninf, i64{0}, static_cast<i64>(static_cast<u64>(mag)));
  return assemble(c.na, c.nan, c.pinf | (c.num & ovf), 0, raw);
}

FixedScalar log(FixedScalar a) {
  const Class c = classify(a);
  const u64 neg = neg_bit(a.raw);
  const u64 zero = is_zero(static_cast<u64>(a.raw));
  const i64 l = log_q58(static_cast<u64>(a.raw));
  const i64 raw = (l + (i64{1} << 25)) >> 26;
  return assemble(c.na, c.nan | c.ninf | (c.num & neg), c.pinf, c.num & zero, raw);
}

FixedScalar sin(FixedScalar a) {
  const Class c = classify(a);
  const SinCos sc = sincos_q60(a.raw);
  return assemble(c.na, c.nan | c.pinf | c.ninf, 0, 0, q60_to_q32(sc.s));
}

FixedScalar cos(FixedScalar a) {
  const Class c = classify(a);
  const SinCos sc = sincos_q60(a.raw);
  return assemble(c.na, c.nan | c.pinf | c.ninf, 0, 0, q60_to_q32(sc.c));
}

FixedScalar tan(FixedScalar a) {
  const Class c = classify(a);
  const SinCos sc = sincos_q60(a.raw);
  const u64 sign = neg_bit(sc.s) ^ neg_bit(sc.c);
  const u128 n = static_cast<u128>(abs_u(sc.s)) << 32;
  const u64 d = abs_u(sc.c);
  const u128 q = udiv<92>(n, sel(is_zero(d), u64{1}, d)).quot;
  const u64 ovf = c.num & lt_u128(static_cast<u128>(INT64_MAX) + sign, q);
  const i64 raw = cneg(sign, static_cast<i64>(static_cast<u64>(q)));
  return assemble(c.na, c.nan | c.pinf | c.ninf, ovf & (1 ^ sign), ovf & sign, raw);
}

// exp(b * log|a|) with R's special cases for zero, negative and infinite
// operands. A negative base needs an integral exponent.
FixedScalar pow(FixedScalar a, FixedScalar b) {
  const Class ca = classify(a), cb = classify(b);
  const u64 sa = neg_bit(a.raw);
  const u64 aabs = abs_u(a.raw);
  const u64 za = ca.num & is_zero(aabs);
  const u64 zb = cb.num & is_zero(static_cast<u64>(b.raw));
  const u64 bneg = cb.num & neg_bit(b.raw);
  const u64 bpos = cb.num & (1 ^ bneg) & (1 ^ zb);
  const u64 bint = is_zero(static_cast<u64>(b.raw) & kFracMask);
  const u64 odd = bint & (static_cast<u64>(b.raw >> 32) & 1);

  const i64 l = log_q58(aabs);
  const u128 mag = exp_q58(wide_mul(b.raw, l) >> 32);
  const u64 gsign = sa & odd;
  const u64 ovf = lt_u128(static_cast<u128>(INT64_MAX) + gsign, mag);
  const i64 graw = cneg(gsign, static_cast<i64>(static_cast<u64>(mag)));
  const u64 gen = ca.num & (1 ^ za) & cb.num & (1 ^ zb);

  const u64 above = lt_u(static_cast<u64>(kOne), aabs);
  const u64 unit = eq(aabs, static_cast<u64>(kOne));
  const u64 agt1 = (ca.num & above) | ca.pinf | ca.ninf;
  const u64 aeq1 = ca.num & unit;
  const u64 alt1 = ca.num & (1 ^ above) & (1 ^ unit);
  const u64 binf = cb.pinf | cb.ninf;

  const u64 pinf = (gen & ovf & (1 ^ gsign)) | (za & bneg) | (ca.pinf & bpos) |
                   (ca.ninf & bpos & (1 ^ odd)) | (cb.pinf & agt1) | (cb.ninf & alt1);
  const u64 ninf = (gen & ovf & gsign) | (ca.ninf & bpos & odd);
  const u64 one = zb | (binf & aeq1);

  i64 raw = sel(gen, graw, i64{0});
  raw = sel(one, kOne, raw);
  return assemble(ca.na | cb.na, ca.nan | cb.nan | (gen & sa & (1 ^ bint)), pinf, ninf, raw);
}

}  // namespace dotvm::fixed::impl
