// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cstdint>
#include <optional>
#include <vector>

#include "adreal/bigfloat.hpp"
#include "support/expr_gen.hpp"
#include "support/test_rational.hpp"

using namespace adreal;
using oracle::Rat;

namespace {

// Independent brute-force long division: round num/den (both positive) to
// p mantissa bits in the given mode, by producing quotient bits one at a
// time and inspecting the remainder.
struct DivOracle {
  std::uint64_t mantissa;  // p bits (or p+1 after a carry), msb first
  std::int64_t exp2;       // value = mantissa * 2^exp2
  bool inexact;
};

DivOracle long_divide(std::uint64_t num, std::uint64_t den, int p, RoundingMode mode,
                      int sign) {
  // scale so that 0.5 <= num/den < 1
  std::int64_t e = 0;
  unsigned __int128 n = num, d = den;
  while (n >= d) {
    d <<= 1;
    ++e;
  }
  while (2 * n < d) {
    n <<= 1;
    --e;
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < p; ++i) {
    n <<= 1;
    bits <<= 1;
    if (n >= d) {
      n -= d;
      bits |= 1;
    }
  }
  bool inexact = n != 0;
  bool up;
  switch (mode) {
    case RoundingMode::to_nearest: {
      unsigned __int128 twice = n << 1;
      up = twice > d || (twice == d && (bits & 1));
      break;
    }
    case RoundingMode::toward_positive: up = inexact && sign > 0; break;
    case RoundingMode::toward_negative: up = inexact && sign < 0; break;
    case RoundingMode::away_from_zero: up = inexact; break;
    default: up = false;
  }
  if (up) ++bits;
  return {bits, e - p, inexact};
}

BigFloat bf_from_mant_exp(std::uint64_t m, std::int64_t e) {
  return BigFloat(static_cast<std::int64_t>(m)).scale_pow2(e);
}

}  // namespace

TEST_SUITE("bigfloat") {

TEST_CASE("exact construction and normalization") {
  BigFloat five(5);
  CHECK(five.sgn() == 1);
  CHECK(five.exponent() == 3);  // 5 = 0.625 * 2^3
  CHECK_FALSE(five.mantissa_is_half());

  BigFloat q = BigFloat::from_double(0.25);
  CHECK(q == BigFloat::pow2(-2));
  CHECK(q.mantissa_is_half());

  BigFloat z;
  CHECK(z.is_zero());
  CHECK(z.sgn() == 0);
  CHECK_THROWS_AS(z.exponent(), std::domain_error);

  // phi-normalization contract: 2^e has mantissa 0.5 and stored exponent e+1
  BigFloat p = BigFloat::pow2(-3);
  CHECK(p.exponent() == -2);
  CHECK(p.mantissa_is_half());
  CHECK(p == BigFloat::from_double(0.125));
}

TEST_CASE("add: exactly representable sums stay exact") {
  auto r = add(BigFloat(1), BigFloat(1), Precision(10), RoundingMode::to_nearest);
  CHECK(r.exact());
  CHECK(r.value == BigFloat(2));
}

TEST_CASE("div 1/3 at 4 bits toward_positive") {
  auto r = div(BigFloat(1), BigFloat(3), Precision(4), RoundingMode::toward_positive);
  CHECK(r.value == BigFloat::from_double(0.34375));
  REQUIRE(r.err_exp.has_value());
  CHECK(*r.err_exp <= -5);
  // true error really is below the reported bound
  Rat err = (Rat::from_bigfloat(r.value) - Rat::fraction(1, 3)).abs();
  CHECK(Rat::cmp(err, Rat::pow2(*r.err_exp)) <= 0);
}

TEST_CASE("sqrt of a perfect square is exact") {
  auto r = sqrt(BigFloat(4), Precision(8), RoundingMode::to_nearest);
  CHECK(r.exact());
  CHECK(r.value == BigFloat(2));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(div(BigFloat(1), BigFloat(0), Precision(8), RoundingMode::to_nearest),
                  std::domain_error);
  CHECK_THROWS_AS(sqrt(BigFloat(-2), Precision(8), RoundingMode::to_nearest),
                  std::domain_error);
  CHECK_THROWS_AS(nth_root(BigFloat(-2), 4, Precision(8), RoundingMode::to_nearest),
                  std::domain_error);
  CHECK(nth_root(BigFloat(-8), 3, Precision(8), RoundingMode::to_nearest).value ==
        BigFloat(-2));
  CHECK_THROWS_AS(Precision(1), std::invalid_argument);
}

TEST_CASE("ceil_log2 and floor_log2 on the spec points") {
  CHECK(BigFloat(3).ceil_log2_inexact() == 2);
  CHECK(BigFloat(16).ceil_log2_inexact() == 5);  // power of two: one too high
  CHECK(BigFloat::from_double(0.5).ceil_log2_inexact() == 0);

  CHECK(BigFloat(16).ceil_log2_exact() == 4);
  CHECK(BigFloat(3).ceil_log2_exact() == 2);
  CHECK(BigFloat::from_double(0.75).ceil_log2_exact() == 0);

  CHECK(BigFloat(16).floor_log2() == 4);
  CHECK(BigFloat(3).floor_log2() == 1);
  CHECK(BigFloat::from_double(0.75).floor_log2() == -1);

  CHECK_THROWS_AS(BigFloat(0).ceil_log2_exact(), std::domain_error);
}

TEST_CASE("log2 bracket invariants on random values") {
  testgen::Rng rng(0xb1f0);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t m = rng.next() >> (rng.below(60) + 4);
    if (m == 0) m = 1;
    std::int64_t e = rng.in(-60, 60);
    BigFloat x = bf_from_mant_exp(m, e);
    if (rng.below(2)) x = x.negated();

    std::int64_t ce = x.ceil_log2_exact();
    std::int64_t ci = x.ceil_log2_inexact();
    std::int64_t fl = x.floor_log2();
    bool pow2 = (m & (m - 1)) == 0;

    CHECK(ce <= ci);
    CHECK(ci <= ce + 1);
    CHECK((ci == ce + 1) == pow2);

    // 2^(ce-1) < |x| <= 2^ce  and  2^fl <= |x| < 2^(fl+1)
    BigFloat ax = x.abs();
    CHECK(BigFloat::pow2(ce - 1).cmp(ax) < 0);
    CHECK(ax.cmp(BigFloat::pow2(ce)) <= 0);
    CHECK(BigFloat::pow2(fl).cmp(ax) <= 0);
    CHECK(ax.cmp(BigFloat::pow2(fl + 1)) < 0);
  }
}

TEST_CASE("directed rounding brackets the exact result") {
  testgen::Rng rng(0xd1c7);
  for (int i = 0; i < 400; ++i) {
    BigFloat a = bf_from_mant_exp((rng.next() >> 20) | 1, rng.in(-20, 20));
    BigFloat b = bf_from_mant_exp((rng.next() >> 20) | 1, rng.in(-20, 20));
    if (rng.below(2)) a = a.negated();
    if (rng.below(2)) b = b.negated();
    Precision p(rng.in(4, 40));
    Precision hi(120);

    auto check_op = [&](auto op) {
      BigFloat down = op(p, RoundingMode::toward_negative).value;
      BigFloat up = op(p, RoundingMode::toward_positive).value;
      BigFloat ref_d = op(hi, RoundingMode::toward_negative).value;
      BigFloat ref_u = op(hi, RoundingMode::toward_positive).value;
      CHECK(down.cmp(ref_d) <= 0);
      CHECK(up.cmp(ref_u) >= 0);
      // away_from_zero never shrinks the magnitude
      BigFloat away = op(p, RoundingMode::away_from_zero).value;
      CHECK(away.cmp_abs(ref_d.abs().cmp(ref_u.abs()) > 0 ? ref_d : ref_u) >= 0);
    };

    check_op([&](Precision pp, RoundingMode r) { return add(a, b, pp, r); });
    check_op([&](Precision pp, RoundingMode r) { return sub(a, b, pp, r); });
    check_op([&](Precision pp, RoundingMode r) { return mul(a, b, pp, r); });
    if (!b.is_zero()) check_op([&](Precision pp, RoundingMode r) { return div(a, b, pp, r); });
    BigFloat aa = a.abs();
    check_op([&](Precision pp, RoundingMode r) { return sqrt(aa, pp, r); });
    check_op([&](Precision pp, RoundingMode r) { return nth_root(aa, 3, pp, r); });
  }
}

TEST_CASE("reported error bounds hold against the rational oracle") {
  testgen::Rng rng(0xe44b);
  for (int i = 0; i < 400; ++i) {
    std::int64_t na = rng.in(1, 1 << 20), nb = rng.in(1, 1 << 20);
    BigFloat a(na), b(nb);
    Precision p(rng.in(4, 30));
    RoundingMode modes[4] = {RoundingMode::to_nearest, RoundingMode::toward_negative,
                             RoundingMode::toward_positive, RoundingMode::away_from_zero};
    RoundingMode m = modes[rng.below(4)];

    auto r = div(a, b, p, m);
    Rat truth = Rat::fraction(na, nb);
    if (r.exact()) {
      CHECK(Rat::cmp(Rat::from_bigfloat(r.value), truth) == 0);
    } else {
      CHECK(oracle::abs_diff_leq_pow2(r.value, truth, *r.err_exp));
    }

    auto rm = mul(a, b, p, m);
    Rat tm = Rat(na) * Rat(nb);
    if (rm.exact()) {
      CHECK(Rat::cmp(Rat::from_bigfloat(rm.value), tm) == 0);
    } else {
      CHECK(oracle::abs_diff_leq_pow2(rm.value, tm, *rm.err_exp));
    }
  }
}

TEST_CASE("division against the independent long-division oracle") {
  testgen::Rng rng(0x10dd);
  RoundingMode modes[4] = {RoundingMode::to_nearest, RoundingMode::toward_negative,
                           RoundingMode::toward_positive, RoundingMode::away_from_zero};
  for (int i = 0; i < 600; ++i) {
    std::uint64_t num = static_cast<std::uint64_t>(rng.in(1, 1 << 24));
    std::uint64_t den = static_cast<std::uint64_t>(rng.in(1, 1 << 24));
    int p = static_cast<int>(rng.in(2, 24));
    RoundingMode m = modes[rng.below(4)];
    int sign = rng.below(2) ? 1 : -1;

    DivOracle want = long_divide(num, den, p, m, sign);
    BigFloat a(sign * static_cast<std::int64_t>(num));
    auto got = div(a, BigFloat(static_cast<std::int64_t>(den)), Precision(p), m);
    BigFloat expect = bf_from_mant_exp(want.mantissa, want.exp2);
    if (sign < 0) expect = expect.negated();
    CHECK(got.value == expect);
    CHECK(got.exact() == !want.inexact);
  }
}

TEST_CASE("exact product matches the oracle bit for bit") {
  testgen::Rng rng(0xabcd);
  for (int i = 0; i < 200; ++i) {
    std::int64_t a = rng.in(-(1 << 30), 1 << 30);
    std::int64_t b = rng.in(-(1 << 30), 1 << 30);
    auto r = mul(BigFloat(a), BigFloat(b), Precision(80), RoundingMode::to_nearest);
    CHECK(r.exact());
    CHECK(Rat::cmp(Rat::from_bigfloat(r.value), Rat(a) * Rat(b)) == 0);
  }
}

TEST_CASE("scale_pow2 is lossless") {
  BigFloat x = BigFloat::from_double(0.8125);
  CHECK(x.scale_pow2(7).scale_pow2(-7) == x);
  CHECK(x.scale_pow2(3) == BigFloat::from_double(6.5));
}

TEST_CASE("directed double conversion brackets the value") {
  testgen::Rng rng(0x77aa);
  for (int i = 0; i < 300; ++i) {
    BigFloat x = bf_from_mant_exp(rng.next() | 1, rng.in(-300, 300));
    if (rng.below(2)) x = x.negated();
    double lo = x.to_double_dir(RoundingMode::toward_negative);
    double hi = x.to_double_dir(RoundingMode::toward_positive);
    CHECK(lo <= hi);
    Rat v = Rat::from_bigfloat(x);
    if (std::isfinite(lo)) CHECK(Rat::cmp(Rat::from_double(lo), v) <= 0);
    if (std::isfinite(hi)) CHECK(Rat::cmp(Rat::from_double(hi), v) >= 0);
  }
}

}  // TEST_SUITE
