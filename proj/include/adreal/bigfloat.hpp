// SPDX-License-Identifier: Apache-2.0
//
// Arbitrary-precision binary floating-point values with directed rounding.
// Backed by MPFR; every arithmetic operation is computed at a caller-chosen
// precision and reports either exactness or a power-of-two bound on its
// rounding error. Values are immutable after construction.
#pragma once

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adreal {

enum class RoundingMode {
  toward_negative,
  toward_positive,
  to_nearest,
  away_from_zero,
};

inline mpfr_rnd_t to_mpfr(RoundingMode r) {
  switch (r) {
    case RoundingMode::toward_negative: return MPFR_RNDD;
    case RoundingMode::toward_positive: return MPFR_RNDU;
    case RoundingMode::to_nearest: return MPFR_RNDN;
    case RoundingMode::away_from_zero: return MPFR_RNDA;
  }
  return MPFR_RNDN;
}

/// Target mantissa length of an operation's result, in bits.
class Precision {
 public:
  explicit Precision(std::int64_t bits) : bits_(bits) {
    if (bits < 2) throw std::invalid_argument("Precision: need at least 2 bits");
    if (bits > (std::int64_t{1} << 40))
      throw std::invalid_argument("Precision: mantissa length beyond any supported use");
  }
  std::int64_t bits() const { return bits_; }

 private:
  std::int64_t bits_;
};

/// Binary floating point value sign * m * 2^b with m in [0.5, 1).
/// The stored form is exact: construction and copies never round.
class BigFloat {
 public:
  BigFloat() { mpfr_init2(v_, 2); mpfr_set_zero(v_, +1); }

  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);  // same precision: exact
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, 2);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  explicit BigFloat(std::int64_t n) {
    mpfr_init2(v_, 64);
    int t = mpfr_set_sj(v_, n, MPFR_RNDN);
    (void)t;
    normalize_zero();
  }

  /// Exact conversion; every finite double is a dyadic rational.
  static BigFloat from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("BigFloat: non-finite double");
    BigFloat r;
    mpfr_set_prec(r.v_, 53);
    mpfr_set_d(r.v_, d, MPFR_RNDN);  // exact at 53 bits
    r.normalize_zero();
    return r;
  }

  /// 2^e, exactly (mantissa 0.5, stored exponent e+1).
  static BigFloat pow2(std::int64_t e) {
    BigFloat r;
    mpfr_set_ui_2exp(r.v_, 1, static_cast<mpfr_exp_t>(e), MPFR_RNDN);
    return r;
  }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sgn() const { return is_zero() ? 0 : (mpfr_sgn(v_) < 0 ? -1 : +1); }

  BigFloat negated() const {
    BigFloat r(*this);
    if (!r.is_zero()) mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }
  BigFloat abs() const {
    BigFloat r(*this);
    mpfr_abs(r.v_, r.v_, MPFR_RNDN);
    r.normalize_zero();
    return r;
  }

  /// Exact scaling by 2^k.
  BigFloat scale_pow2(std::int64_t k) const {
    BigFloat r(*this);
    if (!r.is_zero()) {
      int t = mpfr_mul_2si(r.v_, r.v_, static_cast<long>(k), MPFR_RNDN);
      if (t != 0) throw std::overflow_error("BigFloat::scale_pow2: exponent overflow");
    }
    return r;
  }

  /// Stored exponent b of |x| under the m in [0.5,1) normalization.
  std::int64_t exponent() const {
    require_nonzero("exponent");
    return static_cast<std::int64_t>(mpfr_get_exp(v_));
  }

  /// True iff the mantissa is exactly 0.5, i.e. |x| is a power of two.
  /// Inspects only as much of the mantissa as needed (single significant bit).
  bool mantissa_is_half() const {
    require_nonzero("mantissa_is_half");
    return mpfr_min_prec(v_) == 1;
  }

  /// The stored exponent b; equals ceil(log2|x|) except for powers of two,
  /// where it overestimates by one.
  std::int64_t ceil_log2_inexact() const { return exponent(); }

  /// Exactly ceil(log2|x|).
  std::int64_t ceil_log2_exact() const {
    std::int64_t e = exponent();
    return mantissa_is_half() ? e - 1 : e;
  }

  /// Exactly floor(log2|x|). With m in [0.5,1) this is the stored exponent
  /// minus one, the power-of-two case included.
  std::int64_t floor_log2() const { return exponent() - 1; }

  /// Exact three-way value comparison.
  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
  int cmp_abs(const BigFloat& o) const { return mpfr_cmpabs(v_, o.v_); }
  bool operator==(const BigFloat& o) const { return mpfr_equal_p(v_, o.v_) != 0; }
  bool operator!=(const BigFloat& o) const { return !(*this == o); }

  /// Directed conversion for filter endpoints: result <= value (down) or
  /// >= value (up), with overflow saturating to +-inf as appropriate.
  double to_double_dir(RoundingMode r) const { return mpfr_get_d(v_, to_mpfr(r)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Significant bits from the leading 1 to the trailing 1.
  std::int64_t significant_bits() const {
    return is_zero() ? 0 : static_cast<std::int64_t>(mpfr_min_prec(v_));
  }

  /// Position of the lowest set mantissa bit: value = M * 2^lsb_exponent
  /// with M an odd integer.
  std::int64_t lsb_exponent() const { return exponent() - significant_bits(); }

  /// Exact bit export for test oracles: value = sgn * (sum bytes[i]*256^i) * 2^exp2.
  std::pair<std::vector<unsigned char>, std::int64_t> to_bytes_exp2() const {
    std::vector<unsigned char> bytes;
    if (is_zero()) return {bytes, 0};
    mpz_t z;
    mpz_init(z);
    mpfr_exp_t e = mpfr_get_z_2exp(z, v_);
    mpz_abs(z, z);
    std::size_t count = 0;
    bytes.resize((mpz_sizeinbase(z, 2) + 7) / 8);
    mpz_export(bytes.data(), &count, -1, 1, 0, 0, z);
    bytes.resize(count);
    mpz_clear(z);
    return {bytes, static_cast<std::int64_t>(e)};
  }

  std::string to_string() const {
    mpfr_exp_t e;
    char* s = mpfr_get_str(nullptr, &e, 10, 20, v_, MPFR_RNDN);
    std::string out = s ? s : "?";
    if (s) mpfr_free_str(s);
    return out + "e" + std::to_string(static_cast<long long>(e));
  }

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw_mut() { return v_; }
  void normalize_zero() {
    if (mpfr_zero_p(v_)) mpfr_set_zero(v_, +1);
  }

 private:
  void require_nonzero(const char* who) const {
    if (is_zero()) throw std::domain_error(std::string("BigFloat::") + who + ": zero argument");
  }

  mpfr_t v_;
};

/// Result of a rounded operation. err_exp is absent when the result is the
/// exact mathematical value; otherwise |computed - true| <= 2^err_exp.
struct ArithResult {
  BigFloat value;
  std::optional<std::int64_t> err_exp;
  bool exact() const { return !err_exp.has_value(); }
};

inline ArithResult finish_op(BigFloat&& r, int ternary, RoundingMode mode, std::int64_t p) {
  r.normalize_zero();
  if (ternary == 0) return {std::move(r), std::nullopt};
  // A rounded result cannot be zero while our exponents stay far away from
  // MPFR's range limits.
  if (r.is_zero()) throw std::logic_error("BigFloat op: inexact zero result");
  std::int64_t e = r.exponent();
  std::int64_t err = (mode == RoundingMode::to_nearest) ? e - p - 1 : e - p;
  return {std::move(r), err};
}

inline ArithResult add(const BigFloat& a, const BigFloat& b, Precision p, RoundingMode r) {
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_add(out.raw_mut(), a.raw(), b.raw(), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline ArithResult sub(const BigFloat& a, const BigFloat& b, Precision p, RoundingMode r) {
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_sub(out.raw_mut(), a.raw(), b.raw(), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline ArithResult mul(const BigFloat& a, const BigFloat& b, Precision p, RoundingMode r) {
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_mul(out.raw_mut(), a.raw(), b.raw(), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline ArithResult div(const BigFloat& a, const BigFloat& b, Precision p, RoundingMode r) {
  if (b.is_zero()) throw std::domain_error("BigFloat div: division by exact zero");
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_div(out.raw_mut(), a.raw(), b.raw(), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline ArithResult sqrt(const BigFloat& a, Precision p, RoundingMode r) {
  if (a.sgn() < 0) throw std::domain_error("BigFloat sqrt: negative operand");
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_sqrt(out.raw_mut(), a.raw(), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline ArithResult nth_root(const BigFloat& a, std::int64_t k, Precision p, RoundingMode r) {
  if (k < 2) throw std::invalid_argument("BigFloat nth_root: k must be >= 2");
  if (k % 2 == 0 && a.sgn() < 0)
    throw std::domain_error("BigFloat nth_root: even root of negative operand");
  BigFloat out;
  mpfr_set_prec(out.raw_mut(), static_cast<mpfr_prec_t>(p.bits()));
  int t = mpfr_rootn_ui(out.raw_mut(), a.raw(), static_cast<unsigned long>(k), to_mpfr(r));
  return finish_op(std::move(out), t, r, p.bits());
}

inline BigFloat neg(const BigFloat& a) { return a.negated(); }

/// Exact sum at an automatically chosen precision. Intended for bound
/// checks and tests, not hot paths.
inline BigFloat add_exact(const BigFloat& a, const BigFloat& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::int64_t msb = std::max(a.exponent(), b.exponent()) + 1;
  std::int64_t lsb = std::min(a.lsb_exponent(), b.lsb_exponent());
  auto res = add(a, b, Precision(std::max<std::int64_t>(2, msb - lsb + 2)),
                 RoundingMode::to_nearest);
  if (!res.exact()) throw std::logic_error("add_exact: rounding occurred");
  return std::move(res.value);
}

inline BigFloat sub_exact(const BigFloat& a, const BigFloat& b) {
  return add_exact(a, b.negated());
}

}  // namespace adreal
