// SPDX-License-Identifier: Apache-2.0
//
// The three error-bound representations and their sound combination rules:
// a direct radius held in a short bigfloat, a logarithmic integer exponent,
// and a logarithmic floating-point exponent. Conversions between the direct
// and logarithmic worlds go through phi (lossless) and phi_hat (lossy).
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "adreal/bigfloat.hpp"

namespace adreal {

enum class ErrorRepKind { direct, log_int, log_float };

inline const char* name_of(ErrorRepKind k) {
  switch (k) {
    case ErrorRepKind::direct: return "direct";
    case ErrorRepKind::log_int: return "log_int";
    case ErrorRepKind::log_float: return "log_float";
  }
  return "?";
}

/// Direct error radii are kept short; bounds only need to be sound, not tight.
inline constexpr std::int64_t kDirectRadiusBits = 32;

/// Log-int exponents saturate here; a saturated bound behaves like an
/// infinite radius (leq_accuracy false, covers_zero true), which is sound.
inline constexpr std::int64_t kLogIntSaturate = std::int64_t{1} << 60;

inline std::int64_t sat_log(std::int64_t e) {
  if (e > kLogIntSaturate) return kLogIntSaturate;
  if (e < -kLogIntSaturate) return -kLogIntSaturate;
  return e;
}

/// phi: lossless conversion of a logarithmic bound to a direct radius, 2^e.
inline BigFloat phi(std::int64_t e_log) { return BigFloat::pow2(e_log); }

/// phi_hat: ceil(log2(e_dir)), the lossy reverse direction. The inexact
/// variant returns the stored exponent and overestimates by one on powers
/// of two; the exact variant corrects that case.
inline std::int64_t phi_hat(const BigFloat& e_dir, bool exact) {
  if (e_dir.is_zero()) throw std::domain_error("phi_hat: zero radius; use the EXACT marker");
  return exact ? e_dir.ceil_log2_exact() : e_dir.ceil_log2_inexact();
}

/// a + b rounded toward +infinity, via 2Sum.
inline double up_add(double a, double b) {
  double s = a + b;
  double ap = s - b;
  double bp = s - ap;
  double err = (a - ap) + (b - bp);
  return err > 0 ? std::nextafter(s, std::numeric_limits<double>::infinity()) : s;
}

/// An upper bound on the radius of an error interval, in one of the three
/// representations, or the EXACT marker (radius zero) in any of them.
class ErrorBound {
 public:
  static ErrorBound exact(ErrorRepKind k) {
    ErrorBound e(k);
    e.exact_ = true;
    return e;
  }

  /// Direct radius, rounded up to kDirectRadiusBits bits. A zero radius is
  /// the EXACT marker.
  static ErrorBound direct(const BigFloat& radius) {
    if (radius.sgn() < 0) throw std::invalid_argument("ErrorBound: negative radius");
    ErrorBound e(ErrorRepKind::direct);
    if (radius.is_zero()) {
      e.exact_ = true;
      return e;
    }
    if (radius.significant_bits() <= kDirectRadiusBits) {
      e.radius_ = radius;
    } else {
      e.radius_ = add(radius, BigFloat(), Precision(kDirectRadiusBits),
                      RoundingMode::toward_positive)
                      .value;
    }
    return e;
  }

  static ErrorBound log_int(std::int64_t e_log) {
    ErrorBound e(ErrorRepKind::log_int);
    e.elog_ = sat_log(e_log);
    return e;
  }

  static ErrorBound log_float(double e_log) {
    if (!std::isfinite(e_log)) throw std::invalid_argument("ErrorBound: non-finite exponent");
    ErrorBound e(ErrorRepKind::log_float);
    e.efloat_ = e_log;
    return e;
  }

  /// Wrap an operation's reported rounding error (2^err_exp, or exact).
  static ErrorBound from_op_error(ErrorRepKind k, std::optional<std::int64_t> err_exp) {
    if (!err_exp.has_value()) return exact(k);
    switch (k) {
      case ErrorRepKind::direct: return direct(phi(*err_exp));
      case ErrorRepKind::log_int: return log_int(*err_exp);
      case ErrorRepKind::log_float: return log_float(static_cast<double>(*err_exp));
    }
    throw std::logic_error("from_op_error: bad kind");
  }

  ErrorRepKind kind() const { return kind_; }
  bool is_exact() const { return exact_; }

  const BigFloat& direct_radius() const {
    require_kind(ErrorRepKind::direct, "direct_radius");
    return radius_;
  }
  std::int64_t log_int_exponent() const {
    require_kind(ErrorRepKind::log_int, "log_int_exponent");
    if (exact_) throw std::logic_error("log_int_exponent: EXACT bound");
    return elog_;
  }
  double log_float_exponent() const {
    require_kind(ErrorRepKind::log_float, "log_float_exponent");
    if (exact_) throw std::logic_error("log_float_exponent: EXACT bound");
    return efloat_;
  }

  /// ceil(log2(radius)) as an integer, absent for EXACT. The direct case
  /// goes through phi_hat with the chosen exactness.
  std::optional<std::int64_t> radius_upper_log2(bool exact_conv) const {
    if (exact_) return std::nullopt;
    switch (kind_) {
      case ErrorRepKind::direct: return phi_hat(radius_, exact_conv);
      case ErrorRepKind::log_int: return elog_;
      case ErrorRepKind::log_float: return static_cast<std::int64_t>(std::ceil(efloat_));
    }
    throw std::logic_error("radius_upper_log2: bad kind");
  }

  /// A BigFloat >= the represented radius (equal except for fractional
  /// log-float exponents, which round up to the next power of two).
  BigFloat radius_upper() const {
    if (exact_) return BigFloat();
    switch (kind_) {
      case ErrorRepKind::direct: return radius_;
      case ErrorRepKind::log_int: return phi(elog_);
      case ErrorRepKind::log_float:
        return phi(static_cast<std::int64_t>(std::ceil(efloat_)));
    }
    throw std::logic_error("radius_upper: bad kind");
  }

  /// True iff the radius is guaranteed <= 2^q. For the direct form this is
  /// an exact comparison against 2^q, never a conversion through phi_hat.
  bool leq_accuracy(std::int64_t q) const {
    if (exact_) return true;
    switch (kind_) {
      case ErrorRepKind::direct: return radius_.cmp(phi(q)) <= 0;
      case ErrorRepKind::log_int: return elog_ <= q;
      case ErrorRepKind::log_float: return efloat_ <= static_cast<double>(q);
    }
    throw std::logic_error("leq_accuracy: bad kind");
  }

 private:
  explicit ErrorBound(ErrorRepKind k) : kind_(k) {}
  void require_kind(ErrorRepKind k, const char* who) const {
    if (kind_ != k) throw std::logic_error(std::string("ErrorBound::") + who + ": wrong kind");
  }

  ErrorRepKind kind_;
  bool exact_ = false;
  BigFloat radius_;
  std::int64_t elog_ = 0;
  double efloat_ = 0.0;
};

namespace detail {

/// Upper bound on log2(1 + 2^-d) for d >= 0, rounded up. Clamped to 1,
/// which is sound since 2^a + 2^b <= 2^(max+1).
inline double log2_1p_pow2_up(double d) {
  if (d <= 0.0) return 1.0;
  double t = std::exp2(-d);
  t = std::nextafter(t, 2.0);  // cover libm rounding
  double r = std::log2(1.0 + t);
  r = std::nextafter(std::nextafter(r, 2.0), 2.0);
  return r < 1.0 ? r : 1.0;
}

}  // namespace detail

/// Sound upper bound on the sum of two radii in the same representation.
/// EXACT is the identity element and is representation-neutral; mixing two
/// non-exact representations is a caller error.
inline ErrorBound combine(const ErrorBound& a, const ErrorBound& b) {
  if (a.is_exact()) return b;
  if (b.is_exact()) return a;
  if (a.kind() != b.kind())
    throw std::logic_error("combine: mixed error representations");
  switch (a.kind()) {
    case ErrorRepKind::direct:
      return ErrorBound::direct(add(a.direct_radius(), b.direct_radius(),
                                    Precision(kDirectRadiusBits),
                                    RoundingMode::toward_positive)
                                    .value);
    case ErrorRepKind::log_int: {
      std::int64_t m = std::max(a.log_int_exponent(), b.log_int_exponent());
      return ErrorBound::log_int(sat_log(m + 1));
    }
    case ErrorRepKind::log_float: {
      double x = a.log_float_exponent();
      double y = b.log_float_exponent();
      double m = std::max(x, y);
      if (x == y) return ErrorBound::log_float(up_add(m, 1.0));
      double d = std::nextafter(std::abs(x - y), 0.0);  // lower bound on |x-y|
      return ErrorBound::log_float(up_add(m, detail::log2_1p_pow2_up(d)));
    }
  }
  throw std::logic_error("combine: bad kind");
}

inline ErrorBound combine3(const ErrorBound& a, const ErrorBound& b, const ErrorBound& c) {
  return combine(combine(a, b), c);
}

/// Bound on 2^k times the radius: an exponent shift in every representation.
inline ErrorBound scale_pow2(const ErrorBound& e, std::int64_t k) {
  if (e.is_exact()) return e;
  switch (e.kind()) {
    case ErrorRepKind::direct: return ErrorBound::direct(e.direct_radius().scale_pow2(k));
    case ErrorRepKind::log_int: return ErrorBound::log_int(sat_log(e.log_int_exponent() + k));
    case ErrorRepKind::log_float:
      return ErrorBound::log_float(up_add(e.log_float_exponent(), static_cast<double>(k)));
  }
  throw std::logic_error("scale_pow2: bad kind");
}

/// True iff 0 lies in [approx - radius, approx + radius], never
/// underestimating the radius (fractional log-float exponents round up).
inline bool covers_zero(const BigFloat& approx, const ErrorBound& e) {
  if (e.is_exact()) return approx.is_zero();
  if (approx.is_zero()) return true;
  return approx.cmp_abs(e.radius_upper()) <= 0;
}

}  // namespace adreal
