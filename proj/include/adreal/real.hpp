// SPDX-License-Identifier: Apache-2.0
//
// The exact-decisions number type. Arithmetic builds expression DAG nodes
// without evaluating anything beyond the machine-precision filter; every
// comparison is decided exactly, refining approximations only as far as the
// decision requires. Copying a Real shares the underlying node.
#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>

#include "adreal/eval.hpp"
#include "adreal/expr_dag.hpp"

namespace adreal {

using ContextPtr = std::shared_ptr<EvalContext>;

inline ContextPtr make_context(StrategyConfig cfg = StrategyConfig{}) {
  auto ctx = std::make_shared<EvalContext>();
  ctx->config = cfg;
  return ctx;
}

inline const ContextPtr& default_context() {
  static ContextPtr ctx = make_context();
  return ctx;
}

class Real {
 public:
  Real() : Real(std::int64_t{0}) {}
  explicit Real(std::int64_t v, ContextPtr ctx = default_context())
      : handle_(make_leaf(BigFloat(v))), ctx_(std::move(ctx)) {}
  explicit Real(int v, ContextPtr ctx = default_context())
      : Real(static_cast<std::int64_t>(v), std::move(ctx)) {}
  explicit Real(const BigFloat& v, ContextPtr ctx = default_context())
      : handle_(make_leaf(v)), ctx_(std::move(ctx)) {}

  /// Exact: every finite double is a dyadic rational.
  static Real from_double(double d, ContextPtr ctx = default_context()) {
    return Real(BigFloat::from_double(d), std::move(ctx));
  }

  /// General rationals enter as a quotient of two integer leaves.
  static Real rational(std::int64_t num, std::int64_t den, ContextPtr ctx = default_context()) {
    Real n(num, ctx);
    Real d(den, std::move(ctx));
    return n / d;
  }

  const ExprHandle& handle() const { return handle_; }
  const ContextPtr& context() const { return ctx_; }
  Counters& counters() const { return ctx_->counters; }

  friend Real operator-(const Real& a) { return Real(make_node(OpKind::neg, a.handle_), a.ctx_); }
  friend Real operator+(const Real& a, const Real& b) { return binary(OpKind::add, a, b); }
  friend Real operator-(const Real& a, const Real& b) { return binary(OpKind::sub, a, b); }
  friend Real operator*(const Real& a, const Real& b) { return binary(OpKind::mul, a, b); }
  friend Real operator/(const Real& a, const Real& b) { return binary(OpKind::div, a, b); }

  Real& operator+=(const Real& o) { return *this = *this + o; }
  Real& operator-=(const Real& o) { return *this = *this - o; }
  Real& operator*=(const Real& o) { return *this = *this * o; }
  Real& operator/=(const Real& o) { return *this = *this / o; }

  friend Real sqrt(const Real& a) { return Real(make_node(OpKind::sqrt, a.handle_), a.ctx_); }
  friend Real root(const Real& a, std::int64_t k) {
    return Real(make_root(a.handle_, k), a.ctx_);
  }

  /// Exact sign of the represented value; may trigger evaluation.
  int sign() const { return sign_of(handle_, *ctx_); }

  /// An approximation within 2^q of the true value plus the certifying bound.
  std::pair<BigFloat, ErrorBound> to_approx(std::int64_t q) const {
    return adreal::to_approx(handle_, q, *ctx_);
  }

  friend std::strong_ordering operator<=>(const Real& a, const Real& b) {
    int s = (a - b).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Real& a, const Real& b) { return (a <=> b) == 0; }

 private:
  Real(ExprHandle h, ContextPtr ctx) : handle_(std::move(h)), ctx_(std::move(ctx)) {}

  static Real binary(OpKind op, const Real& a, const Real& b) {
    if (a.ctx_ != b.ctx_)
      throw std::invalid_argument("Real: operands belong to different contexts");
    return Real(make_node(op, a.handle_, b.handle_), a.ctx_);
  }

  ExprHandle handle_;
  ContextPtr ctx_;
};

inline int sign(const Real& a) { return a.sign(); }

enum class CompareResult { LT, EQ, GT };

inline CompareResult compare(const Real& a, const Real& b) {
  int s = (a - b).sign();
  return s < 0 ? CompareResult::LT : (s > 0 ? CompareResult::GT : CompareResult::EQ);
}

inline bool equals(const Real& a, const Real& b) { return compare(a, b) == CompareResult::EQ; }

// Integer conveniences; the literal adopts the other operand's context.
inline Real operator+(const Real& a, std::int64_t b) { return a + Real(b, a.context()); }
inline Real operator+(std::int64_t a, const Real& b) { return Real(a, b.context()) + b; }
inline Real operator-(const Real& a, std::int64_t b) { return a - Real(b, a.context()); }
inline Real operator-(std::int64_t a, const Real& b) { return Real(a, b.context()) - b; }
inline Real operator*(const Real& a, std::int64_t b) { return a * Real(b, a.context()); }
inline Real operator*(std::int64_t a, const Real& b) { return Real(a, b.context()) * b; }
inline Real operator/(const Real& a, std::int64_t b) { return a / Real(b, a.context()); }
inline Real operator/(std::int64_t a, const Real& b) { return Real(a, b.context()) / b; }

}  // namespace adreal
