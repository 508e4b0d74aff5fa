// SPDX-License-Identifier: Apache-2.0
//
// Accuracy-driven computation over the expression DAG: bottom-up
// initialization at a small fixed precision, top-down accuracy requests with
// three-term error budgeting (two child terms and the operation's rounding
// error, each granted 2^(q-2)), sign determination with exponentially
// growing accuracy, and zero declaration through separation bounds.
//
// Requested accuracies propagate as logarithmic integers in every strategy;
// the strategies differ in how stored and initialization-time bounds are
// represented, and in whether ceil_log2 conversions are exact.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adreal/bigfloat.hpp"
#include "adreal/error_bound.hpp"
#include "adreal/expr_dag.hpp"
#include "adreal/sep_bound.hpp"

namespace adreal {

struct StrategyConfig {
  ErrorRepKind store_rep = ErrorRepKind::direct;
  ErrorRepKind init_rep = ErrorRepKind::direct;
  bool sep_cache = true;
  bool exact_ceil_log2 = false;
  std::int64_t q0 = -26;
  std::int64_t growth = 2;
  std::int64_t init_precision_bits = 53;
};

/// The three named strategies: def (direct store/init), lgi (log-int),
/// lgd (log-float). Propagation is logarithmic-integer in all of them.
inline StrategyConfig strategy_config(std::string_view name) {
  StrategyConfig cfg;
  if (name == "def") {
    cfg.store_rep = cfg.init_rep = ErrorRepKind::direct;
  } else if (name == "lgi") {
    cfg.store_rep = cfg.init_rep = ErrorRepKind::log_int;
  } else if (name == "lgd") {
    cfg.store_rep = cfg.init_rep = ErrorRepKind::log_float;
  } else {
    throw std::invalid_argument("strategy_config: unknown strategy '" + std::string(name) + "'");
  }
  return cfg;
}

struct EvalContext {
  StrategyConfig config;
  Counters counters;
};

struct divide_by_zero_error : std::domain_error {
  explicit divide_by_zero_error(ExprHandle n)
      : std::domain_error("division by a subexpression proven zero"), node(std::move(n)) {}
  ExprHandle node;
};

struct root_domain_error : std::domain_error {
  explicit root_domain_error(ExprHandle n)
      : std::domain_error("even root of a negative subexpression"), node(std::move(n)) {}
  ExprHandle node;
};

void init_bottom_up(const ExprHandle& n, EvalContext& ctx);
void request_accuracy(const ExprHandle& n, std::int64_t q, EvalContext& ctx);
int sign_of(const ExprHandle& n, EvalContext& ctx);

namespace eval_detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) == (b < 0)) ? q + 1 : q;
}
inline std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  __int128 p = static_cast<__int128>(a) * b;
  if (p > kLogIntSaturate) return kLogIntSaturate;
  if (p < -kLogIntSaturate) return -kLogIntSaturate;
  return static_cast<std::int64_t>(p);
}
inline std::int64_t ilog2(std::int64_t k) {
  std::int64_t r = 0;
  while (k > 1) {
    k >>= 1;
    ++r;
  }
  return r;
}

/// ceil(log2|x|) in the configured flavor; the inexact variant is the
/// cheap default for magnitude bounds.
inline std::int64_t mag_ceil(const BigFloat& x, const StrategyConfig& cfg) {
  return cfg.exact_ceil_log2 ? x.ceil_log2_exact() : x.ceil_log2_inexact();
}

inline std::optional<std::int64_t> err_upper_log(const Node& n, const StrategyConfig& cfg) {
  return n.stored_error->radius_upper_log2(cfg.exact_ceil_log2);
}

/// Upper bound m with |true value| <= 2^m, or nullopt for an exact zero.
/// The normal form is ceil_log2(|approx|) + 1: the extra bit absorbs the
/// stored error whenever the error sits below the approximation magnitude.
/// When it does not (or the approximation is zero), fall back to the error
/// exponent, which always dominates the value then.
inline std::optional<std::int64_t> mag_upper_log(const Node& n, const StrategyConfig& cfg) {
  std::optional<std::int64_t> e = err_upper_log(n, cfg);
  if (n.approx.is_zero()) {
    if (!e) return std::nullopt;          // exactly zero
    return sat_log(*e + 1);               // |val| <= radius
  }
  std::int64_t c = mag_ceil(n.approx, cfg);
  if (!e || *e <= n.approx.floor_log2()) return sat_log(c + 1);  // absorbed
  return sat_log(std::max(c, *e) + 1);
}

/// Magnitude bound for budgeting. A zero approximation with a non-exact
/// error carries no magnitude information, so the node is refined until its
/// value emerges (or is declared zero). A stored bound that dwarfs the
/// approximation by hundreds of bits (initialization leftovers, possibly
/// saturated) is re-established just above the approximation magnitude:
/// loose enough to stay zero-suspicious, sane enough for budgeting.
inline std::optional<std::int64_t> mag_upper_refined(const ExprHandle& n, EvalContext& ctx) {
  constexpr std::int64_t kDominationCap = std::int64_t{1} << 20;
  for (int guard = 0; guard < 64; ++guard) {
    if (n->error_is_exact()) break;
    auto e = err_upper_log(*n, ctx.config);
    if (n->approx.is_zero()) {
      request_accuracy(n, std::min(sat_log(*e * 2), sat_log(*e - 32)), ctx);
      continue;
    }
    if (*e <= sat_log(mag_ceil(n->approx, ctx.config) + kDominationCap)) break;
    request_accuracy(n, sat_log(mag_ceil(n->approx, ctx.config) + 64), ctx);
  }
  return mag_upper_log(*n, ctx.config);
}

inline Precision precision_for(std::int64_t result_mag_log, std::int64_t q) {
  return Precision(std::max<std::int64_t>(2, sat_log(result_mag_log - q + 4)));
}

inline ErrorBound make_stored(ErrorRepKind rep, std::optional<std::int64_t> e_prop) {
  if (!e_prop) return ErrorBound::exact(rep);
  switch (rep) {
    case ErrorRepKind::direct: return ErrorBound::direct(phi(*e_prop));
    case ErrorRepKind::log_int: return ErrorBound::log_int(*e_prop);
    case ErrorRepKind::log_float: return ErrorBound::log_float(static_cast<double>(*e_prop));
  }
  throw std::logic_error("make_stored: bad rep");
}

/// The recomputation check. The stored bound is compared against the
/// logarithmic request; a direct stored bound is checked exactly against
/// 2^q unless exact_ceil_log2 is off, in which case the inexact phi_hat
/// conversion is used -- deliberately reproducing the power-of-two
/// overestimate that forces spurious recomputations.
inline bool stored_meets(const Node& n, std::int64_t q, const StrategyConfig& cfg) {
  const ErrorBound& e = *n.stored_error;
  if (e.is_exact()) return true;
  if (e.kind() == ErrorRepKind::direct && !cfg.exact_ceil_log2)
    return phi_hat(e.direct_radius(), /*exact=*/false) <= q;
  return e.leq_accuracy(q);
}

/// After any (re)computation: collapse subgraphs whose value became exactly
/// zero, and on a zero-suspicious approximation compute a separation bound
/// and try to declare the true value zero. Exact nonzero leaf-only
/// subgraphs collapse during initialization only; collapsing them during
/// accuracy-driven refinement would invalidate every separation-bound cache
/// in the process on each fold.
inline void zero_suspicion_hook(const ExprHandle& n, EvalContext& ctx, bool init_phase) {
  if (n->is_leaf()) return;
  const StrategyConfig& cfg = ctx.config;
  if (n->error_is_exact()) {
    if (n->approx.is_zero()) {
      collapse_to_bigfloat(n, ctx.counters);
      return;
    }
    if (init_phase) {  // exact leaf-only subgraphs fold during initialization
      bool leaf_only = true;
      for (const auto& c : n->children) leaf_only = leaf_only && c->is_leaf();
      if (leaf_only) collapse_to_bigfloat(n, ctx.counters);
    }
    return;
  }
  // Initialization is the cheap fixed-precision pass; skip declaration
  // checks there for nodes whose filter already decides the sign. The
  // accuracy-driven phase checks unconditionally, coarse bounds included.
  if (init_phase && filter_sign(n) != FilterSign::unknown) return;
  if (!covers_zero(n->approx, *n->stored_error)) return;
  std::int64_t sep = compute_sep(n, cfg.sep_cache, ctx.counters);
  if (n->stored_error->leq_accuracy(sat_log(sep - 1))) {
    n->approx = BigFloat();
    n->stored_error = ErrorBound::exact(cfg.store_rep);
    collapse_to_bigfloat(n, ctx.counters);
  }
}

/// Refine a node known to be nonzero until its error is at most a quarter
/// of its approximation's magnitude. Returns ly with |true value| >= 2^ly
/// and |approx| >= 2^ly.
inline std::int64_t ensure_separated(const ExprHandle& n, EvalContext& ctx) {
  for (int guard = 0; guard < 256; ++guard) {
    auto el = err_upper_log(*n, ctx.config);
    if (n->approx.is_zero()) {
      if (!el) throw std::logic_error("ensure_separated: exact zero node");
      // Approximation stuck at zero: deepen geometrically until the true
      // (nonzero) value emerges from the error interval.
      request_accuracy(n, std::min(sat_log(*el * 2), sat_log(*el - 32)), ctx);
      continue;
    }
    std::int64_t f = n->approx.floor_log2();
    if (!el || *el <= f - 2) return f - 1;
    request_accuracy(n, f - 2, ctx);
    if (n->error_is_exact() && n->approx.is_zero())
      throw std::logic_error("ensure_separated: node declared zero");
  }
  throw std::logic_error("ensure_separated: no convergence");
}

/// Establish the sign of a divisor or root operand, recursing into full
/// sign determination when the error interval covers zero.
inline int established_sign(const ExprHandle& n, EvalContext& ctx) {
  if (covers_zero(n->approx, *n->stored_error)) return sign_of(n, ctx);
  return n->approx.sgn();
}

inline void bump_op(EvalContext& ctx, std::int64_t p) {
  ++ctx.counters.bigfloat_ops;
  ctx.counters.max_precision_bits = std::max(ctx.counters.max_precision_bits, p);
}

inline void set_exact_zero(const ExprHandle& n, EvalContext& ctx) {
  n->approx = BigFloat();
  n->stored_error = ErrorBound::exact(ctx.config.store_rep);
}

// ---------------------------------------------------------------------------
// Bottom-up initialization of a single node (children already initialized).

inline void init_node(const ExprHandle& n, EvalContext& ctx) {
  const StrategyConfig& cfg = ctx.config;
  const ErrorRepKind rep = cfg.init_rep;
  const Precision p(cfg.init_precision_bits);
  const RoundingMode rnd = RoundingMode::to_nearest;

  auto op_err = [&](const ArithResult& r) { return ErrorBound::from_op_error(rep, r.err_exp); };
  auto child_err = [&](const ExprHandle& c) -> const ErrorBound& { return *c->stored_error; };

  switch (n->op) {
    case OpKind::leaf:
      break;
    case OpKind::neg: {
      const ExprHandle& x = n->children[0];
      n->approx = x->approx.negated();
      n->stored_error = child_err(x);
      bump_op(ctx, cfg.init_precision_bits);
      break;
    }
    case OpKind::add:
    case OpKind::sub: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      ArithResult r = n->op == OpKind::add ? add(x->approx, y->approx, p, rnd)
                                           : sub(x->approx, y->approx, p, rnd);
      n->stored_error = combine3(child_err(x), child_err(y), op_err(r));
      n->approx = std::move(r.value);
      bump_op(ctx, cfg.init_precision_bits);
      break;
    }
    case OpKind::mul: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      auto mx = mag_upper_log(*x, cfg);
      auto my = mag_upper_log(*y, cfg);
      if (!mx || !my) {  // an exactly-zero factor
        set_exact_zero(n, ctx);
        break;
      }
      ArithResult r = mul(x->approx, y->approx, p, rnd);
      ErrorBound tx = child_err(x).is_exact() ? child_err(x) : scale_pow2(child_err(x), *my);
      ErrorBound ty = y->stored_error->is_exact() || x->approx.is_zero()
                          ? ErrorBound::exact(rep)
                          : scale_pow2(child_err(y), mag_ceil(x->approx, cfg));
      n->stored_error = combine3(tx, ty, op_err(r));
      n->approx = std::move(r.value);
      bump_op(ctx, cfg.init_precision_bits);
      break;
    }
    case OpKind::div: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      if (covers_zero(y->approx, child_err(y)) && sign_of(y, ctx) == 0)
        throw divide_by_zero_error(y);
      std::int64_t ly = ensure_separated(y, ctx);
      auto mx = mag_upper_log(*x, cfg);
      if (!mx) {  // exact zero numerator
        set_exact_zero(n, ctx);
        break;
      }
      ArithResult r = div(x->approx, y->approx, p, rnd);
      ErrorBound tx = child_err(x).is_exact() ? child_err(x) : scale_pow2(child_err(x), -ly);
      ErrorBound ty =
          y->stored_error->is_exact() || x->approx.is_zero()
              ? ErrorBound::exact(rep)
              : scale_pow2(child_err(y),
                           sat_log(mag_ceil(x->approx, cfg) - ly - y->approx.floor_log2()));
      n->stored_error = combine3(tx, ty, op_err(r));
      n->approx = std::move(r.value);
      bump_op(ctx, cfg.init_precision_bits);
      break;
    }
    case OpKind::sqrt:
    case OpKind::root: {
      const ExprHandle& x = n->children[0];
      const std::int64_t k = n->op == OpKind::sqrt ? 2 : n->root_k;
      int sx;
      if (covers_zero(x->approx, child_err(x))) {
        sx = sign_of(x, ctx);
        if (sx == 0) {  // exact zero operand: the root is exactly zero
          set_exact_zero(n, ctx);
          break;
        }
      } else {
        sx = x->approx.sgn();
      }
      if (sx < 0 && k % 2 == 0) throw root_domain_error(x);
      std::int64_t lx = ensure_separated(x, ctx);
      ArithResult r = n->op == OpKind::sqrt ? sqrt(x->approx, p, rnd)
                                            : nth_root(x->approx, k, p, rnd);
      // derivative bound: (1/k) t^(1/k-1) <= 2^(ceil(lx(1-k)/k) - floor(log2 k))
      std::int64_t dlog = sat_log(ceil_div(sat_mul(lx, 1 - k), k) - ilog2(k));
      ErrorBound tx =
          child_err(x).is_exact() ? child_err(x) : scale_pow2(child_err(x), dlog);
      n->stored_error = combine(tx, op_err(r));
      n->approx = std::move(r.value);
      bump_op(ctx, cfg.init_precision_bits);
      break;
    }
  }
  n->init_done = true;
  zero_suspicion_hook(n, ctx, /*init_phase=*/true);
}

}  // namespace eval_detail

/// Compute an initial approximation and error bound for every reachable
/// node, each distinct node once, at the configured fixed precision. Sign
/// determination is invoked recursively for divisors and root operands
/// whose error interval covers zero.
inline void init_bottom_up(const ExprHandle& n, EvalContext& ctx) {
  if (n->init_done) return;
  struct Frame {
    ExprHandle node;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  stack.push_back({n, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < f.node->children.size()) {
      const ExprHandle& c = f.node->children[f.next_child++];
      if (!c->init_done) stack.push_back({c, 0});
      continue;
    }
    ExprHandle node = f.node;
    stack.pop_back();
    if (!node->init_done) eval_detail::init_node(node, ctx);
  }
}

/// Ensure the stored error of n satisfies 2^q. Performs the recomputation
/// check first; on failure chooses child accuracies and the operation
/// precision by the three-term budget, recurses, recomputes the
/// approximation, and stores the propagated log-int bound in the configured
/// representation.
inline void request_accuracy(const ExprHandle& n, std::int64_t q, EvalContext& ctx) {
  using namespace eval_detail;
  const StrategyConfig& cfg = ctx.config;
  if (!n->init_done) init_bottom_up(n, ctx);
  if (stored_meets(*n, q, cfg)) return;
  q = sat_log(q);

  std::optional<std::int64_t> e_prop;
  std::int64_t used_precision = 0;

  switch (n->op) {
    case OpKind::leaf:
      return;  // leaves are exact; stored_meets always passes
    case OpKind::neg: {
      const ExprHandle& x = n->children[0];
      request_accuracy(x, q, ctx);
      n->approx = x->approx.negated();
      e_prop = x->error_is_exact() ? std::nullopt : std::optional<std::int64_t>(q);
      used_precision = 2;  // exact sign flip
      break;
    }
    case OpKind::add:
    case OpKind::sub: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      request_accuracy(x, q - 2, ctx);
      request_accuracy(y, q - 2, ctx);
      auto mx = mag_upper_log(*x, cfg);
      auto my = mag_upper_log(*y, cfg);
      if (!mx && !my) {
        set_exact_zero(n, ctx);
        break;
      }
      std::int64_t mz = sat_log((mx && my ? std::max(*mx, *my) : (mx ? *mx : *my)) + 1);
      Precision p = precision_for(mz, q);
      ArithResult r = n->op == OpKind::add ? add(x->approx, y->approx, p, RoundingMode::to_nearest)
                                           : sub(x->approx, y->approx, p, RoundingMode::to_nearest);
      if (!(x->error_is_exact() && y->error_is_exact() && r.exact())) e_prop = q;
      n->approx = std::move(r.value);
      used_precision = p.bits();
      break;
    }
    case OpKind::mul: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      auto mx = mag_upper_refined(x, ctx);
      auto my = mag_upper_refined(y, ctx);
      if (!mx || !my) {
        set_exact_zero(n, ctx);
        break;
      }
      request_accuracy(x, sat_log(q - 2 - *my), ctx);
      request_accuracy(y, sat_log(q - 2 - *mx), ctx);
      Precision p = precision_for(sat_log(*mx + *my), q);
      ArithResult r = mul(x->approx, y->approx, p, RoundingMode::to_nearest);
      if (!(x->error_is_exact() && y->error_is_exact() && r.exact())) e_prop = q;
      n->approx = std::move(r.value);
      used_precision = p.bits();
      break;
    }
    case OpKind::div: {
      const ExprHandle& x = n->children[0];
      const ExprHandle& y = n->children[1];
      if (established_sign(y, ctx) == 0) throw divide_by_zero_error(y);
      std::int64_t ly = ensure_separated(y, ctx);
      auto mx = mag_upper_refined(x, ctx);
      if (!mx) {
        set_exact_zero(n, ctx);
        break;
      }
      request_accuracy(x, sat_log(q - 2 + ly), ctx);
      request_accuracy(y, sat_log(q - 2 - *mx + 2 * ly), ctx);
      Precision p = precision_for(sat_log(*mx - ly), q);
      ArithResult r = div(x->approx, y->approx, p, RoundingMode::to_nearest);
      if (!(x->error_is_exact() && y->error_is_exact() && r.exact())) e_prop = q;
      n->approx = std::move(r.value);
      used_precision = p.bits();
      break;
    }
    case OpKind::sqrt:
    case OpKind::root: {
      const ExprHandle& x = n->children[0];
      const std::int64_t k = n->op == OpKind::sqrt ? 2 : n->root_k;
      int sx = established_sign(x, ctx);
      if (sx == 0) {
        set_exact_zero(n, ctx);
        break;
      }
      if (sx < 0 && k % 2 == 0) throw root_domain_error(x);
      std::int64_t lx = ensure_separated(x, ctx);
      std::int64_t qx = n->op == OpKind::sqrt
                            ? sat_log(q - 1 + floor_div(lx, 2))
                            : sat_log(q - 2 + ilog2(k) - ceil_div(sat_mul(lx, 1 - k), k));
      request_accuracy(x, qx, ctx);
      auto mx = mag_upper_log(*x, cfg);
      Precision p = precision_for(ceil_div(*mx, k), q);
      ArithResult r = n->op == OpKind::sqrt ? sqrt(x->approx, p, RoundingMode::to_nearest)
                                            : nth_root(x->approx, k, p, RoundingMode::to_nearest);
      if (!(x->error_is_exact() && r.exact())) e_prop = q;
      n->approx = std::move(r.value);
      used_precision = p.bits();
      break;
    }
  }

  if (!n->stored_error || !n->stored_error->is_exact())
    n->stored_error = make_stored(cfg.store_rep, e_prop);
  ++ctx.counters.node_recomputations;
  if (used_precision > 0) bump_op(ctx, used_precision);
  zero_suspicion_hook(n, ctx, /*init_phase=*/false);
}

/// The mathematically correct sign of val(n): floating-point filter first,
/// then bottom-up initialization, then the accuracy loop with exponentially
/// growing |q| until the sign separates from zero or the separation bound
/// proves the value zero.
inline int sign_of(const ExprHandle& n, EvalContext& ctx) {
  switch (filter_sign(n)) {
    case FilterSign::positive: return +1;
    case FilterSign::negative: return -1;
    case FilterSign::unknown: break;
  }
  if (!n->init_done) init_bottom_up(n, ctx);
  if (n->error_is_exact() && !n->approx.is_zero()) return n->approx.sgn();

  std::int64_t q = ctx.config.q0 < 0 ? ctx.config.q0 : -26;
  const std::int64_t growth = ctx.config.growth >= 2 ? ctx.config.growth : 2;
  // Strictly below any saturated separation bound, so the loop always ends.
  constexpr std::int64_t q_floor = -kLogIntSaturate - 64;
  for (;;) {
    request_accuracy(n, q, ctx);
    if (n->error_is_exact() && !n->approx.is_zero()) return n->approx.sgn();
    if (!covers_zero(n->approx, *n->stored_error)) return n->approx.sgn();
    std::int64_t sep = compute_sep(n, ctx.config.sep_cache, ctx.counters);
    if (q < sep || n->error_is_exact()) {  // accuracy exceeded q_max: zero
      n->approx = BigFloat();
      n->stored_error = ErrorBound::exact(ctx.config.store_rep);
      if (!n->is_leaf()) collapse_to_bigfloat(n, ctx.counters);
      return 0;
    }
    q = q < std::numeric_limits<std::int64_t>::min() / growth ? q_floor
                                                              : std::max(q_floor, q * growth);
  }
}

/// Approximation within 2^q of the true value, together with the stored
/// error bound that certifies it.
inline std::pair<BigFloat, ErrorBound> to_approx(const ExprHandle& n, std::int64_t q,
                                                 EvalContext& ctx) {
  if (!n->init_done) init_bottom_up(n, ctx);
  request_accuracy(n, q, ctx);
  return {n->approx, *n->stored_error};
}

}  // namespace adreal
