// SPDX-License-Identifier: Apache-2.0
//
// The arithmetic expression DAG: shared reference-counted nodes holding an
// operator, an approximation with its stored error bound, an eagerly
// maintained floating-point filter interval, and the separation-bound cache
// keyed by a process-global timestamp.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "adreal/bigfloat.hpp"
#include "adreal/error_bound.hpp"

namespace adreal {

enum class OpKind : std::uint8_t { leaf, neg, add, sub, mul, div, sqrt, root };

inline int arity_of(OpKind op) {
  switch (op) {
    case OpKind::leaf: return 0;
    case OpKind::neg:
    case OpKind::sqrt:
    case OpKind::root: return 1;
    default: return 2;
  }
}

// ---------------------------------------------------------------------------
// Outward-rounded machine-precision interval, used as the evaluation filter.
// Endpoints may be infinite; any NaN widens to the whole line.

namespace filter_detail {

// An endpoint that overflowed past its own side widens all the way out, so
// overflow always yields an unknown sign rather than a decided one.
inline double down1(double x) {
  if (x == std::numeric_limits<double>::infinity()) return -x;
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double up1(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return -x;
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double down_n(double x, int n) {
  for (int i = 0; i < n; ++i) x = down1(x);
  return x;
}
inline double up_n(double x, int n) {
  for (int i = 0; i < n; ++i) x = up1(x);
  return x;
}

}  // namespace filter_detail

enum class FilterSign { negative, positive, unknown };

struct FilterInterval {
  double lo = 0.0;
  double hi = 0.0;

  static FilterInterval whole() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  static FilterInterval from_value(const BigFloat& v) {
    return {v.to_double_dir(RoundingMode::toward_negative),
            v.to_double_dir(RoundingMode::toward_positive)};
  }

  bool valid() const { return lo <= hi; }  // false on NaN
  FilterInterval checked() const { return valid() ? *this : whole(); }

  FilterSign sign() const {
    if (lo > 0.0) return FilterSign::positive;
    if (hi < 0.0) return FilterSign::negative;
    return FilterSign::unknown;
  }
};

namespace filter_detail {

inline FilterInterval fi_neg(FilterInterval a) { return FilterInterval{-a.hi, -a.lo}; }

// 2Sum / FMA residuals detect exact double results, so integer-valued
// subexpressions keep point intervals instead of drifting one ulp per op.
inline double lo_sum(double x, double y) {
  double s = x + y;
  if (!std::isfinite(s)) return down1(s);
  double yp = s - x;
  double xp = s - yp;
  double err = (x - xp) + (y - yp);
  return err >= 0.0 ? s : down1(s);
}
inline double hi_sum(double x, double y) {
  double s = x + y;
  if (!std::isfinite(s)) return up1(s);
  double yp = s - x;
  double xp = s - yp;
  double err = (x - xp) + (y - yp);
  return err <= 0.0 ? s : up1(s);
}
inline double lo_prod(double x, double y) {
  double p = x * y;
  if (!std::isfinite(p)) return down1(p);
  double err = std::fma(x, y, -p);
  return err >= 0.0 ? p : down1(p);
}
inline double hi_prod(double x, double y) {
  double p = x * y;
  if (!std::isfinite(p)) return up1(p);
  double err = std::fma(x, y, -p);
  return err <= 0.0 ? p : up1(p);
}

inline FilterInterval fi_add(FilterInterval a, FilterInterval b) {
  return FilterInterval{lo_sum(a.lo, b.lo), hi_sum(a.hi, b.hi)}.checked();
}
inline FilterInterval fi_sub(FilterInterval a, FilterInterval b) {
  return FilterInterval{lo_sum(a.lo, -b.hi), hi_sum(a.hi, -b.lo)}.checked();
}
inline FilterInterval fi_mul(FilterInterval a, FilterInterval b) {
  double xs[2] = {a.lo, a.hi};
  double ys[2] = {b.lo, b.hi};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs)
    for (double y : ys) {
      if (std::isnan(x * y)) return FilterInterval::whole();
      lo = std::min(lo, lo_prod(x, y));
      hi = std::max(hi, hi_prod(x, y));
    }
  return FilterInterval{lo, hi}.checked();
}
inline FilterInterval fi_div(FilterInterval a, FilterInterval b) {
  if (b.lo <= 0.0 && 0.0 <= b.hi) return FilterInterval::whole();
  double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  double lo = c[0], hi = c[0];
  for (double x : c) {
    if (std::isnan(x)) return FilterInterval::whole();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return FilterInterval{down1(lo), up1(hi)}.checked();
}
inline FilterInterval fi_sqrt(FilterInterval a) {
  if (a.hi < 0.0) return FilterInterval::whole();  // domain error surfaces later
  double lo = a.lo <= 0.0 ? 0.0 : down1(std::sqrt(a.lo));
  return FilterInterval{lo, up1(std::sqrt(a.hi))}.checked();
}
// std::pow is not correctly rounded; widen generously.
inline double root_point(double x, std::int64_t k) {
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  double r = std::pow(std::fabs(x), 1.0 / static_cast<double>(k));
  return x < 0 ? -r : r;
}
inline FilterInterval fi_root(FilterInterval a, std::int64_t k) {
  if (k % 2 == 0) {
    if (a.hi < 0.0) return FilterInterval::whole();
    double lo = a.lo <= 0.0 ? 0.0 : down_n(root_point(a.lo, k), 8);
    return FilterInterval{lo, up_n(root_point(a.hi, k), 8)}.checked();
  }
  return FilterInterval{down_n(root_point(a.lo, k), 8), up_n(root_point(a.hi, k), 8)}.checked();
}

}  // namespace filter_detail

// ---------------------------------------------------------------------------
// Global timestamp for separation-bound cache invalidation. Shared across
// every DAG in the process; a collapse anywhere invalidates all caches.

inline std::atomic<std::uint64_t>& stamp_counter() {
  static std::atomic<std::uint64_t> c{1};
  return c;
}
inline std::uint64_t current_stamp() { return stamp_counter().load(std::memory_order_relaxed); }
inline void advance_stamp() { stamp_counter().fetch_add(1, std::memory_order_relaxed); }

// Traversal tokens for single-visit DAG walks (separation bounds).
inline std::atomic<std::uint64_t>& visit_counter() {
  static std::atomic<std::uint64_t> c{1};
  return c;
}
inline std::uint64_t next_visit_token() {
  return visit_counter().fetch_add(1, std::memory_order_relaxed) + 1;
}

// ---------------------------------------------------------------------------

/// Instrumentation for one benchmark/evaluation context.
struct Counters {
  std::uint64_t node_recomputations = 0;
  std::uint64_t sepbound_computations = 0;
  std::uint64_t sepbound_nodes_traversed = 0;
  std::uint64_t bigfloat_ops = 0;
  std::uint64_t collapses = 0;
  std::int64_t max_precision_bits = 0;

  void reset() { *this = Counters{}; }
};

struct Node;
using ExprHandle = std::shared_ptr<Node>;

struct SepCacheEntry {
  std::int64_t sep_log;
  std::uint64_t stamp;
};

struct Node {
  OpKind op = OpKind::leaf;
  std::int64_t root_k = 0;  // for OpKind::root only, >= 2
  std::vector<ExprHandle> children;

  BigFloat approx;                         // leaf: the exact value
  std::optional<ErrorBound> stored_error;  // absent until initialized
  FilterInterval filter{0.0, 0.0};
  std::optional<SepCacheEntry> sep_cache;
  bool init_done = false;

  // Scratch for the separation-bound traversal; meaningful only while
  // visit_mark equals the active traversal token.
  std::uint64_t visit_mark = 0;
  double sep_u = 0.0;
  double sep_l = 0.0;

  bool is_leaf() const { return op == OpKind::leaf; }
  bool error_is_exact() const { return stored_error && stored_error->is_exact(); }
};

inline ExprHandle make_leaf(const BigFloat& v) {
  auto n = std::make_shared<Node>();
  n->op = OpKind::leaf;
  n->approx = v;
  n->stored_error = ErrorBound::exact(ErrorRepKind::log_int);
  n->filter = FilterInterval::from_value(v);
  n->init_done = true;
  return n;
}

inline FilterInterval compute_filter(OpKind op, std::int64_t root_k,
                                     const std::vector<ExprHandle>& ch) {
  using namespace filter_detail;
  switch (op) {
    case OpKind::neg: return fi_neg(ch[0]->filter);
    case OpKind::add: return fi_add(ch[0]->filter, ch[1]->filter);
    case OpKind::sub: return fi_sub(ch[0]->filter, ch[1]->filter);
    case OpKind::mul: return fi_mul(ch[0]->filter, ch[1]->filter);
    case OpKind::div: return fi_div(ch[0]->filter, ch[1]->filter);
    case OpKind::sqrt: return fi_sqrt(ch[0]->filter);
    case OpKind::root: return fi_root(ch[0]->filter, root_k);
    case OpKind::leaf: break;
  }
  throw std::logic_error("compute_filter: leaf has no children");
}

inline ExprHandle make_node(OpKind op, std::vector<ExprHandle> children, std::int64_t root_k = 0) {
  if (op == OpKind::leaf) throw std::invalid_argument("make_node: use make_leaf");
  if (static_cast<int>(children.size()) != arity_of(op))
    throw std::invalid_argument("make_node: arity mismatch");
  for (const auto& c : children)
    if (!c) throw std::invalid_argument("make_node: null child");
  if (op == OpKind::root && root_k < 2)
    throw std::invalid_argument("make_node: root index must be >= 2");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->root_k = op == OpKind::root ? root_k : 0;
  n->children = std::move(children);
  n->filter = compute_filter(op, n->root_k, n->children);
  return n;
}

inline ExprHandle make_node(OpKind op, const ExprHandle& a) {
  return make_node(op, std::vector<ExprHandle>{a});
}
inline ExprHandle make_node(OpKind op, const ExprHandle& a, const ExprHandle& b) {
  return make_node(op, std::vector<ExprHandle>{a, b});
}
inline ExprHandle make_root(const ExprHandle& a, std::int64_t k) {
  return make_node(OpKind::root, std::vector<ExprHandle>{a}, k);
}

inline FilterSign filter_sign(const ExprHandle& n) { return n->filter.sign(); }

/// Replace a node whose value is known exactly by a single bigfloat leaf.
/// Child handles are released and the global timestamp advances, so every
/// cached separation bound in the process becomes stale.
inline void collapse_to_bigfloat(const ExprHandle& n, Counters& counters) {
  if (!n->error_is_exact())
    throw std::logic_error("collapse_to_bigfloat: error bound is not EXACT");
  n->op = OpKind::leaf;
  n->root_k = 0;
  n->children.clear();
  n->filter = FilterInterval::from_value(n->approx);
  n->sep_cache.reset();
  n->init_done = true;
  advance_stamp();
  ++counters.collapses;
}

}  // namespace adreal
