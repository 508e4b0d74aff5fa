// SPDX-License-Identifier: Apache-2.0
//
// Constructive separation bounds over the expression DAG, BFMSS-style and
// carried in log scale: for nonzero val(E), |val(E)| > 2^sep_log. The
// algebraic degree is the product of root indices over *distinct* radical
// nodes, so shared subexpressions are counted once. Results are cached per
// node against the global timestamp.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "adreal/error_bound.hpp"
#include "adreal/expr_dag.hpp"

namespace adreal {

/// Log-scale BFMSS parameters plus a degree bound. u_log/l_log are upper
/// bounds on log2 of the classic u(E), l(E) parameters, rounded up at every
/// step. degree here composes tree-style (children multiply); the DAG-aware
/// distinct-node product lives in compute_sep.
struct SepData {
  double u_log = 0.0;
  double l_log = 0.0;
  std::uint64_t degree = 1;
};

namespace sep_detail {

inline double up1(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline std::uint64_t sat_mul_u64(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

/// log2 of the sum 2^a + 2^b, rounded up (the log-float combine rule).
inline double lf_sum_log(double a, double b) {
  if (a == b) return up_add(a, 1.0);
  double m = std::max(a, b);
  double d = std::nextafter(std::abs(a - b), 0.0);
  return up_add(m, detail::log2_1p_pow2_up(d));
}

}  // namespace sep_detail

/// Parameters for a leaf holding the dyadic value v = M * 2^e, M odd:
/// numerator/denominator split along the sign of e.
inline SepData bfmss_leaf(const BigFloat& v) {
  if (v.is_zero()) return SepData{0.0, 0.0, 1};
  std::int64_t e = v.lsb_exponent();
  std::int64_t sig = v.significant_bits();
  // ceil(log2 M) for the odd integer mantissa M with sig significant bits.
  double m_log = static_cast<double>(sig == 1 ? 0 : sig);
  if (e >= 0) return SepData{m_log + static_cast<double>(e), 0.0, 1};
  return SepData{m_log, static_cast<double>(-e), 1};
}

/// One step of the recurrence. Children are the SepData of the operand(s).
inline SepData bfmss_step(OpKind op, std::int64_t root_k, std::span<const SepData> ch) {
  using namespace sep_detail;
  switch (op) {
    case OpKind::leaf:
      throw std::logic_error("bfmss_step: leaves use bfmss_leaf");
    case OpKind::neg:
      return ch[0];
    case OpKind::add:
    case OpKind::sub: {
      double u = lf_sum_log(up_add(ch[0].u_log, ch[1].l_log), up_add(ch[1].u_log, ch[0].l_log));
      return SepData{u, up_add(ch[0].l_log, ch[1].l_log), sat_mul_u64(ch[0].degree, ch[1].degree)};
    }
    case OpKind::mul:
      return SepData{up_add(ch[0].u_log, ch[1].u_log), up_add(ch[0].l_log, ch[1].l_log),
                     sat_mul_u64(ch[0].degree, ch[1].degree)};
    case OpKind::div:
      return SepData{up_add(ch[0].u_log, ch[1].l_log), up_add(ch[0].l_log, ch[1].u_log),
                     sat_mul_u64(ch[0].degree, ch[1].degree)};
    case OpKind::sqrt:
    case OpKind::root: {
      std::int64_t k = op == OpKind::sqrt ? 2 : root_k;
      double kd = static_cast<double>(k);
      double u = ch[0].u_log, l = ch[0].l_log;
      SepData out;
      if (u >= l) {
        out.u_log = up1(up_add(u, up1((kd - 1) * l)) / kd);
        out.l_log = l;
      } else {
        out.u_log = u;
        out.l_log = up1(up_add(l, up1((kd - 1) * u)) / kd);
      }
      out.degree = sat_mul_u64(ch[0].degree, static_cast<std::uint64_t>(k));
      return out;
    }
  }
  throw std::logic_error("bfmss_step: bad op");
}

struct SepInfo {
  std::int64_t sep_log = 0;
  std::uint64_t degree = 1;  // distinct-node product over the DAG
  double u_log = 0.0;
  double l_log = 0.0;
  std::uint64_t nodes_visited = 0;
};

namespace sep_detail {

inline std::int64_t sep_log_from(double u_log, double l_log, std::uint64_t degree) {
  long double d = static_cast<long double>(degree);
  long double t = static_cast<long double>(l_log) + (d - 1.0L) * static_cast<long double>(u_log);
  long double c = std::ceil(t);
  constexpr long double lim = 1e18L;
  if (c > lim) c = lim;
  if (c < -lim) c = -lim;
  return sat_log(-static_cast<std::int64_t>(c) - 1);
}

}  // namespace sep_detail

/// Single traversal of the DAG below n: each distinct node is visited once,
/// root indices enter the degree product once per distinct radical node.
/// Does not read or write the per-node cache.
inline SepInfo compute_sep_info(const ExprHandle& n) {
  const std::uint64_t token = next_visit_token();
  std::uint64_t degree = 1;
  std::uint64_t visited = 0;

  struct Frame {
    Node* node;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  n->visit_mark = token;
  stack.push_back({n.get(), 0});

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < f.node->children.size()) {
      Node* c = f.node->children[f.next_child++].get();
      if (c->visit_mark != token) {
        c->visit_mark = token;
        stack.push_back({c, 0});
      }
      continue;
    }
    Node* nd = f.node;
    ++visited;
    if (nd->is_leaf()) {
      SepData d = bfmss_leaf(nd->approx);
      nd->sep_u = d.u_log;
      nd->sep_l = d.l_log;
    } else {
      SepData cd[2];
      for (std::size_t i = 0; i < nd->children.size(); ++i) {
        const Node* c = nd->children[i].get();
        cd[i] = SepData{c->sep_u, c->sep_l, 1};
      }
      if (nd->op == OpKind::sqrt || nd->op == OpKind::root) {
        std::int64_t k = nd->op == OpKind::sqrt ? 2 : nd->root_k;
        degree = sep_detail::sat_mul_u64(degree, static_cast<std::uint64_t>(k));
      }
      SepData d = bfmss_step(nd->op, nd->root_k,
                             std::span<const SepData>(cd, nd->children.size()));
      nd->sep_u = d.u_log;
      nd->sep_l = d.l_log;
    }
    stack.pop_back();
  }

  SepInfo info;
  info.degree = degree;
  info.u_log = n->sep_u;
  info.l_log = n->sep_l;
  info.nodes_visited = visited;
  info.sep_log = sep_detail::sep_log_from(info.u_log, info.l_log, degree);
  return info;
}

/// Cache-aware entry point. With use_cache set and a current stamp this is
/// a lookup; otherwise a full traversal that records instrumentation and
/// (when caching) stores the result under the current stamp.
inline std::int64_t compute_sep(const ExprHandle& n, bool use_cache, Counters& counters) {
  if (use_cache && n->sep_cache && n->sep_cache->stamp == current_stamp())
    return n->sep_cache->sep_log;
  ++counters.sepbound_computations;
  SepInfo info = compute_sep_info(n);
  counters.sepbound_nodes_traversed += info.nodes_visited;
  if (use_cache) n->sep_cache = SepCacheEntry{info.sep_log, current_stamp()};
  return info.sep_log;
}

}  // namespace adreal
