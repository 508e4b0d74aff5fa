// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random expression generators used by property tests and the
// acceptance suite. Root-free expressions come with their exact rational
// value; rooted expressions keep divisors and root operands positive by
// construction so only genuine zeroes need separation bounds.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "adreal/expr_dag.hpp"
#include "test_rational.hpp"

namespace testgen {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::int64_t below(std::int64_t bound) {
    return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(bound));
  }
  std::int64_t in(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }
};

struct RatExpr {
  adreal::ExprHandle node;
  oracle::Rat value;
};

/// Root-free expression over small integer and rational leaves, paired with
/// its exact value. Shares earlier subexpressions now and then, so the
/// result is a DAG rather than a tree.
class RootFreeGen {
 public:
  explicit RootFreeGen(std::uint64_t seed) : rng_(seed) {}

  RatExpr gen(int depth) {
    pool_.clear();  // sharing happens within one expression only
    return gen_inner(depth);
  }

 private:
  void offer_to_pool(const RatExpr& e) {
    // keep pooled values small so reuse cannot blow up the exact arithmetic
    if (e.value.num().mag.digits() + e.value.den().digits() <= 64) pool_.push_back(e);
  }

  RatExpr leaf() {
    if (rng_.below(2) == 0) {
      std::int64_t v = rng_.in(-9, 9);
      return {adreal::make_leaf(adreal::BigFloat(v)), oracle::Rat(v)};
    }
    std::int64_t p = rng_.in(-9, 9);
    std::int64_t q = rng_.in(1, 8);
    auto node = adreal::make_node(adreal::OpKind::div, adreal::make_leaf(adreal::BigFloat(p)),
                                  adreal::make_leaf(adreal::BigFloat(q)));
    return {node, oracle::Rat::fraction(p, q)};
  }

  RatExpr gen_inner(int depth) {
    if (depth <= 0) return leaf();
    if (!pool_.empty() && rng_.below(100) < 15)  // reuse: creates sharing
      return pool_[static_cast<std::size_t>(rng_.below(static_cast<std::int64_t>(pool_.size())))];
    RatExpr out;
    switch (rng_.below(5)) {
      case 0: {
        RatExpr a = gen_inner(depth - 1), b = gen_inner(depth - 1);
        out = {adreal::make_node(adreal::OpKind::add, a.node, b.node), a.value + b.value};
        break;
      }
      case 1: {
        RatExpr a = gen_inner(depth - 1), b = gen_inner(depth - 1);
        out = {adreal::make_node(adreal::OpKind::sub, a.node, b.node), a.value - b.value};
        break;
      }
      case 2: {
        RatExpr a = gen_inner(depth - 1), b = gen_inner(depth - 1);
        out = {adreal::make_node(adreal::OpKind::mul, a.node, b.node), a.value * b.value};
        break;
      }
      case 3: {
        RatExpr a = gen_inner(depth - 1);
        out = a;  // fallback when no nonzero divisor shows up
        for (int tries = 0; tries < 16; ++tries) {
          RatExpr b = gen_inner(depth > 2 ? 2 : depth - 1);
          if (b.value.is_zero()) continue;
          out = {adreal::make_node(adreal::OpKind::div, a.node, b.node), a.value / b.value};
          break;
        }
        break;
      }
      default: {
        RatExpr a = gen_inner(depth - 1);
        out = {adreal::make_node(adreal::OpKind::neg, a.node), -a.value};
        break;
      }
    }
    offer_to_pool(out);
    return out;
  }

  Rng rng_;
  std::vector<RatExpr> pool_;
};

/// Expressions with radicals. Divisors and root operands are drawn from a
/// positive-closed grammar; the expression as a whole may still be zero
/// (e.g. differences of equal subtrees), which is exactly what the
/// separation-bound machinery is for. max_roots caps the algebraic degree.
class RootedGen {
 public:
  explicit RootedGen(std::uint64_t seed) : rng_(seed) {}

  adreal::ExprHandle gen(int depth, int max_roots = 3) {
    roots_left_ = max_roots;
    return gen_general(depth);
  }

  adreal::ExprHandle gen_positive_expr(int depth, int max_roots = 3) {
    roots_left_ = max_roots;
    return gen_positive(depth);
  }

 private:
  adreal::ExprHandle pos_leaf() {
    if (rng_.below(2) == 0) return adreal::make_leaf(adreal::BigFloat(rng_.in(1, 12)));
    return adreal::make_node(adreal::OpKind::div,
                             adreal::make_leaf(adreal::BigFloat(rng_.in(1, 12))),
                             adreal::make_leaf(adreal::BigFloat(rng_.in(1, 8))));
  }

  adreal::ExprHandle gen_positive(int depth) {
    using adreal::OpKind;
    if (depth <= 0) return pos_leaf();
    switch (rng_.below(6)) {
      case 0:
        return adreal::make_node(OpKind::add, gen_positive(depth - 1), gen_positive(depth - 1));
      case 1:
        return adreal::make_node(OpKind::mul, gen_positive(depth - 1), gen_positive(depth - 1));
      case 2:
        return adreal::make_node(OpKind::div, gen_positive(depth - 1), gen_positive(depth - 1));
      case 3:
      case 4:
        if (roots_left_ > 0) {
          --roots_left_;
          return adreal::make_node(OpKind::sqrt, gen_positive(depth - 1));
        }
        return gen_positive(depth - 1);
      default:
        if (roots_left_ > 0) {
          --roots_left_;
          return adreal::make_root(gen_positive(depth - 1), rng_.in(2, 4));
        }
        return pos_leaf();
    }
  }

  adreal::ExprHandle gen_general(int depth) {
    using adreal::OpKind;
    if (depth <= 0) return gen_positive(1);
    switch (rng_.below(5)) {
      case 0:
        return adreal::make_node(OpKind::add, gen_general(depth - 1), gen_general(depth - 1));
      case 1:
        return adreal::make_node(OpKind::sub, gen_general(depth - 1), gen_general(depth - 1));
      case 2:
        return adreal::make_node(OpKind::mul, gen_general(depth - 1), gen_general(depth - 1));
      case 3:
        return adreal::make_node(OpKind::div, gen_general(depth - 1), gen_positive(depth - 1));
      default:
        return gen_positive(depth - 1);
    }
  }

  Rng rng_;
  int roots_left_ = 0;
};

}  // namespace testgen
