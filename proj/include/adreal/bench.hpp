// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness: the Fibonacci identity, the repeated-squaring
// recomputation stress, and degenerate geometric predicate workloads
// (orientation, incircle, segment intersection), each runnable under any
// strategy/cache/conversion configuration with machine-readable CSV or
// JSON records of the instrumentation counters.
#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adreal/real.hpp"

namespace adreal::bench {

/// Deterministic generator; identical seeds must yield identical workloads
/// on every platform, so no std::uniform_* distributions here.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform-ish in [0, bound); bound must be positive.
  std::int64_t below(std::int64_t bound) {
    return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(bound));
  }
  std::int64_t in(std::int64_t lo, std::int64_t hi) {  // inclusive range
    return lo + below(hi - lo + 1);
  }
};

struct BenchSpec {
  std::string bench;  // fib | square | orient | incircle | segments
  std::int64_t n = 0;
  std::int64_t q = 5000;
  std::uint64_t seed = 42;
  std::int64_t reps = 1;
};

struct RunResult {
  std::string bench;
  std::int64_t n = 0;
  std::string strategy;
  bool sep_cache = true;
  bool exact_ceil_log2 = false;
  std::int64_t reps = 1;
  double mean_time_s = 0.0;
  Counters counters;
  std::int64_t outcome = 0;
  std::int64_t expected = 0;
  bool passed() const { return outcome == expected; }
};

inline std::string strategy_name(const StrategyConfig& cfg) {
  switch (cfg.store_rep) {
    case ErrorRepKind::direct: return "def";
    case ErrorRepKind::log_int: return "lgi";
    case ErrorRepKind::log_float: return "lgd";
  }
  return "?";
}

/// The 12 configurations: {def,lgi,lgd} x {cache on,off} x {exact on,off}.
inline std::vector<StrategyConfig> matrix_configs() {
  std::vector<StrategyConfig> out;
  for (const char* name : {"def", "lgi", "lgd"})
    for (bool cache : {true, false})
      for (bool exact : {true, false}) {
        StrategyConfig cfg = strategy_config(name);
        cfg.sep_cache = cache;
        cfg.exact_ceil_log2 = exact;
        out.push_back(cfg);
      }
  return out;
}

namespace detail {

template <typename Body>
RunResult run_timed(const char* name, std::int64_t n, const StrategyConfig& cfg,
                    std::int64_t reps, Body&& body) {
  RunResult r;
  r.bench = name;
  r.n = n;
  r.strategy = strategy_name(cfg);
  r.sep_cache = cfg.sep_cache;
  r.exact_ceil_log2 = cfg.exact_ceil_log2;
  r.reps = reps;
  double total = 0.0;
  for (std::int64_t i = 0; i < reps; ++i) {
    ContextPtr ctx = make_context(cfg);
    auto t0 = std::chrono::steady_clock::now();
    auto [outcome, expected] = body(ctx);
    auto t1 = std::chrono::steady_clock::now();
    total += std::chrono::duration<double>(t1 - t0).count();
    r.counters = ctx->counters;
    r.outcome = outcome;
    r.expected = expected;
  }
  r.mean_time_s = total / static_cast<double>(reps);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fib: F_n == (phi^n - phibar^n) / sqrt(5), evaluated with the number type.

inline RunResult bench_fibonacci(std::int64_t n, const StrategyConfig& cfg,
                                 std::int64_t reps = 1) {
  if (n < 2) throw std::invalid_argument("bench_fibonacci: n must be >= 2");
  return detail::run_timed("fib", n, cfg, reps, [&](const ContextPtr& ctx) {
    auto NT = [&](std::int64_t v) { return Real(v, ctx); };
    Real sqrt5 = sqrt(NT(5));
    Real phi = (NT(1) + sqrt5) / NT(2);
    Real phibar = (NT(1) - sqrt5) / NT(2);

    Real phiN = phi;
    Real phibarN = phibar;
    Real fib0 = NT(0);
    Real fib1 = NT(1);
    Real tmp = NT(0);

    for (std::int64_t i = 1; i < n; ++i) {
      tmp = fib1;
      fib1 += fib0;
      fib0 = tmp;
      phiN *= phi;
      phibarN *= phibar;
    }

    Real res = NT(1) / sqrt5 * (phiN - phibarN);
    bool equal = fib1 == res;
    return std::pair<std::int64_t, std::int64_t>(equal ? 1 : 0, 1);
  });
}

// ---------------------------------------------------------------------------
// square: x^(2^n) by repeated squaring (x = sqrt(13)+sqrt(17)); request
// absolute accuracy 2^-q at the root and report the recomputation count.

inline RunResult bench_square(std::int64_t n, std::int64_t q, const StrategyConfig& cfg,
                              std::int64_t reps = 1) {
  if (n < 1 || n > 20) throw std::invalid_argument("bench_square: n must be in [1, 20]");
  if (q < 1) throw std::invalid_argument("bench_square: q must be >= 1");
  return detail::run_timed("square", n, cfg, reps, [&](const ContextPtr& ctx) {
    Real x = sqrt(Real(13, ctx)) + sqrt(Real(17, ctx));
    for (std::int64_t i = 0; i < n; ++i) x = x * x;
    x.to_approx(-q);
    std::int64_t rec = static_cast<std::int64_t>(ctx->counters.node_recomputations);
    return std::pair<std::int64_t, std::int64_t>(rec, rec);
  });
}

// ---------------------------------------------------------------------------
// Geometric predicates over integer grid points, half of the instances
// exactly degenerate and half one grid unit off, checked against exact
// integer arithmetic.

namespace geo {

using I128 = __int128;

struct Pt {
  std::int64_t x;
  std::int64_t y;
};

inline I128 orient_det(Pt a, Pt b, Pt c) {
  return I128(b.x - a.x) * I128(c.y - a.y) - I128(b.y - a.y) * I128(c.x - a.x);
}

inline int sign_of_i128(I128 v) { return v < 0 ? -1 : (v > 0 ? +1 : 0); }

inline I128 incircle_det(Pt a, Pt b, Pt c, Pt d) {
  I128 adx = a.x - d.x, ady = a.y - d.y;
  I128 bdx = b.x - d.x, bdy = b.y - d.y;
  I128 cdx = c.x - d.x, cdy = c.y - d.y;
  I128 al = adx * adx + ady * ady;
  I128 bl = bdx * bdx + bdy * bdy;
  I128 cl = cdx * cdx + cdy * cdy;
  return adx * (bdy * cl - cdy * bl) - ady * (bdx * cl - cdx * bl) + al * (bdx * cdy - cdx * bdy);
}

inline Real coord(std::int64_t v, const ContextPtr& ctx) { return Real(v, ctx); }

inline Real orient_real(Pt a, Pt b, Pt c, const ContextPtr& ctx) {
  Real ax = coord(a.x, ctx), ay = coord(a.y, ctx);
  Real bx = coord(b.x, ctx), by = coord(b.y, ctx);
  Real cx = coord(c.x, ctx), cy = coord(c.y, ctx);
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

inline Real incircle_real(Pt a, Pt b, Pt c, Pt d, const ContextPtr& ctx) {
  Real adx = coord(a.x, ctx) - coord(d.x, ctx);
  Real ady = coord(a.y, ctx) - coord(d.y, ctx);
  Real bdx = coord(b.x, ctx) - coord(d.x, ctx);
  Real bdy = coord(b.y, ctx) - coord(d.y, ctx);
  Real cdx = coord(c.x, ctx) - coord(d.x, ctx);
  Real cdy = coord(c.y, ctx) - coord(d.y, ctx);
  Real al = adx * adx + ady * ady;
  Real bl = bdx * bdx + bdy * bdy;
  Real cl = cdx * cdx + cdy * cdy;
  return adx * (bdy * cl - cdy * bl) - ady * (bdx * cl - cdx * bl) +
         al * (bdx * cdy - cdx * bdy);
}

}  // namespace geo

inline RunResult bench_orient(std::int64_t n, std::uint64_t seed, const StrategyConfig& cfg,
                              std::int64_t reps = 1) {
  if (n < 3) throw std::invalid_argument("bench_orient: n must be >= 3");
  return detail::run_timed("orient", n, cfg, reps, [&](const ContextPtr& ctx) {
    SplitMix64 rng(seed);
    std::int64_t matches = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      geo::Pt a{rng.below(std::int64_t{1} << 19), rng.below(std::int64_t{1} << 19)};
      std::int64_t dx = rng.in(1, 64), dy = rng.in(1, 64);
      std::int64_t t1 = rng.in(1, 1023), t2 = rng.in(1, 1023);
      if (t2 == t1) t2 = t1 + 1;
      geo::Pt b{a.x + t1 * dx, a.y + t1 * dy};
      geo::Pt c{a.x + t2 * dx, a.y + t2 * dy};
      if (i % 2 == 1) {  // perturb off the line by one grid unit
        if (rng.below(2) == 0)
          c.x += rng.below(2) == 0 ? 1 : -1;
        else
          c.y += rng.below(2) == 0 ? 1 : -1;
      }
      int expected = geo::sign_of_i128(geo::orient_det(a, b, c));
      int got = geo::orient_real(a, b, c, ctx).sign();
      if (got == expected) ++matches;
    }
    return std::pair<std::int64_t, std::int64_t>(matches, n);
  });
}

inline RunResult bench_incircle(std::int64_t n, std::uint64_t seed, const StrategyConfig& cfg,
                                std::int64_t reps = 1) {
  if (n < 3) throw std::invalid_argument("bench_incircle: n must be >= 3");
  return detail::run_timed("incircle", n, cfg, reps, [&](const ContextPtr& ctx) {
    SplitMix64 rng(seed);
    std::int64_t matches = 0;
    // Integer points on a circle of radius 5s around the origin.
    static constexpr std::int64_t off[12][2] = {{3, 4},  {3, -4},  {-3, 4},  {-3, -4},
                                                {4, 3},  {4, -3},  {-4, 3},  {-4, -3},
                                                {5, 0},  {-5, 0},  {0, 5},   {0, -5}};
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t s = rng.in(1, (std::int64_t{1} << 14) - 1);
      std::int64_t cx = rng.in(5 * s, (std::int64_t{1} << 19));
      std::int64_t cy = rng.in(5 * s, (std::int64_t{1} << 19));
      int idx[4];
      for (int j = 0; j < 4; ++j) {
        bool fresh;
        do {
          idx[j] = static_cast<int>(rng.below(12));
          fresh = true;
          for (int k = 0; k < j; ++k) fresh = fresh && idx[k] != idx[j];
        } while (!fresh);
      }
      geo::Pt p[4];
      for (int j = 0; j < 4; ++j)
        p[j] = geo::Pt{cx + off[idx[j]][0] * s, cy + off[idx[j]][1] * s};
      if (i % 2 == 1) {  // one unit off the circle; never lands back on it
        if (rng.below(2) == 0)
          p[3].x += rng.below(2) == 0 ? 1 : -1;
        else
          p[3].y += rng.below(2) == 0 ? 1 : -1;
      }
      int expected = geo::sign_of_i128(geo::incircle_det(p[0], p[1], p[2], p[3]));
      int got = geo::incircle_real(p[0], p[1], p[2], p[3], ctx).sign();
      if (got == expected) ++matches;
    }
    return std::pair<std::int64_t, std::int64_t>(matches, n);
  });
}

// ---------------------------------------------------------------------------
// segments: pairwise intersection decisions (disjoint/touch/overlap/cross)
// plus homogeneous intersection points for crossing pairs, against an exact
// integer oracle.

namespace geo {

enum class SegRel { disjoint, touch, overlap, cross };

struct Seg {
  Pt a;
  Pt b;
};

inline bool on_segment_1d(std::int64_t lo, std::int64_t hi, std::int64_t v) {
  if (lo > hi) std::swap(lo, hi);
  return lo <= v && v <= hi;
}
inline bool point_in_bbox(const Seg& s, Pt r) {
  return on_segment_1d(s.a.x, s.b.x, r.x) && on_segment_1d(s.a.y, s.b.y, r.y);
}

/// Exact classification from orientation signs and bounding-box tests.
inline SegRel classify(const Seg& s, const Seg& t, int o1, int o2, int o3, int o4) {
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return SegRel::cross;
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // collinear: count shared extent
    bool ta = point_in_bbox(s, t.a), tb = point_in_bbox(s, t.b);
    bool sa = point_in_bbox(t, s.a), sb = point_in_bbox(t, s.b);
    if (!ta && !tb && !sa && !sb) return SegRel::disjoint;
    Pt lo_s = (s.a.x < s.b.x || (s.a.x == s.b.x && s.a.y < s.b.y)) ? s.a : s.b;
    Pt hi_s = (lo_s.x == s.a.x && lo_s.y == s.a.y) ? s.b : s.a;
    Pt lo_t = (t.a.x < t.b.x || (t.a.x == t.b.x && t.a.y < t.b.y)) ? t.a : t.b;
    Pt hi_t = (lo_t.x == t.a.x && lo_t.y == t.a.y) ? t.b : t.a;
    // Touching iff the overlap degenerates to one shared endpoint.
    if ((hi_s.x == lo_t.x && hi_s.y == lo_t.y) || (hi_t.x == lo_s.x && hi_t.y == lo_s.y))
      return SegRel::touch;
    return SegRel::overlap;
  }
  if (o1 == 0 && point_in_bbox(s, t.a)) return SegRel::touch;
  if (o2 == 0 && point_in_bbox(s, t.b)) return SegRel::touch;
  if (o3 == 0 && point_in_bbox(t, s.a)) return SegRel::touch;
  if (o4 == 0 && point_in_bbox(t, s.b)) return SegRel::touch;
  if (o1 != o2 && o3 != o4) return SegRel::cross;  // unreachable; kept for clarity
  return SegRel::disjoint;
}

struct Homog {
  I128 x;
  I128 y;
  I128 w;
};

/// Intersection of the supporting lines in homogeneous coordinates.
inline Homog line_intersection(const Seg& s, const Seg& t) {
  // line through p, q: (py - qy, qx - px, px*qy - qx*py)
  I128 a1 = s.a.y - s.b.y, b1 = s.b.x - s.a.x;
  I128 c1 = I128(s.a.x) * s.b.y - I128(s.b.x) * s.a.y;
  I128 a2 = t.a.y - t.b.y, b2 = t.b.x - t.a.x;
  I128 c2 = I128(t.a.x) * t.b.y - I128(t.b.x) * t.a.y;
  return Homog{b1 * c2 - b2 * c1, a2 * c1 - a1 * c2, a1 * b2 - a2 * b1};
}

}  // namespace geo

inline RunResult bench_segments(std::int64_t n, std::uint64_t seed, const StrategyConfig& cfg,
                                std::int64_t reps = 1) {
  if (n < 2) throw std::invalid_argument("bench_segments: n must be >= 2");
  return detail::run_timed("segments", n, cfg, reps, [&](const ContextPtr& ctx) {
    SplitMix64 rng(seed);
    constexpr std::int64_t grid = std::int64_t{1} << 10;
    std::vector<geo::Seg> segs;
    segs.reserve(static_cast<std::size_t>(n));
    while (static_cast<std::int64_t>(segs.size()) < n) {
      geo::Seg s{{rng.below(grid + 1), rng.below(grid + 1)},
                 {rng.below(grid + 1), rng.below(grid + 1)}};
      if (s.a.x == s.b.x && s.a.y == s.b.y) continue;
      segs.push_back(s);
    }

    std::int64_t matches = 0;
    const std::int64_t pairs = n * (n - 1) / 2;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = i + 1; j < n; ++j) {
        const geo::Seg& s = segs[static_cast<std::size_t>(i)];
        const geo::Seg& t = segs[static_cast<std::size_t>(j)];

        int e1 = geo::sign_of_i128(geo::orient_det(s.a, s.b, t.a));
        int e2 = geo::sign_of_i128(geo::orient_det(s.a, s.b, t.b));
        int e3 = geo::sign_of_i128(geo::orient_det(t.a, t.b, s.a));
        int e4 = geo::sign_of_i128(geo::orient_det(t.a, t.b, s.b));
        geo::SegRel expected = geo::classify(s, t, e1, e2, e3, e4);

        int g1 = geo::orient_real(s.a, s.b, t.a, ctx).sign();
        int g2 = geo::orient_real(s.a, s.b, t.b, ctx).sign();
        int g3 = geo::orient_real(t.a, t.b, s.a, ctx).sign();
        int g4 = geo::orient_real(t.a, t.b, s.b, ctx).sign();
        geo::SegRel got = geo::classify(s, t, g1, g2, g3, g4);

        bool ok = got == expected;
        if (ok && expected == geo::SegRel::cross) {
          // The decision includes the intersection point: compare the
          // number type's homogeneous coordinates with the exact ones.
          geo::Homog h = geo::line_intersection(s, t);
          auto R = [&](std::int64_t v) { return Real(v, ctx); };
          Real a1 = R(s.a.y) - R(s.b.y), b1 = R(s.b.x) - R(s.a.x);
          Real c1 = R(s.a.x) * R(s.b.y) - R(s.b.x) * R(s.a.y);
          Real a2 = R(t.a.y) - R(t.b.y), b2 = R(t.b.x) - R(t.a.x);
          Real c2 = R(t.a.x) * R(t.b.y) - R(t.b.x) * R(t.a.y);
          Real hx = b1 * c2 - b2 * c1;
          Real hy = a2 * c1 - a1 * c2;
          Real hw = a1 * b2 - a2 * b1;
          ok = hw.sign() == geo::sign_of_i128(h.w) && hw.sign() != 0 &&
               (hx - R(static_cast<std::int64_t>(h.x))).sign() == 0 &&
               (hy - R(static_cast<std::int64_t>(h.y))).sign() == 0 &&
               (hw - R(static_cast<std::int64_t>(h.w))).sign() == 0;
        }
        if (ok) ++matches;
      }
    }
    return std::pair<std::int64_t, std::int64_t>(matches, pairs);
  });
}

// ---------------------------------------------------------------------------
// Dispatch, output formats, CLI.

inline RunResult run_one(const BenchSpec& spec, const StrategyConfig& cfg) {
  if (spec.bench == "fib") return bench_fibonacci(spec.n, cfg, spec.reps);
  if (spec.bench == "square") return bench_square(spec.n, spec.q, cfg, spec.reps);
  if (spec.bench == "orient") return bench_orient(spec.n, spec.seed, cfg, spec.reps);
  if (spec.bench == "incircle") return bench_incircle(spec.n, spec.seed, cfg, spec.reps);
  if (spec.bench == "segments") return bench_segments(spec.n, spec.seed, cfg, spec.reps);
  throw std::invalid_argument("unknown benchmark: " + spec.bench);
}

inline const char* kCsvHeader =
    "bench,n,strategy,sep_cache,exact_ceil_log2,reps,mean_time_s,recomputations,"
    "sepbound_computations,sepbound_nodes,bigfloat_ops,max_precision,outcome";

inline std::string to_csv_row(const RunResult& r) {
  std::ostringstream os;
  os << r.bench << ',' << r.n << ',' << r.strategy << ',' << (r.sep_cache ? "on" : "off") << ','
     << (r.exact_ceil_log2 ? "on" : "off") << ',' << r.reps << ',' << r.mean_time_s << ','
     << r.counters.node_recomputations << ',' << r.counters.sepbound_computations << ','
     << r.counters.sepbound_nodes_traversed << ',' << r.counters.bigfloat_ops << ','
     << r.counters.max_precision_bits << ',' << r.outcome;
  return os.str();
}

inline nlohmann::json to_json_record(const RunResult& r) {
  return nlohmann::json{{"bench", r.bench},
                        {"n", r.n},
                        {"strategy", r.strategy},
                        {"sep_cache", r.sep_cache ? "on" : "off"},
                        {"exact_ceil_log2", r.exact_ceil_log2 ? "on" : "off"},
                        {"reps", r.reps},
                        {"mean_time_s", r.mean_time_s},
                        {"recomputations", r.counters.node_recomputations},
                        {"sepbound_computations", r.counters.sepbound_computations},
                        {"sepbound_nodes", r.counters.sepbound_nodes_traversed},
                        {"bigfloat_ops", r.counters.bigfloat_ops},
                        {"max_precision", r.counters.max_precision_bits},
                        {"outcome", r.outcome}};
}

inline std::int64_t default_n_for(const std::string& bench) {
  if (bench == "fib") return 1000;
  if (bench == "square") return 8;
  if (bench == "segments") return 40;
  return 100;  // orient, incircle
}

/// Flag-driven harness. Exit codes: 0 all outcomes as expected, 1 any
/// FAILED outcome, 2 usage error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"adreal benchmark harness"};
  std::string bench;
  std::int64_t n = -1;
  std::int64_t q = 5000;
  std::uint64_t seed = 42;
  std::string strategy = "def";
  std::string sep_cache = "on";
  std::string exact = "off";
  std::int64_t reps = 25;
  std::string format = "csv";
  bool matrix = false;

  app.add_option("--bench", bench, "benchmark to run")
      ->required()
      ->check(CLI::IsMember({"fib", "square", "orient", "incircle", "segments", "all"}));
  app.add_option("--n", n, "problem size (per-benchmark default if omitted)");
  app.add_option("--q", q, "accuracy 2^-q requested by the square benchmark");
  app.add_option("--seed", seed, "workload seed");
  app.add_option("--strategy", strategy, "error representation strategy")
      ->check(CLI::IsMember({"def", "lgi", "lgd"}));
  app.add_option("--sep-cache", sep_cache, "timestamped separation bound cache")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--exact-ceil-log2", exact, "exact ceil_log2 conversions")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--reps", reps, "repetitions to average over")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--matrix", matrix, "run every strategy/cache/exact combination");

  std::vector<const char*> argv;
  argv.push_back("adreal-bench");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::vector<std::string> benches;
  if (bench == "all") {
    if (n >= 0) {
      err << "--n cannot be combined with --bench all; per-benchmark defaults apply\n";
      return 2;
    }
    benches = {"fib", "square", "orient", "incircle", "segments"};
  } else {
    benches = {bench};
  }

  std::vector<StrategyConfig> configs;
  if (matrix) {
    configs = matrix_configs();
  } else {
    StrategyConfig cfg = strategy_config(strategy);
    cfg.sep_cache = sep_cache == "on";
    cfg.exact_ceil_log2 = exact == "on";
    configs = {cfg};
  }

  std::vector<RunResult> results;
  try {
    for (const auto& b : benches) {
      BenchSpec spec;
      spec.bench = b;
      spec.n = n >= 0 ? n : default_n_for(b);
      spec.q = q;
      spec.seed = seed;
      spec.reps = reps;
      for (const auto& cfg : configs) results.push_back(run_one(spec, cfg));
    }
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return 2;
  }

  if (format == "csv") {
    out << kCsvHeader << "\n";
    for (const auto& r : results) out << to_csv_row(r) << "\n";
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) arr.push_back(to_json_record(r));
    out << arr.dump(2) << "\n";
  }

  bool all_passed = true;
  for (const auto& r : results) {
    if (!r.passed()) {
      all_passed = false;
      err << "FAILED: " << r.bench << " n=" << r.n << " strategy=" << r.strategy
          << " outcome=" << r.outcome << " expected=" << r.expected << "\n";
    }
  }
  return all_passed ? 0 : 1;
}

}  // namespace adreal::bench
