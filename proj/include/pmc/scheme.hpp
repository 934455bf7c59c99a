#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmc/entropy.hpp"
#include "pmc/ffield.hpp"
#include "pmc/intlinalg.hpp"
#include "pmc/rng.hpp"

namespace pmc {

enum class Mode { pir, multiplicative };

inline const char* to_string(Mode m) { return m == Mode::pir ? "pir" : "multiplicative"; }

/// One addend of a downloaded symbol: +/- phi_stream(X^(subpacket)).
struct RequestComponent {
  int stream;
  int subpacket;
  int sign;  // +1 or -1
  auto operator<=>(const RequestComponent&) const = default;
};

/// A symbol the user asks a database for. Components form a set with
/// distinct streams; the redundant flag marks symbols a database keeps back
/// in multiplicative mode.
struct SymbolRequest {
  std::vector<RequestComponent> parts;  // sorted by stream
  bool redundant = false;
  bool operator==(const SymbolRequest&) const = default;
};

struct DatabaseQuery {
  std::vector<std::vector<SymbolRequest>> blocks;  // blocks[b-1], b in [mu]

  int total_requests() const {
    int c = 0;
    for (const auto& b : blocks) c += static_cast<int>(b.size());
    return c;
  }
  int redundant_requests() const {
    int c = 0;
    for (const auto& b : blocks)
      for (const auto& r : b) c += r.redundant ? 1 : 0;
    return c;
  }
};

struct SchemeConfig {
  int n;
  MonomialSet ms;
  std::shared_ptr<const FiniteField> field;

  SchemeConfig(int n_, MonomialSet ms_, std::shared_ptr<const FiniteField> field_)
      : n(n_), ms(std::move(ms_)), field(std::move(field_)) {
    if (n < 2) throw std::invalid_argument("SchemeConfig: need at least two databases");
    long long l = 1;
    for (int i = 0; i < ms.mu(); ++i) {
      l *= n;
      if (l > 1'000'000) throw std::invalid_argument("SchemeConfig: subpacketization n^mu too large");
    }
  }

  int mu() const { return ms.mu(); }
  int f() const { return ms.f(); }
  int lambda() const {
    int l = 1;
    for (int i = 0; i < ms.mu(); ++i) l *= n;
    return l;
  }
};

/// Replicated contents: subpackets X_i^(j), i in [f], j in [lambda].
struct Storage {
  std::vector<std::vector<FieldElement>> x;  // [f][lambda]

  bool has_zero() const {
    for (const auto& row : x)
      for (const FieldElement e : row)
        if (e.is_zero()) return true;
    return false;
  }

  std::vector<FieldElement> column(int j) const {
    std::vector<FieldElement> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i][static_cast<std::size_t>(j)];
    return out;
  }
};

inline Storage draw_storage(const SchemeConfig& cfg, std::uint64_t seed) {
  CounterRng rng(seed);
  Storage s;
  s.x.assign(static_cast<std::size_t>(cfg.f()),
             std::vector<FieldElement>(static_cast<std::size_t>(cfg.lambda())));
  for (auto& row : s.x)
    for (auto& e : row) e = {static_cast<std::uint32_t>(rng.next_below(cfg.field->q()))};
  return s;
}

/// Algorithm dispatch: multiplicative needs a zero-free storage and strictly
/// more candidate functions than the rank. Deterministic in the storage, so
/// every database lands on the same branch.
inline Mode dispatch(const Storage& storage, const MonomialSet& ms) {
  if (!storage.has_zero() && ms.mu() > ms.rank()) return Mode::multiplicative;
  return Mode::pir;
}

// --- query generation -------------------------------------------------------

/// The user's secret randomness. Slot t of a stream maps to a subpacket:
/// slots 0..n-1 are the per-database anchors shared by all streams (the
/// whole of block 1 is aligned on them), slots n.. are per-stream fresh
/// draws from the remaining indices. Every slot carries an independent sign.
struct UserRandomness {
  std::vector<int> anchor;                 // n distinct subpacket indices
  std::vector<std::vector<int>> fresh;     // per stream
  std::vector<std::vector<int>> sign;      // per stream, size n + fresh[u].size()
};

struct RandomnessShape {
  int lambda = 0;
  int n = 0;
  std::vector<int> fresh_count;  // per stream
};

/// Fresh-slot demand: the desired stream walks through all remaining
/// lambda - n indices; every other stream only feeds the pure-undesired
/// instances, n^(mu-1) - n of them.
inline RandomnessShape randomness_shape(const SchemeConfig& cfg, int v) {
  const int mu = cfg.mu();
  if (v < 0 || v >= mu) throw std::invalid_argument("randomness_shape: bad function index");
  RandomnessShape shape;
  shape.lambda = cfg.lambda();
  shape.n = cfg.n;
  shape.fresh_count.assign(static_cast<std::size_t>(mu), 0);
  int undesired_total = 1;  // n^(mu-1)
  for (int i = 0; i < mu - 1; ++i) undesired_total *= cfg.n;
  for (int u = 0; u < mu; ++u)
    shape.fresh_count[static_cast<std::size_t>(u)] =
        u == v ? shape.lambda - cfg.n : (mu >= 2 ? undesired_total - cfg.n : 0);
  return shape;
}

inline UserRandomness draw_randomness(const RandomnessShape& shape, CounterRng& rng) {
  UserRandomness r;
  std::vector<int> all(static_cast<std::size_t>(shape.lambda));
  std::iota(all.begin(), all.end(), 0);
  r.anchor = rng.sample_injection(all, static_cast<std::size_t>(shape.n));
  std::vector<int> pool;
  for (int j = 0; j < shape.lambda; ++j)
    if (std::find(r.anchor.begin(), r.anchor.end(), j) == r.anchor.end()) pool.push_back(j);
  for (const int count : shape.fresh_count)
    r.fresh.push_back(rng.sample_injection(pool, static_cast<std::size_t>(count)));
  for (std::size_t u = 0; u < shape.fresh_count.size(); ++u) {
    std::vector<int> s(static_cast<std::size_t>(shape.n) + r.fresh[u].size());
    for (auto& b : s) b = rng.next_sign();
    r.sign.push_back(std::move(s));
  }
  return r;
}

/// Number of distinct randomness outcomes, for exhaustive privacy audits.
inline BigInt randomness_space_size(const RandomnessShape& shape) {
  auto falling = [](int base, int count) {
    BigInt r = 1;
    for (int i = 0; i < count; ++i) r *= base - i;
    return r;
  };
  BigInt total = falling(shape.lambda, shape.n);
  int sign_bits = 0;
  for (const int c : shape.fresh_count) {
    total *= falling(shape.lambda - shape.n, c);
    sign_bits += shape.n + c;
  }
  return total << sign_bits;
}

/// Bijection [0, randomness_space_size) -> UserRandomness, mirroring the
/// sampling distribution exactly.
inline UserRandomness unrank_randomness(const RandomnessShape& shape, BigInt rank) {
  auto take_injection = [&rank](std::vector<int> pool, int count) {
    std::vector<int> out;
    for (int i = 0; i < count; ++i) {
      const BigInt size = static_cast<int>(pool.size());
      const auto idx = (rank % size).convert_to<std::size_t>();
      rank /= size;
      out.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return out;
  };
  UserRandomness r;
  std::vector<int> all(static_cast<std::size_t>(shape.lambda));
  std::iota(all.begin(), all.end(), 0);
  r.anchor = take_injection(all, shape.n);
  std::vector<int> pool;
  for (int j = 0; j < shape.lambda; ++j)
    if (std::find(r.anchor.begin(), r.anchor.end(), j) == r.anchor.end()) pool.push_back(j);
  for (const int count : shape.fresh_count) r.fresh.push_back(take_injection(pool, count));
  for (const int count : shape.fresh_count) {
    std::vector<int> s(static_cast<std::size_t>(shape.n) + static_cast<std::size_t>(count));
    for (auto& b : s) {
      b = (rank % 2 == 0) ? 1 : -1;
      rank /= 2;
    }
    r.sign.push_back(std::move(s));
  }
  return r;
}

/// User-side provenance of one request; what decode needs to peel it.
struct PlanEntry {
  int db = 0;
  int block = 1;
  std::vector<int> subset;
  int instance = 0;
  bool redundant = false;
  bool has_desired = false;
  int si_db = -1;
  int si_flat = -1;  // flat request index at si_db
};

enum class QueryGenVariant {
  canonical,
  /// Test fixture for the negative privacy control: block 1 reordered so the
  /// desired singleton is always first, leaking v in the wire order.
  leak_block_order,
};

struct QueryArtifacts {
  int n = 0, mu = 0, v = 0, lambda = 0;
  std::vector<int> dep_rows;
  std::vector<DatabaseQuery> pir_queries;  // redundancy flags cleared
  std::vector<DatabaseQuery> plc_queries;  // same requests, flags set
  std::vector<std::vector<PlanEntry>> plan;  // per db, flat wire order
  UserRandomness randomness;
};

namespace scheme_detail {

inline std::vector<std::vector<int>> subsets_of_size(int mu, int b) {
  std::vector<std::vector<int>> out;
  lin_detail::for_each_combination(mu, b, [&](const std::vector<int>& s) { out.push_back(s); });
  return out;
}

inline int ipow(int base, int e) {
  int r = 1;
  while (e-- > 0) r *= base;
  return r;
}

}  // namespace scheme_detail

inline long long block_request_count(int n, int mu, int b) {
  return static_cast<long long>(scheme_detail::ipow(n - 1, b - 1)) *
         static_cast<long long>(lin_detail::binomial(mu, b));
}

inline long long block_redundant_count(int n, int mu, int r, int b) {
  return static_cast<long long>(scheme_detail::ipow(n - 1, b - 1)) *
         static_cast<long long>(lin_detail::binomial(mu - r, b));
}

/// Build the full query structure for desired index v from explicit user
/// randomness. Block 1 hands every database one aligned singleton per
/// stream; block b combines a fresh desired symbol with one block-(b-1)
/// pure-undesired symbol from each other database, and pads with fresh
/// undesired b-sums, so each database sees the same v-independent shape.
inline QueryArtifacts generate_queries(const SchemeConfig& cfg, int v, const UserRandomness& rnd,
                                       QueryGenVariant variant = QueryGenVariant::canonical) {
  const int n = cfg.n;
  const int mu = cfg.mu();
  const int lambda = cfg.lambda();
  if (v < 0 || v >= mu) throw std::invalid_argument("generate_queries: bad function index");

  QueryArtifacts art;
  art.n = n;
  art.mu = mu;
  art.v = v;
  art.lambda = lambda;
  art.dep_rows = cfg.ms.dependent_rows();
  art.randomness = rnd;

  std::vector<bool> dep_mask(static_cast<std::size_t>(mu), false);
  for (const int r : art.dep_rows) dep_mask[static_cast<std::size_t>(r)] = true;

  // slot -> subpacket index for a stream
  auto slot_index = [&](int stream, int slot) {
    if (slot < n) return rnd.anchor[static_cast<std::size_t>(slot)];
    return rnd.fresh[static_cast<std::size_t>(stream)][static_cast<std::size_t>(slot - n)];
  };
  auto slot_sign = [&](int stream, int slot) {
    return rnd.sign[static_cast<std::size_t>(stream)][static_cast<std::size_t>(slot)];
  };

  std::vector<int> fresh_used(static_cast<std::size_t>(mu), 0);
  auto next_fresh_slot = [&](int stream) { return n + fresh_used[static_cast<std::size_t>(stream)]++; };

  art.plc_queries.assign(static_cast<std::size_t>(n), DatabaseQuery{});
  art.plan.assign(static_cast<std::size_t>(n), {});
  for (int d = 0; d < n; ++d)
    art.plc_queries[static_cast<std::size_t>(d)].blocks.resize(static_cast<std::size_t>(mu));

  // flat offsets are shared by all databases (identical block shapes)
  std::vector<int> block_offset(static_cast<std::size_t>(mu) + 1, 0);
  for (int b = 1; b <= mu; ++b)
    block_offset[static_cast<std::size_t>(b)] =
        block_offset[static_cast<std::size_t>(b - 1)] + static_cast<int>(block_request_count(n, mu, b));

  std::vector<std::vector<std::vector<int>>> subsets(static_cast<std::size_t>(mu) + 1);
  for (int b = 1; b <= mu; ++b)
    subsets[static_cast<std::size_t>(b)] = scheme_detail::subsets_of_size(mu, b);

  auto flat_of = [&](int block, int subset_rank, int instance) {
    const int per_subset = scheme_detail::ipow(n - 1, block - 1);
    return block_offset[static_cast<std::size_t>(block - 1)] + subset_rank * per_subset + instance;
  };

  for (int b = 1; b <= mu; ++b) {
    const auto& subs = subsets[static_cast<std::size_t>(b)];
    const int instances = scheme_detail::ipow(n - 1, b - 1);
    for (int d = 0; d < n; ++d) {
      auto& block = art.plc_queries[static_cast<std::size_t>(d)].blocks[static_cast<std::size_t>(b - 1)];
      for (std::size_t sr = 0; sr < subs.size(); ++sr) {
        const auto& s = subs[sr];
        const bool in_s = std::find(s.begin(), s.end(), v) != s.end();
        const bool redundant = std::all_of(s.begin(), s.end(), [&](int u) {
          return dep_mask[static_cast<std::size_t>(u)];
        });
        for (int inst = 0; inst < instances; ++inst) {
          SymbolRequest req;
          PlanEntry entry;
          entry.db = d;
          entry.block = b;
          entry.subset = s;
          entry.instance = inst;
          entry.redundant = redundant;
          entry.has_desired = in_s;
          if (b == 1) {
            const int u = s.front();
            req.parts.push_back({u, slot_index(u, d), slot_sign(u, d)});
          } else if (in_s) {
            const int per_prev = scheme_detail::ipow(n - 1, b - 2);
            const int k = inst / per_prev;
            const int rho = inst % per_prev;
            const int si_db = k < d ? k : k + 1;  // k-th database other than d
            std::vector<int> t;
            for (const int u : s)
              if (u != v) t.push_back(u);
            const auto& prev_subs = subsets[static_cast<std::size_t>(b - 1)];
            const int t_rank = static_cast<int>(
                std::lower_bound(prev_subs.begin(), prev_subs.end(), t) - prev_subs.begin());
            entry.si_db = si_db;
            entry.si_flat = flat_of(b - 1, t_rank, rho);
            // copy the side-information symbol verbatim and add a fresh
            // desired component
            const auto& src = art.plc_queries[static_cast<std::size_t>(si_db)]
                                  .blocks[static_cast<std::size_t>(b - 2)]
                                  [static_cast<std::size_t>(entry.si_flat -
                                                            block_offset[static_cast<std::size_t>(b - 2)])];
            req.parts = src.parts;
            const int slot = next_fresh_slot(v);
            req.parts.push_back({v, slot_index(v, slot), slot_sign(v, slot)});
          } else {
            for (const int u : s) {
              const int slot = next_fresh_slot(u);
              req.parts.push_back({u, slot_index(u, slot), slot_sign(u, slot)});
            }
          }
          std::sort(req.parts.begin(), req.parts.end(),
                    [](const RequestComponent& a, const RequestComponent& c) {
                      return a.stream < c.stream;
                    });
          req.redundant = redundant;
          block.push_back(std::move(req));
          art.plan[static_cast<std::size_t>(d)].push_back(std::move(entry));
        }
      }
    }
  }

  if (variant == QueryGenVariant::leak_block_order) {
    for (int d = 0; d < n; ++d) {
      auto& b1 = art.plc_queries[static_cast<std::size_t>(d)].blocks.front();
      std::rotate(b1.begin(), b1.begin() + v, b1.end());
      auto& plan = art.plan[static_cast<std::size_t>(d)];
      std::rotate(plan.begin(), plan.begin() + v, plan.begin() + mu);
    }
  }

  art.pir_queries = art.plc_queries;
  for (auto& q : art.pir_queries)
    for (auto& b : q.blocks)
      for (auto& r : b) r.redundant = false;
  return art;
}

inline QueryArtifacts gen_queries(const SchemeConfig& cfg, int v, std::uint64_t rng_seed,
                                  QueryGenVariant variant = QueryGenVariant::canonical) {
  CounterRng rng(rng_seed);
  const auto shape = randomness_shape(cfg, v);
  return generate_queries(cfg, v, draw_randomness(shape, rng), variant);
}

// --- answering ---------------------------------------------------------------

/// All mu x lambda function evaluations over a storage.
inline std::vector<std::vector<FieldElement>> evaluate_functions(const SchemeConfig& cfg,
                                                                 const Storage& storage) {
  const MonomialEvaluator eval(cfg.ms, *cfg.field);
  std::vector<std::vector<FieldElement>> table(
      static_cast<std::size_t>(cfg.mu()),
      std::vector<FieldElement>(static_cast<std::size_t>(cfg.lambda())));
  for (int j = 0; j < cfg.lambda(); ++j) {
    const auto col = storage.column(j);
    for (int u = 0; u < cfg.mu(); ++u)
      table[static_cast<std::size_t>(u)][static_cast<std::size_t>(j)] = eval(u, col);
  }
  return table;
}

/// Answer with signed sums of evaluations; redundancy flags are ignored
/// (PIR mode is oblivious to dependencies between the functions).
struct Answer {
  Mode mode = Mode::pir;
  std::vector<FieldElement> symbols;  // wire order; flagged requests skipped in multiplicative mode
};

inline Answer answer_pir(const DatabaseQuery& query, const Storage& storage,
                         const SchemeConfig& cfg) {
  const auto table = evaluate_functions(cfg, storage);
  Answer ans;
  ans.mode = Mode::pir;
  const FiniteField& f = *cfg.field;
  for (const auto& block : query.blocks)
    for (const auto& req : block) {
      FieldElement acc = f.zero();
      for (const auto& part : req.parts) {
        const FieldElement val =
            table[static_cast<std::size_t>(part.stream)][static_cast<std::size_t>(part.subpacket)];
        acc = part.sign > 0 ? f.add(acc, val) : f.sub(acc, val);
      }
      ans.symbols.push_back(acc);
    }
  return ans;
}

/// Answer with the multiplicative combination, skipping flagged requests.
/// Requires a zero-free storage; callers dispatch to PIR mode otherwise.
inline Answer answer_mult(const DatabaseQuery& query, const Storage& storage,
                          const SchemeConfig& cfg) {
  if (storage.has_zero())
    throw std::domain_error("answer_mult: storage contains a zero subpacket");
  const auto table = evaluate_functions(cfg, storage);
  Answer ans;
  ans.mode = Mode::multiplicative;
  const FiniteField& f = *cfg.field;
  for (const auto& block : query.blocks)
    for (const auto& req : block) {
      if (req.redundant) continue;
      FieldElement acc = f.one();
      for (const auto& part : req.parts) {
        const FieldElement val =
            table[static_cast<std::size_t>(part.stream)][static_cast<std::size_t>(part.subpacket)];
        acc = f.mul(acc, part.sign > 0 ? val : f.inv(val));
      }
      ans.symbols.push_back(acc);
    }
  return ans;
}

// --- decoding ----------------------------------------------------------------

struct DecodeResult {
  bool ok = false;
  std::string failure;  // empty when ok
  std::vector<FieldElement> f_v;
};

namespace scheme_detail {

inline std::uint64_t inv_mod_u64(std::uint64_t a, std::uint64_t m) {
  // extended Euclid; caller guarantees gcd(a, m) == 1
  long long t = 0, new_t = 1;
  long long r = static_cast<long long>(m), new_r = static_cast<long long>(a % m);
  while (new_r != 0) {
    const long long q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (t < 0) t += static_cast<long long>(m);
  return static_cast<std::uint64_t>(t);
}

}  // namespace scheme_detail

/// Recover F_v from the queries and answers alone. In PIR mode everything
/// is downloaded and side information peels additively. In multiplicative
/// mode, flagged block-1 singletons are first rebuilt in the dlog domain
/// from the basis singletons at the same anchor via the integer (or
/// rational) row dependency; a rational relation whose multiplier shares a
/// factor with q-1 has several consistent roots and is reported as a decode
/// failure rather than guessed.
inline DecodeResult decode(const QueryArtifacts& art, const std::vector<Answer>& answers,
                           const SchemeConfig& cfg) {
  const FiniteField& field = *cfg.field;
  const int n = art.n;
  DecodeResult res;
  if (static_cast<int>(answers.size()) != n) {
    res.failure = "wrong number of answers";
    return res;
  }

  // infer mode from response sizes
  const int full = art.plc_queries.front().total_requests();
  const int reduced = full - art.plc_queries.front().redundant_requests();
  Mode mode;
  if (static_cast<int>(answers.front().symbols.size()) == full)
    mode = Mode::pir;
  else if (static_cast<int>(answers.front().symbols.size()) == reduced)
    mode = Mode::multiplicative;
  else {
    res.failure = "answer size matches neither mode";
    return res;
  }

  // request values by (db, flat index); flagged ones may need rebuilding
  std::vector<std::vector<std::optional<FieldElement>>> value(
      static_cast<std::size_t>(n), std::vector<std::optional<FieldElement>>(static_cast<std::size_t>(full)));
  for (int d = 0; d < n; ++d) {
    std::size_t cursor = 0;
    int flat = 0;
    for (const auto& block : art.plc_queries[static_cast<std::size_t>(d)].blocks)
      for (const auto& req : block) {
        if (mode == Mode::pir || !req.redundant)
          value[static_cast<std::size_t>(d)][static_cast<std::size_t>(flat)] =
              answers[static_cast<std::size_t>(d)].symbols[cursor++];
        ++flat;
      }
  }

  if (mode == Mode::multiplicative) {
    // dependency combinations over the canonical basis
    const auto& basis = cfg.ms.basis_rows();
    std::vector<int> all_cols(static_cast<std::size_t>(cfg.f()));
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const IntMatrix basis_matrix = cfg.ms.degrees().submatrix(basis, all_cols);
    const std::uint64_t m = field.order();

    std::map<int, std::optional<RowCombination>> combos;
    for (const int dep : art.dep_rows)
      combos[dep] = solve_row_combination(basis_matrix, cfg.ms.degrees().row(dep));

    for (int d = 0; d < n; ++d) {
      const auto& plan = art.plan[static_cast<std::size_t>(d)];
      for (std::size_t flat = 0; flat < plan.size(); ++flat) {
        const auto& entry = plan[flat];
        if (!entry.redundant) continue;
        if (entry.block != 1) continue;  // rebuilt only at the aligned anchors
        const int u = entry.subset.front();
        const auto& combo = combos.at(u);
        if (!combo) continue;  // no rational dependency; stays unknown
        // basis dlogs at this database's anchor, read off block-1 singletons
        std::vector<std::uint64_t> y(basis.size());
        bool have_all = true;
        for (std::size_t bi = 0; bi < basis.size() && have_all; ++bi) {
          const int flat_b = basis[bi];  // block-1 flat index == stream id (lex singletons)
          const auto& val = value[static_cast<std::size_t>(d)][static_cast<std::size_t>(flat_b)];
          if (!val || val->is_zero()) {
            have_all = false;
            break;
          }
          const auto& part = art.plc_queries[static_cast<std::size_t>(d)]
                                 .blocks.front()[static_cast<std::size_t>(flat_b)]
                                 .parts.front();
          std::uint64_t dl = field.dlog(*val);
          if (part.sign < 0) dl = (m - dl) % m;
          y[bi] = dl;
        }
        if (!have_all) continue;
        BigInt rhs = 0;
        for (std::size_t bi = 0; bi < basis.size(); ++bi)
          rhs += combo->coefficients[bi] * BigInt(y[bi]);
        rhs %= m;
        if (rhs < 0) rhs += m;
        std::uint64_t y_u;
        const BigInt c0 = combo->multiplier;
        if (c0 == 1) {
          y_u = rhs.convert_to<std::uint64_t>();
        } else {
          const BigInt g = gcd(c0, BigInt(m));
          if (g != 1) continue;  // several consistent roots: leave unknown
          const std::uint64_t c0m = (c0 % m).convert_to<std::uint64_t>();
          y_u = rhs.convert_to<std::uint64_t>() * scheme_detail::inv_mod_u64(c0m, m) % m;
        }
        const auto& part = art.plc_queries[static_cast<std::size_t>(d)]
                               .blocks.front()[flat]
                               .parts.front();
        const std::uint64_t signed_dl = part.sign > 0 ? y_u : (m - y_u) % m;
        value[static_cast<std::size_t>(d)][flat] = field.exp(signed_dl);
      }
    }
  }

  // peel the desired stream
  std::vector<std::optional<FieldElement>> f_v(static_cast<std::size_t>(art.lambda));
  for (int d = 0; d < n; ++d) {
    const auto& plan = art.plan[static_cast<std::size_t>(d)];
    std::vector<const SymbolRequest*> requests;
    for (const auto& block : art.plc_queries[static_cast<std::size_t>(d)].blocks)
      for (const auto& r : block) requests.push_back(&r);
    for (std::size_t flat = 0; flat < plan.size(); ++flat) {
      const auto& entry = plan[flat];
      if (!entry.has_desired) continue;
      const SymbolRequest& req = *requests[flat];
      const auto v_part = std::find_if(req.parts.begin(), req.parts.end(),
                                       [&](const RequestComponent& p) { return p.stream == art.v; });
      const auto& own = value[static_cast<std::size_t>(d)][flat];
      if (!own) {
        res.failure = "redundant symbol could not be reconstructed";
        return res;
      }
      FieldElement desired;
      if (entry.block == 1) {
        desired = *own;
      } else {
        const auto& si = value[static_cast<std::size_t>(entry.si_db)][static_cast<std::size_t>(entry.si_flat)];
        if (!si) {
          res.failure = "side information missing (unreconstructed redundant symbol)";
          return res;
        }
        desired = mode == Mode::pir ? field.sub(*own, *si) : field.mul(*own, field.inv(*si));
      }
      if (v_part->sign < 0)
        desired = mode == Mode::pir ? field.neg(desired) : field.inv(desired);
      f_v[static_cast<std::size_t>(v_part->subpacket)] = desired;
    }
  }

  for (const auto& e : f_v)
    if (!e) {
      res.failure = "incomplete desired stream";
      return res;
    }
  res.ok = true;
  res.f_v.reserve(f_v.size());
  for (const auto& e : f_v) res.f_v.push_back(*e);
  return res;
}

// --- transcripts -------------------------------------------------------------

/// One end-to-end protocol run.
struct Transcript {
  int v = 0;
  std::uint64_t storage_seed = 0;
  std::uint64_t randomness_seed = 0;
  Mode mode = Mode::pir;
  QueryArtifacts queries;
  std::vector<Answer> answers;
  std::vector<int> per_db_downloaded;
  DecodeResult decoded;
  int uploaded_requests = 0;
};

inline Transcript run_single(const SchemeConfig& cfg, int v, std::uint64_t storage_seed,
                             std::uint64_t randomness_seed) {
  Transcript t;
  t.v = v;
  t.storage_seed = storage_seed;
  t.randomness_seed = randomness_seed;
  const Storage storage = draw_storage(cfg, storage_seed);
  t.queries = gen_queries(cfg, v, randomness_seed);
  t.mode = dispatch(storage, cfg.ms);
  for (int d = 0; d < cfg.n; ++d) {
    const auto& q = t.queries.plc_queries[static_cast<std::size_t>(d)];
    t.uploaded_requests += q.total_requests();
    t.answers.push_back(t.mode == Mode::pir ? answer_pir(q, storage, cfg)
                                            : answer_mult(q, storage, cfg));
    t.per_db_downloaded.push_back(static_cast<int>(t.answers.back().symbols.size()));
  }
  t.decoded = decode(t.queries, t.answers, cfg);
  return t;
}

/// Canonical wire serialization of one database's view, order-sensitive.
/// Privacy audits compare distributions of exactly this string.
inline std::string canonical_query_encoding(const DatabaseQuery& q) {
  std::ostringstream os;
  for (std::size_t b = 0; b < q.blocks.size(); ++b) {
    os << 'B' << b + 1 << '{';
    for (const auto& req : q.blocks[b]) {
      os << '[';
      for (const auto& part : req.parts)
        os << '(' << part.stream << ',' << part.subpacket << ',' << (part.sign > 0 ? '+' : '-')
           << ')';
      os << (req.redundant ? "]R" : "]");
    }
    os << '}';
  }
  return os.str();
}

}  // namespace pmc
