#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmc/entropy.hpp"
#include "pmc/rng.hpp"
#include "pmc/scheme.hpp"

namespace pmc {

/// C_PIR(n, f) = (1 + 1/n + ... + 1/n^(f-1))^(-1). Also serves as
/// C_PLC(n, r), which coincides with it.
inline double c_pir(int n, int f) {
  if (n < 2 || f < 1) throw std::invalid_argument("c_pir: need n >= 2, f >= 1");
  double denom = 0.0, term = 1.0;
  for (int i = 0; i < f; ++i) {
    denom += term;
    term /= n;
  }
  return 1.0 / denom;
}

/// Expected download cost in q-ary units of the mode mixture:
/// n^mu (pi / C_PIR(n,r) + (1-pi) / C_PIR(n,mu)), pi = (1 - 1/q)^(n^mu f).
inline double predicted_avg_cost(int n, int mu, int r, int f, const FiniteField& field) {
  if (r > mu || r < 1) throw std::invalid_argument("predicted_avg_cost: need 1 <= r <= mu");
  double lambda = 1.0;
  for (int i = 0; i < mu; ++i) lambda *= n;
  const double pi = std::pow(1.0 - 1.0 / field.q(), lambda * f);
  return lambda * (pi / c_pir(n, r) + (1.0 - pi) / c_pir(n, mu));
}

/// min_v H_q(F_v) = lambda * min_v H_q(phi_v(X)).
inline double min_function_entropy(const MonomialSet& ms, const FiniteField& field, int lambda) {
  double best = -1.0;
  for (int v = 0; v < ms.mu(); ++v) {
    const double h = h_mono_single(ms.degrees().row(v), field).value_qary.value();
    if (best < 0.0 || h < best) best = h;
  }
  return lambda * best;
}

struct ExperimentReport {
  // config echo
  int n = 0, mu = 0, f = 0, r = 0, lambda = 0;
  std::uint32_t q = 0;
  std::string field_spec;
  long long trials = 0;
  // measurements (download in q-ary units = symbols)
  double empirical_avg_download_qary = 0.0;
  double avg_download_stderr = 0.0;
  double min_func_entropy_qary = 0.0;
  double empirical_rate = 0.0;
  double rate_stderr = 0.0;
  double mode_freq_pir = 0.0;
  double mode_freq_multiplicative = 0.0;
  double decode_failure_rate = 0.0;
  double avg_uploaded_requests = 0.0;  // logged only; excluded from the rate
  // references
  double c_pir_r = 0.0;
  double c_pir_mu = 0.0;
  double predicted_cost = 0.0;
};

/// Monte-Carlo protocol runs with fresh uniform storage and uniform V per
/// trial. Decoded output is checked against direct evaluation whenever
/// decode reports success; a mismatch is a protocol bug, not a statistic.
inline ExperimentReport run_experiment(const SchemeConfig& cfg, long long trials,
                                       std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("run_experiment: need at least one trial");
  constexpr int kBatches = 20;
  ExperimentReport rep;
  rep.n = cfg.n;
  rep.mu = cfg.mu();
  rep.f = cfg.f();
  rep.r = cfg.ms.rank();
  rep.lambda = cfg.lambda();
  rep.q = cfg.field->q();
  rep.field_spec = std::to_string(cfg.field->p()) + "^" + std::to_string(cfg.field->k());
  rep.trials = trials;
  rep.min_func_entropy_qary = min_function_entropy(cfg.ms, *cfg.field, cfg.lambda());
  rep.c_pir_r = c_pir(cfg.n, cfg.ms.rank());
  rep.c_pir_mu = c_pir(cfg.n, cfg.mu());
  rep.predicted_cost = predicted_avg_cost(cfg.n, cfg.mu(), cfg.ms.rank(), cfg.f(), *cfg.field);

  CounterRng root(seed);
  std::vector<double> batch_download(kBatches, 0.0);
  std::vector<long long> batch_size(kBatches, 0);
  long long mult_runs = 0, failures = 0, uploaded = 0;

  for (long long t = 0; t < trials; ++t) {
    CounterRng trial = root.fork(static_cast<std::uint64_t>(t));
    const int v = static_cast<int>(trial.next_below(static_cast<std::uint64_t>(cfg.mu())));
    const std::uint64_t storage_seed = trial.next_u64();
    const std::uint64_t randomness_seed = trial.next_u64();
    const Transcript run = run_single(cfg, v, storage_seed, randomness_seed);

    if (run.mode == Mode::multiplicative) ++mult_runs;
    uploaded += run.uploaded_requests;
    long long downloaded = 0;
    for (const int c : run.per_db_downloaded) downloaded += c;
    if (run.decoded.ok) {
      const Storage storage = draw_storage(cfg, storage_seed);
      const auto table = evaluate_functions(cfg, storage);
      if (run.decoded.f_v != table[static_cast<std::size_t>(v)])
        throw std::logic_error("run_experiment: decoded output disagrees with direct evaluation");
    } else {
      ++failures;
    }
    const int b = static_cast<int>(t * kBatches / trials);
    batch_download[static_cast<std::size_t>(b)] += static_cast<double>(downloaded);
    ++batch_size[static_cast<std::size_t>(b)];
  }

  double total_download = 0.0;
  for (const double d : batch_download) total_download += d;
  rep.empirical_avg_download_qary = total_download / static_cast<double>(trials);
  rep.empirical_rate = rep.min_func_entropy_qary / rep.empirical_avg_download_qary;
  rep.mode_freq_multiplicative = static_cast<double>(mult_runs) / static_cast<double>(trials);
  rep.mode_freq_pir = 1.0 - rep.mode_freq_multiplicative;
  rep.decode_failure_rate = static_cast<double>(failures) / static_cast<double>(trials);
  rep.avg_uploaded_requests = static_cast<double>(uploaded) / static_cast<double>(trials);

  // batch-means error bars
  std::vector<double> means, rates;
  for (int b = 0; b < kBatches; ++b)
    if (batch_size[static_cast<std::size_t>(b)] > 0) {
      const double m = batch_download[static_cast<std::size_t>(b)] /
                       static_cast<double>(batch_size[static_cast<std::size_t>(b)]);
      means.push_back(m);
      rates.push_back(rep.min_func_entropy_qary / m);
    }
  auto stderr_of = [](const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
  };
  rep.avg_download_stderr = stderr_of(means);
  rep.rate_stderr = stderr_of(rates);
  return rep;
}

// --- privacy audits ----------------------------------------------------------

enum class AuditMode { exhaustive, sampled };

struct PrivacyAuditResult {
  bool pass = false;
  AuditMode mode = AuditMode::exhaustive;
  double min_p_value = 1.0;            // sampled mode
  std::vector<double> p_values;        // per database, sampled mode
  std::string detail;
};

namespace harness_detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace harness_detail

/// I(V; Q_j) = 0 check. Exhaustive mode enumerates the entire user
/// randomness and demands exact per-database query distributions for every
/// v; sampled mode bins query fingerprints and runs a chi-square
/// homogeneity test across v per database.
inline PrivacyAuditResult privacy_audit(const SchemeConfig& cfg, AuditMode mode,
                                        std::uint64_t budget = 1u << 22,
                                        long long samples = 100000, std::uint64_t seed = 1,
                                        double significance = 1e-3,
                                        QueryGenVariant variant = QueryGenVariant::canonical) {
  PrivacyAuditResult res;
  res.mode = mode;
  const int mu = cfg.mu();

  if (mode == AuditMode::exhaustive) {
    const auto shape0 = randomness_shape(cfg, 0);
    const BigInt space = randomness_space_size(shape0);
    if (space > budget)
      throw std::runtime_error("privacy_audit: randomness space exceeds the exhaustive budget");
    // every v spans a randomness space of the same size
    for (int v = 1; v < mu; ++v)
      if (randomness_space_size(randomness_shape(cfg, v)) != space)
        throw std::logic_error("privacy_audit: asymmetric randomness space");

    std::vector<std::vector<std::map<std::string, long long>>> dist(
        static_cast<std::size_t>(mu),
        std::vector<std::map<std::string, long long>>(static_cast<std::size_t>(cfg.n)));
    const auto total = space.convert_to<std::uint64_t>();
    for (int v = 0; v < mu; ++v) {
      const auto shape = randomness_shape(cfg, v);
      for (std::uint64_t rank = 0; rank < total; ++rank) {
        const auto art = generate_queries(cfg, v, unrank_randomness(shape, BigInt(rank)), variant);
        for (int d = 0; d < cfg.n; ++d)
          ++dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)]
                [canonical_query_encoding(art.plc_queries[static_cast<std::size_t>(d)])];
      }
    }
    res.pass = true;
    for (int d = 0; d < cfg.n && res.pass; ++d)
      for (int v = 1; v < mu && res.pass; ++v)
        if (dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] !=
            dist[0][static_cast<std::size_t>(d)]) {
          res.pass = false;
          res.detail = "database " + std::to_string(d) +
                       ": query distribution differs between v=0 and v=" + std::to_string(v);
        }
    if (res.pass) res.detail = "exact distribution equality over " + space.str() + " outcomes per v";
    return res;
  }

  constexpr int kBins = 64;
  std::vector<std::vector<std::vector<long long>>> table(
      static_cast<std::size_t>(cfg.n),
      std::vector<std::vector<long long>>(static_cast<std::size_t>(mu),
                                          std::vector<long long>(kBins, 0)));
  CounterRng root(seed);
  for (int v = 0; v < mu; ++v) {
    CounterRng stream = root.fork(static_cast<std::uint64_t>(v));
    for (long long s = 0; s < samples; ++s) {
      const auto art = gen_queries(cfg, v, stream.next_u64(), variant);
      for (int d = 0; d < cfg.n; ++d) {
        const auto h = harness_detail::fnv1a(
            canonical_query_encoding(art.plc_queries[static_cast<std::size_t>(d)]));
        ++table[static_cast<std::size_t>(d)][static_cast<std::size_t>(v)]
               [static_cast<std::size_t>(h % kBins)];
      }
    }
  }
  res.pass = true;
  for (int d = 0; d < cfg.n; ++d) {
    const auto& t = table[static_cast<std::size_t>(d)];
    std::vector<double> col_total(kBins, 0.0);
    double grand = 0.0;
    for (int v = 0; v < mu; ++v)
      for (int b = 0; b < kBins; ++b) {
        col_total[static_cast<std::size_t>(b)] += static_cast<double>(t[static_cast<std::size_t>(v)][static_cast<std::size_t>(b)]);
        grand += static_cast<double>(t[static_cast<std::size_t>(v)][static_cast<std::size_t>(b)]);
      }
    double stat = 0.0;
    int live_bins = 0;
    for (int b = 0; b < kBins; ++b) {
      if (col_total[static_cast<std::size_t>(b)] == 0.0) continue;
      ++live_bins;
      for (int v = 0; v < mu; ++v) {
        const double expected = col_total[static_cast<std::size_t>(b)] *
                                static_cast<double>(samples) / grand;
        const double got = static_cast<double>(t[static_cast<std::size_t>(v)][static_cast<std::size_t>(b)]);
        stat += (got - expected) * (got - expected) / expected;
      }
    }
    const int df = (mu - 1) * (live_bins - 1);
    double p = 1.0;
    if (df > 0) {
      const boost::math::chi_squared dist(df);
      p = boost::math::cdf(boost::math::complement(dist, stat));
    }
    res.p_values.push_back(p);
    if (p < res.min_p_value) res.min_p_value = p;
    if (p < significance) {
      res.pass = false;
      res.detail = "database " + std::to_string(d) + ": chi-square rejects homogeneity, p=" +
                   std::to_string(p);
    }
  }
  if (res.pass) res.detail = "chi-square does not reject at the requested significance";
  return res;
}

/// C_PC for two candidate functions with equal single entropies:
/// 2H / (H(M_1, M_2) + H).
inline double two_function_capacity(const MonomialSet& ms, const FiniteField& field,
                                    std::uint64_t bound = kDefaultEnumerationBound) {
  if (ms.mu() != 2) throw std::invalid_argument("two_function_capacity: needs exactly two functions");
  const double h1 = h_mono_single(ms.degrees().row(0), field).value_bits;
  const double h2 = h_mono_single(ms.degrees().row(1), field).value_bits;
  if (std::abs(h1 - h2) > 1e-9)
    throw std::invalid_argument("two_function_capacity: single-function entropies differ");
  const double h_joint = h_mono_set_bruteforce(ms, field, bound).value_bits;
  return 2.0 * h1 / (h_joint + h1);
}

}  // namespace pmc
