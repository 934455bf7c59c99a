#pragma once

#include <nlohmann/json.hpp>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmc/entropy.hpp"
#include "pmc/harness.hpp"
#include "pmc/scheme.hpp"

namespace pmc {

using nlohmann::json;

struct FieldSpec {
  std::uint32_t p = 0;
  std::uint32_t k = 0;
};

/// Factor q as p^k, or report that it is not a prime power.
inline std::optional<FieldSpec> factor_prime_power(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  std::uint32_t k = 0;
  std::uint64_t rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++k;
  }
  if (rest != 1) return std::nullopt;
  return FieldSpec{static_cast<std::uint32_t>(p), k};
}

/// Accepts "p^k" or a plain prime power like "1024".
inline FieldSpec parse_field_spec(const std::string& text) {
  const auto caret = text.find('^');
  try {
    if (caret == std::string::npos) {
      const auto spec = factor_prime_power(std::stoull(text));
      if (!spec) throw std::invalid_argument("not a prime power");
      return *spec;
    }
    const unsigned long p = std::stoul(text.substr(0, caret));
    const unsigned long k = std::stoul(text.substr(caret + 1));
    if (!ffdetail::is_prime(p)) throw std::invalid_argument("base is not prime");
    if (k == 0) throw std::invalid_argument("zero extension degree");
    return FieldSpec{static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k)};
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("invalid field spec '" + text + "': expected p^k with p prime");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("invalid field spec '" + text + "': value out of range");
  }
}

inline std::string field_spec_string(const FiniteField& f) {
  return std::to_string(f.p()) + "^" + std::to_string(f.k());
}

// --- matrices ---------------------------------------------------------------

inline IntMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected array of arrays");
  std::vector<std::vector<long long>> rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty())
      throw std::invalid_argument("matrix: expected array of arrays");
    std::vector<long long> r;
    for (const auto& e : row) {
      if (!e.is_number_integer()) throw std::invalid_argument("matrix: entries must be integers");
      r.push_back(e.get<long long>());
    }
    rows.push_back(std::move(r));
  }
  return IntMatrix::from_rows(rows);
}

inline IntMatrix matrix_from_string(const std::string& text) {
  return matrix_from_json(json::parse(text));
}

inline json matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).convert_to<long long>());
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- entropy results ---------------------------------------------------------

inline void to_json(json& j, const EntropyResult& r) {
  j = json{{"value_bits", r.value_bits}, {"method", to_string(r.method)}};
  j["value_qary"] = r.value_qary ? json(*r.value_qary) : json(nullptr);
}

inline void from_json(const json& j, EntropyResult& r) {
  j.at("value_bits").get_to(r.value_bits);
  const std::string m = j.at("method").get<std::string>();
  if (m == "formula")
    r.method = EntropyMethod::formula;
  else if (m == "brute_force")
    r.method = EntropyMethod::brute_force;
  else if (m == "decomposition")
    r.method = EntropyMethod::decomposition;
  else
    throw std::invalid_argument("EntropyResult: unknown method '" + m + "'");
  if (j.contains("value_qary") && !j.at("value_qary").is_null())
    r.value_qary = j.at("value_qary").get<double>();
  else
    r.value_qary.reset();
}

// --- Smith normal form -------------------------------------------------------

struct SnfRecord {
  json matrix;
  std::vector<long long> invariant_factors;
  json d, p, q;
  int rank = 0;
};

inline SnfRecord make_snf_record(const IntMatrix& a) {
  const auto snf = smith_normal_form(a);
  SnfRecord rec;
  rec.matrix = matrix_to_json(a);
  for (const auto& f : snf.invariant_factors)
    rec.invariant_factors.push_back(f.convert_to<long long>());
  rec.d = matrix_to_json(snf.d);
  rec.p = matrix_to_json(snf.p);
  rec.q = matrix_to_json(snf.q);
  rec.rank = rank_int(a);
  return rec;
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SnfRecord, matrix, invariant_factors, d, p, q, rank)

// --- transcripts -------------------------------------------------------------

struct TranscriptRecord {
  int n = 0, mu = 0, f = 0;
  std::string field;
  json matrix;
  int v = 0;
  std::uint64_t storage_seed = 0;
  std::uint64_t randomness_seed = 0;
  std::string mode;
  std::vector<int> per_db_downloaded;
  int uploaded_requests = 0;
  bool decode_ok = false;
  std::string decode_failure;
  std::vector<std::string> decoded;  // canonical coefficient strings
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TranscriptRecord, n, mu, f, field, matrix, v, storage_seed,
                                   randomness_seed, mode, per_db_downloaded, uploaded_requests,
                                   decode_ok, decode_failure, decoded)

inline TranscriptRecord make_transcript_record(const SchemeConfig& cfg, const Transcript& t) {
  TranscriptRecord rec;
  rec.n = cfg.n;
  rec.mu = cfg.mu();
  rec.f = cfg.f();
  rec.field = field_spec_string(*cfg.field);
  rec.matrix = matrix_to_json(cfg.ms.degrees());
  rec.v = t.v;
  rec.storage_seed = t.storage_seed;
  rec.randomness_seed = t.randomness_seed;
  rec.mode = to_string(t.mode);
  rec.per_db_downloaded = t.per_db_downloaded;
  rec.uploaded_requests = t.uploaded_requests;
  rec.decode_ok = t.decoded.ok;
  rec.decode_failure = t.decoded.failure;
  for (const FieldElement e : t.decoded.f_v) rec.decoded.push_back(cfg.field->to_string(e));
  return rec;
}

// --- experiment reports ------------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExperimentReport, n, mu, f, r, lambda, q, field_spec, trials,
                                   empirical_avg_download_qary, avg_download_stderr,
                                   min_func_entropy_qary, empirical_rate, rate_stderr,
                                   mode_freq_pir, mode_freq_multiplicative, decode_failure_rate,
                                   avg_uploaded_requests, c_pir_r, c_pir_mu, predicted_cost)

inline std::string report_csv_header() {
  return "q,n,mu,r,trials,avg_cost,rate,c_pir_r,failure_rate";
}

inline std::string report_csv_row(const ExperimentReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << r.q << ',' << r.n << ',' << r.mu << ',' << r.r << ',' << r.trials << ','
     << r.empirical_avg_download_qary << ',' << r.empirical_rate << ',' << r.c_pir_r << ','
     << r.decode_failure_rate;
  return os.str();
}

}  // namespace pmc
