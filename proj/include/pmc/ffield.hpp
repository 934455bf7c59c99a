#pragma once

#include <compare>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmc {

/// Element of a finite field, stored as its canonical code
/// sum_i c_i * p^i over the coefficient vector (c_0, ..., c_{k-1}).
struct FieldElement {
  std::uint32_t code = 0;
  auto operator<=>(const FieldElement&) const = default;
  bool is_zero() const { return code == 0; }
};

namespace ffdetail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint32_t> prime_factors(std::uint32_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Polynomials over F_p as coefficient vectors, low degree first, no
// trailing-zero guarantee required. Only used during field construction.
using Poly = std::vector<std::uint32_t>;

inline int degree(const Poly& f) {
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
    if (f[static_cast<std::size_t>(i)] != 0) return i;
  return -1;
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = static_cast<std::uint32_t>(
          (c[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  }
  return c;
}

inline std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
  // p prime, a != 0 mod p
  std::uint64_t r = 1, base = a % p;
  std::uint32_t e = p - 2;
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

// Remainder of a modulo monic divisor d.
inline Poly poly_rem(Poly a, const Poly& d, std::uint32_t p) {
  const int dd = degree(d);
  for (int i = degree(a); i >= dd && i >= 0; i = degree(a)) {
    const std::uint32_t coef = a[static_cast<std::size_t>(i)];
    if (coef == 0) continue;
    for (int j = 0; j <= dd; ++j) {
      auto& t = a[static_cast<std::size_t>(i - dd + j)];
      t = static_cast<std::uint32_t>(
          (t + static_cast<std::uint64_t>(p - 1) * coef % p * d[static_cast<std::size_t>(j)]) % p);
    }
  }
  return a;
}

inline bool divides(const Poly& d, const Poly& a, std::uint32_t p) {
  return degree(poly_rem(a, d, p)) < 0;
}

}  // namespace ffdetail

/// F_{p^k} with tabulated discrete logarithm relative to a fixed generator.
/// Construction is deterministic: lexicographically smallest monic
/// irreducible modulus (coefficients compared low degree first) and the
/// generator with the smallest canonical code. Immutable once built.
class FiniteField {
 public:
  static constexpr std::uint32_t kDefaultTableBound = 1u << 22;

  FiniteField(std::uint32_t p, std::uint32_t k,
              std::uint32_t table_bound = kDefaultTableBound) {
    if (!ffdetail::is_prime(p)) throw std::invalid_argument("FiniteField: p is not prime");
    if (k == 0) throw std::invalid_argument("FiniteField: k must be positive");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
      q *= p;
      if (q > table_bound)
        throw std::invalid_argument("FiniteField: p^k exceeds the dlog table bound");
    }
    p_ = p;
    k_ = k;
    q_ = static_cast<std::uint32_t>(q);
    modulus_ = find_modulus();
    build_tables();
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t k() const { return k_; }
  std::uint32_t q() const { return q_; }
  /// Modulus coefficients c_0..c_k, low degree first, monic.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1}; }
  FieldElement generator() const { return {generator_}; }

  FieldElement element(std::uint32_t code) const {
    if (code >= q_) throw std::out_of_range("FiniteField: element code out of range");
    return {code};
  }

  /// Embed an integer through the prime subfield (reduction mod p).
  FieldElement from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += p_;
    return {static_cast<std::uint32_t>(r)};
  }

  std::vector<std::uint32_t> coefficients(FieldElement x) const {
    std::vector<std::uint32_t> c(k_);
    std::uint32_t code = x.code;
    for (std::uint32_t i = 0; i < k_; ++i) {
      c[i] = code % p_;
      code /= p_;
    }
    return c;
  }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint32_t out = 0, mul = 1, ca = a.code, cb = b.code;
    for (std::uint32_t i = 0; i < k_; ++i) {
      out += (ca % p_ + cb % p_) % p_ * mul;
      ca /= p_;
      cb /= p_;
      mul *= p_;
    }
    return {out};
  }

  FieldElement neg(FieldElement a) const {
    std::uint32_t out = 0, mul = 1, ca = a.code;
    for (std::uint32_t i = 0; i < k_; ++i) {
      const std::uint32_t d = ca % p_;
      out += (d == 0 ? 0 : p_ - d) * mul;
      ca /= p_;
      mul *= p_;
    }
    return {out};
  }

  FieldElement sub(FieldElement a, FieldElement b) const { return add(a, neg(b)); }

  FieldElement mul(FieldElement a, FieldElement b) const {
    if (a.is_zero() || b.is_zero()) return {0};
    const std::uint64_t l =
        (static_cast<std::uint64_t>(dlog_table_[a.code]) + dlog_table_[b.code]) % order();
    return {exp_table_[l]};
  }

  FieldElement inv(FieldElement a) const {
    if (a.is_zero()) throw std::domain_error("FiniteField: inverse of zero");
    const std::uint64_t l = (order() - dlog_table_[a.code]) % order();
    return {exp_table_[l]};
  }

  FieldElement pow(FieldElement a, long long e) const {
    if (a.is_zero()) {
      if (e > 0) return {0};
      if (e == 0) return {1};
      throw std::domain_error("FiniteField: negative power of zero");
    }
    const long long m = static_cast<long long>(order());
    const std::uint64_t r = static_cast<std::uint64_t>(((e % m) + m) % m);
    return {exp_table_[dlog_table_[a.code] * r % order()]};
  }

  /// Discrete logarithm in Z_{q-1}; undefined (throws) at zero.
  std::uint32_t dlog(FieldElement x) const {
    if (x.is_zero()) throw std::domain_error("FiniteField: dlog of zero");
    return dlog_table_[x.code];
  }

  /// generator^l for l taken mod q-1.
  FieldElement exp(std::uint64_t l) const { return {exp_table_[l % order()]}; }

  std::uint32_t order() const { return q_ - 1; }  // multiplicative group order

  /// Canonical textual form: comma-separated coefficients, low degree first.
  std::string to_string(FieldElement x) const {
    const auto c = coefficients(x);
    std::ostringstream os;
    for (std::uint32_t i = 0; i < k_; ++i) {
      if (i) os << ',';
      os << c[i];
    }
    return os.str();
  }

  FieldElement parse(const std::string& text) const {
    std::istringstream is(text);
    std::uint32_t code = 0, mul = 1;
    std::string tok;
    std::uint32_t i = 0;
    while (std::getline(is, tok, ',')) {
      if (i >= k_) throw std::invalid_argument("FiniteField: too many coefficients");
      const unsigned long v = std::stoul(tok);
      if (v >= p_) throw std::invalid_argument("FiniteField: coefficient out of range");
      code += static_cast<std::uint32_t>(v) * mul;
      mul *= p_;
      ++i;
    }
    if (i != k_) throw std::invalid_argument("FiniteField: wrong coefficient count");
    return {code};
  }

  bool operator==(const FiniteField& o) const {
    return p_ == o.p_ && k_ == o.k_ && q_ == o.q_ && modulus_ == o.modulus_ &&
           generator_ == o.generator_ && exp_table_ == o.exp_table_ &&
           dlog_table_ == o.dlog_table_;
  }

 private:
  using Poly = ffdetail::Poly;

  Poly find_modulus() const {
    // Candidates are monic of degree k, scanned in lexicographic order of
    // (c_0, ..., c_{k-1}). Trial division against every monic polynomial of
    // degree <= k/2 is exhaustive at table-bound scale.
    std::vector<Poly> divisors;
    for (std::uint32_t d = 1; d <= k_ / 2; ++d) {
      // all monic polynomials of degree d
      std::uint64_t count = 1;
      for (std::uint32_t i = 0; i < d; ++i) count *= p_;
      for (std::uint64_t enc = 0; enc < count; ++enc) {
        Poly f(d + 1, 0);
        std::uint64_t e = enc;
        for (std::uint32_t i = 0; i < d; ++i) {
          f[i] = static_cast<std::uint32_t>(e % p_);
          e /= p_;
        }
        f[d] = 1;
        divisors.push_back(std::move(f));
      }
    }
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < k_; ++i) count *= p_;
    for (std::uint64_t lex = 0; lex < count; ++lex) {
      Poly f(k_ + 1, 0);
      // c_0 varies slowest: low-degree-first lexicographic order
      std::uint64_t e = lex;
      for (int i = static_cast<int>(k_) - 1; i >= 0; --i) {
        f[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(e % p_);
        e /= p_;
      }
      f[k_] = 1;
      bool irreducible = true;
      for (const auto& d : divisors) {
        if (ffdetail::divides(d, f, p_)) {
          irreducible = false;
          break;
        }
      }
      if (irreducible) return f;
    }
    throw std::logic_error("FiniteField: no irreducible modulus found");  // unreachable
  }

  Poly decode(std::uint32_t code) const {
    Poly c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
      c[i] = code % p_;
      code /= p_;
    }
    return c;
  }

  std::uint32_t encode(const Poly& c) const {
    std::uint32_t code = 0, mul = 1;
    for (std::uint32_t i = 0; i < k_; ++i) {
      code += (i < c.size() ? c[i] % p_ : 0) * mul;
      mul *= p_;
    }
    return code;
  }

  std::uint32_t mul_slow(std::uint32_t a, std::uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return encode(ffdetail::poly_rem(ffdetail::poly_mul(decode(a), decode(b), p_), modulus_, p_));
  }

  std::uint32_t pow_slow(std::uint32_t a, std::uint32_t e) const {
    std::uint32_t r = 1;
    while (e) {
      if (e & 1) r = mul_slow(r, a);
      a = mul_slow(a, a);
      e >>= 1;
    }
    return r;
  }

  void build_tables() {
    const std::uint32_t n = order();
    const auto factors = ffdetail::prime_factors(n);
    generator_ = 0;
    for (std::uint32_t cand = 1; cand < q_; ++cand) {
      bool primitive = true;
      for (const std::uint32_t ell : factors) {
        if (pow_slow(cand, n / ell) == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) {
        generator_ = cand;
        break;
      }
    }
    if (generator_ == 0) throw std::logic_error("FiniteField: no generator found");

    exp_table_.assign(n, 0);
    dlog_table_.assign(q_, 0);
    std::uint32_t x = 1;
    for (std::uint32_t l = 0; l < n; ++l) {
      exp_table_[l] = x;
      dlog_table_[x] = l;
      x = mul_slow(x, generator_);
    }
    if (x != 1) throw std::logic_error("FiniteField: generator order mismatch");
  }

  std::uint32_t p_ = 0, k_ = 0, q_ = 0;
  Poly modulus_;
  std::uint32_t generator_ = 0;
  std::vector<std::uint32_t> exp_table_;
  std::vector<std::uint32_t> dlog_table_;
};

/// Convenience constructor mirroring the library's public entry point.
inline FiniteField make_field(std::uint32_t p, std::uint32_t k,
                              std::uint32_t table_bound = FiniteField::kDefaultTableBound) {
  return FiniteField(p, k, table_bound);
}

}  // namespace pmc
