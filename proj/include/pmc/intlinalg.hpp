#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pmc/ffield.hpp"

namespace pmc {

using BigInt = boost::multiprecision::cpp_int;

using boost::multiprecision::abs;
using boost::multiprecision::gcd;
using boost::multiprecision::lcm;

/// Dense integer matrix with arbitrary-precision entries. Determinant
/// arithmetic on adversarial inputs must not overflow, so everything is
/// cpp_int end to end.
class IntMatrix {
 public:
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0)
      throw std::invalid_argument("IntMatrix: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(rows) * cols, BigInt(0));
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    if (rows.empty() || rows.front().empty())
      throw std::invalid_argument("IntMatrix: dimensions must be positive");
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows(); ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != m.cols())
        throw std::invalid_argument("IntMatrix: ragged rows");
      for (int j = 0; j < m.cols(); ++j)
        m.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  BigInt& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const BigInt& at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::vector<BigInt> row(int i) const {
    std::vector<BigInt> out(static_cast<std::size_t>(cols_));
    for (int j = 0; j < cols_; ++j) out[static_cast<std::size_t>(j)] = at(i, j);
    return out;
  }

  IntMatrix submatrix(const std::vector<int>& row_idx, const std::vector<int>& col_idx) const {
    IntMatrix m(static_cast<int>(row_idx.size()), static_cast<int>(col_idx.size()));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        m.at(i, j) = at(row_idx[static_cast<std::size_t>(i)], col_idx[static_cast<std::size_t>(j)]);
    return m;
  }

  bool operator==(const IntMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix: shape mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int l = 0; l < a.cols_; ++l) {
        if (a.at(i, l) == 0) continue;
        for (int j = 0; j < b.cols_; ++j) c.at(i, j) += a.at(i, l) * b.at(l, j);
      }
    return c;
  }

 private:
  int rows_, cols_;
  std::vector<BigInt> data_;
};

/// D = P * A * Q over Z with unimodular P, Q and nonnegative invariant
/// factors d_i forming a divisibility chain.
struct SmithDecomposition {
  IntMatrix d;
  IntMatrix p;
  IntMatrix q;
  std::vector<BigInt> invariant_factors;
};

/// Exact determinant by the Bareiss fraction-free algorithm.
inline BigInt determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const int n = a.rows();
  IntMatrix m = a;
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(swap_row, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

namespace lin_detail {

inline unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  unsigned long long r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<unsigned long long>(n - i) / (i + 1);
  return r;
}

// Visit all k-subsets of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

constexpr unsigned long long kMinorEnumerationLimit = 200000;

}  // namespace lin_detail

inline SmithDecomposition smith_normal_form(const IntMatrix& a);

/// gcd of all k x k minors, with the convention gcd(0,...,0) = 0.
/// Enumeration is combinatorial at harness scale; large matrices fall back
/// to the invariant-factor product identity g_k = d_1 * ... * d_k.
inline BigInt minors_gcd(const IntMatrix& a, int k) {
  const int bound = std::min(a.rows(), a.cols());
  if (k < 1 || k > bound) throw std::invalid_argument("minors_gcd: k out of range");
  const unsigned long long total =
      lin_detail::binomial(a.rows(), k) * lin_detail::binomial(a.cols(), k);
  if (total > lin_detail::kMinorEnumerationLimit) {
    const auto snf = smith_normal_form(a);
    BigInt g = 1;
    for (int i = 0; i < k; ++i) g *= snf.invariant_factors[static_cast<std::size_t>(i)];
    return g;
  }
  BigInt g = 0;
  lin_detail::for_each_combination(a.rows(), k, [&](const std::vector<int>& ri) {
    lin_detail::for_each_combination(a.cols(), k, [&](const std::vector<int>& ci) {
      g = gcd(g, abs(determinant(a.submatrix(ri, ci))));
    });
  });
  return g;
}

/// Smith normal form via elementary row/column operations with the minimal
/// absolute nonzero entry as pivot, tracking unimodular P and Q exactly.
inline SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const int s = a.rows(), t = a.cols();
  const int n = std::min(s, t);
  IntMatrix d = a;
  IntMatrix p = IntMatrix::identity(s);
  IntMatrix q = IntMatrix::identity(t);

  auto swap_rows = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < t; ++c) std::swap(d.at(i, c), d.at(j, c));
    for (int c = 0; c < s; ++c) std::swap(p.at(i, c), p.at(j, c));
  };
  auto swap_cols = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < s; ++r) std::swap(d.at(r, i), d.at(r, j));
    for (int r = 0; r < t; ++r) std::swap(q.at(r, i), q.at(r, j));
  };
  auto add_row = [&](int dst, int src, const BigInt& f) {
    for (int c = 0; c < t; ++c) d.at(dst, c) += f * d.at(src, c);
    for (int c = 0; c < s; ++c) p.at(dst, c) += f * p.at(src, c);
  };
  auto add_col = [&](int dst, int src, const BigInt& f) {
    for (int r = 0; r < s; ++r) d.at(r, dst) += f * d.at(r, src);
    for (int r = 0; r < t; ++r) q.at(r, dst) += f * q.at(r, src);
  };

  for (int i = 0; i < n; ++i) {
    while (true) {
      // smallest nonzero entry of the trailing submatrix becomes the pivot
      int pr = -1, pc = -1;
      BigInt best = 0;
      for (int r = i; r < s; ++r)
        for (int c = i; c < t; ++c) {
          if (d.at(r, c) == 0) continue;
          const BigInt m = abs(d.at(r, c));
          if (pr < 0 || m < best) {
            best = m;
            pr = r;
            pc = c;
          }
        }
      if (pr < 0) break;  // trailing submatrix zero; remaining factors are 0
      swap_rows(i, pr);
      swap_cols(i, pc);

      for (int r = i + 1; r < s; ++r)
        if (d.at(r, i) != 0) add_row(r, i, -(d.at(r, i) / d.at(i, i)));
      for (int c = i + 1; c < t; ++c)
        if (d.at(i, c) != 0) add_col(c, i, -(d.at(i, c) / d.at(i, i)));

      bool clean = true;
      for (int r = i + 1; r < s && clean; ++r) clean = d.at(r, i) == 0;
      for (int c = i + 1; c < t && clean; ++c) clean = d.at(i, c) == 0;
      if (!clean) continue;  // remainders left behind; pick a smaller pivot

      // pivot must divide the rest of the trailing submatrix
      int br = -1;
      for (int r = i + 1; r < s && br < 0; ++r)
        for (int c = i + 1; c < t; ++c)
          if (d.at(r, c) % d.at(i, i) != 0) {
            br = r;
            break;
          }
      if (br < 0) break;
      add_row(i, br, 1);
    }
    if (d.at(i, i) < 0) {  // canonical sign: P absorbs it
      for (int c = 0; c < t; ++c) d.at(i, c) = -d.at(i, c);
      for (int c = 0; c < s; ++c) p.at(i, c) = -p.at(i, c);
    }
  }

  std::vector<BigInt> factors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) factors[static_cast<std::size_t>(i)] = d.at(i, i);
  return SmithDecomposition{std::move(d), std::move(p), std::move(q), std::move(factors)};
}

inline std::vector<BigInt> invariant_factors(const IntMatrix& a) {
  return smith_normal_form(a).invariant_factors;
}

/// Rank over Z: number of nonzero invariant factors.
inline int rank_int(const IntMatrix& a) {
  const auto f = invariant_factors(a);
  int r = 0;
  for (const auto& d : f)
    if (d != 0) ++r;
  return r;
}

/// Rank over Z_m in the literal largest-nonzero-minor sense: the largest k
/// such that some k x k minor is nonzero mod m, i.e. m does not divide g_k.
/// (Not a free-module rank; Z_m has zero divisors.)
inline int rank_mod(const IntMatrix& a, const BigInt& m) {
  if (m <= 1) throw std::invalid_argument("rank_mod: modulus must exceed 1");
  const auto f = invariant_factors(a);
  BigInt g = 1;
  int r = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    g *= f[i];
    if (g % m != 0) r = static_cast<int>(i) + 1;
  }
  return r;
}

/// Rank over F_q by Gaussian elimination on the mod-p image of A.
inline int rank_ffield(const IntMatrix& a, const FiniteField& field) {
  const int s = a.rows(), t = a.cols();
  const BigInt p = field.p();
  std::vector<std::vector<FieldElement>> m(
      static_cast<std::size_t>(s), std::vector<FieldElement>(static_cast<std::size_t>(t)));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < t; ++j) {
      BigInt r = a.at(i, j) % p;
      if (r < 0) r += p;
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          field.element(r.convert_to<std::uint32_t>());
    }
  int rank = 0;
  for (int col = 0; col < t && rank < s; ++col) {
    int pivot = -1;
    for (int r = rank; r < s; ++r)
      if (!m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[static_cast<std::size_t>(pivot)], m[static_cast<std::size_t>(rank)]);
    const FieldElement scale =
        field.inv(m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)]);
    for (int r = rank + 1; r < s; ++r) {
      const FieldElement f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (f.is_zero()) continue;
      const FieldElement factor = field.mul(f, scale);
      for (int c = col; c < t; ++c) {
        auto& dst = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        dst = field.sub(dst, field.mul(factor,
                                       m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)]));
      }
    }
    ++rank;
  }
  return rank;
}

/// multiplier * target = sum_j coefficients[j] * row_j(B), all over Z,
/// with multiplier >= 1. multiplier == 1 is an exact integer combination.
struct RowCombination {
  BigInt multiplier;
  std::vector<BigInt> coefficients;
};

/// Solve x * B = target over the rationals via the Smith normal form of B,
/// then clear denominators. Returns nullopt when target is outside the
/// rational row span. Free variables are pinned to zero, so the result is
/// canonical; when B has independent rows the multiplier is minimal.
inline std::optional<RowCombination> solve_row_combination(const IntMatrix& b,
                                                           const std::vector<BigInt>& target) {
  const int s = b.rows(), t = b.cols();
  if (static_cast<int>(target.size()) != t)
    throw std::invalid_argument("solve_row_combination: length mismatch");
  const auto snf = smith_normal_form(b);
  // w = target * Q
  std::vector<BigInt> w(static_cast<std::size_t>(t), 0);
  for (int j = 0; j < t; ++j)
    for (int l = 0; l < t; ++l)
      w[static_cast<std::size_t>(j)] += target[static_cast<std::size_t>(l)] * snf.q.at(l, j);

  const int n = std::min(s, t);
  std::vector<BigInt> z_num(static_cast<std::size_t>(s), 0);
  std::vector<BigInt> z_den(static_cast<std::size_t>(s), 1);
  for (int j = 0; j < t; ++j) {
    if (j < n && snf.d.at(j, j) != 0) {
      const BigInt g = gcd(abs(w[static_cast<std::size_t>(j)]), snf.d.at(j, j));
      z_num[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] / g;
      z_den[static_cast<std::size_t>(j)] = snf.d.at(j, j) / g;
    } else if (w[static_cast<std::size_t>(j)] != 0) {
      return std::nullopt;
    }
  }
  // x = z * P, assembled over a common denominator
  BigInt den = 1;
  for (int j = 0; j < s; ++j) den = lcm(den, z_den[static_cast<std::size_t>(j)]);
  std::vector<BigInt> x(static_cast<std::size_t>(s), 0);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      x[static_cast<std::size_t>(i)] += z_num[static_cast<std::size_t>(j)] *
                                        (den / z_den[static_cast<std::size_t>(j)]) * snf.p.at(j, i);
  BigInt g = den;
  for (const auto& c : x) g = gcd(g, abs(c));
  if (g > 1) {
    den /= g;
    for (auto& c : x) c /= g;
  }
  if (den < 0) {
    den = -den;
    for (auto& c : x) c = -c;
  }
  return RowCombination{den, std::move(x)};
}

/// If row i lies in the Z-span of the other rows, the integer coefficients
/// expressing it; absent otherwise. Index is zero-based.
inline std::optional<std::vector<BigInt>> integer_row_dependency(const IntMatrix& a, int i) {
  if (i < 0 || i >= a.rows()) throw std::invalid_argument("integer_row_dependency: bad row");
  const auto target = a.row(i);
  if (a.rows() == 1) {
    for (const auto& v : target)
      if (v != 0) return std::nullopt;
    return std::vector<BigInt>{};
  }
  std::vector<int> others;
  for (int r = 0; r < a.rows(); ++r)
    if (r != i) others.push_back(r);
  std::vector<int> all_cols(static_cast<std::size_t>(a.cols()));
  for (int c = 0; c < a.cols(); ++c) all_cols[static_cast<std::size_t>(c)] = c;
  const IntMatrix b = a.submatrix(others, all_cols);
  const auto comb = solve_row_combination(b, target);
  if (!comb || comb->multiplier != 1) return std::nullopt;
  return comb->coefficients;
}

/// Is A x == b (mod m) solvable? Tested through the Smith form: with
/// u = P b, each congruence d_i y == u_i (mod m) needs gcd(d_i, m) | u_i.
inline bool solvable_mod(const IntMatrix& a, const std::vector<BigInt>& b, const BigInt& m) {
  if (m < 1) throw std::invalid_argument("solvable_mod: modulus must be positive");
  if (static_cast<int>(b.size()) != a.rows())
    throw std::invalid_argument("solvable_mod: length mismatch");
  if (m == 1) return true;
  const auto snf = smith_normal_form(a);
  const int s = a.rows();
  const int n = std::min(a.rows(), a.cols());
  for (int i = 0; i < s; ++i) {
    BigInt u = 0;
    for (int j = 0; j < s; ++j) u += snf.p.at(i, j) * b[static_cast<std::size_t>(j)];
    const BigInt d = i < n ? snf.d.at(i, i) : BigInt(0);
    const BigInt g = gcd(d == 0 ? m : gcd(abs(d), m), m);
    if (u % g != 0) return false;
  }
  return true;
}

/// Canonical maximal independent row set: scan rows in order, keep a row
/// whenever it raises the rank of the kept set.
inline std::vector<int> greedy_row_basis(const IntMatrix& a) {
  std::vector<int> kept;
  std::vector<int> all_cols(static_cast<std::size_t>(a.cols()));
  for (int c = 0; c < a.cols(); ++c) all_cols[static_cast<std::size_t>(c)] = c;
  int rank = 0;
  for (int r = 0; r < a.rows(); ++r) {
    std::vector<int> cand = kept;
    cand.push_back(r);
    const int new_rank = rank_int(a.submatrix(cand, all_cols));
    if (new_rank > rank) {
      kept = std::move(cand);
      rank = new_rank;
    }
  }
  return kept;
}

}  // namespace pmc
