#pragma once

// Exact integer Smith normal form. The driver runs a machine-word pass with
// overflow checking and falls back to GMP integers when the coefficients
// outgrow it; callers always receive exact ranks and invariant factors.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <gmpxx.h>

namespace akh {

struct SnfOverflow : std::runtime_error {
  SnfOverflow() : std::runtime_error("integer overflow during reduction") {}
};

namespace detail {

// Checked 64-bit integer; arithmetic throws SnfOverflow instead of wrapping.
struct CheckedInt {
  long long v = 0;
  CheckedInt() = default;
  CheckedInt(long long x) : v(x) {}
  friend CheckedInt operator+(CheckedInt a, CheckedInt b) {
    long long r;
    if (__builtin_add_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend CheckedInt operator-(CheckedInt a, CheckedInt b) {
    long long r;
    if (__builtin_sub_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend CheckedInt operator*(CheckedInt a, CheckedInt b) {
    long long r;
    if (__builtin_mul_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend CheckedInt operator/(CheckedInt a, CheckedInt b) { return a.v / b.v; }
  friend CheckedInt operator%(CheckedInt a, CheckedInt b) { return a.v % b.v; }
  friend CheckedInt operator-(CheckedInt a) {
    if (a.v == std::numeric_limits<long long>::min()) throw SnfOverflow();
    return -a.v;
  }
  friend bool operator==(CheckedInt a, CheckedInt b) { return a.v == b.v; }
  friend bool operator!=(CheckedInt a, CheckedInt b) { return a.v != b.v; }
  friend bool operator<(CheckedInt a, CheckedInt b) { return a.v < b.v; }
};

inline CheckedInt abs_of(CheckedInt a) { return a.v < 0 ? -a : a; }
inline mpz_class abs_of(const mpz_class& a) { return abs(a); }
inline bool is_zero(CheckedInt a) { return a.v == 0; }
inline bool is_zero(const mpz_class& a) { return a == 0; }
inline bool is_neg(CheckedInt a) { return a.v < 0; }
inline bool is_neg(const mpz_class& a) { return a < 0; }

template <class T>
struct SnfState {
  int m, n;
  std::vector<std::vector<T>> a;
  std::vector<std::vector<T>> left;  // accumulated row transform, optional
  bool want_left = false;

  void row_swap(int i, int j) {
    std::swap(a[i], a[j]);
    if (want_left) std::swap(left[i], left[j]);
  }
  void col_swap(int i, int j) {
    for (auto& row : a) std::swap(row[i], row[j]);
  }
  void row_add(int dst, int src, T factor) {  // row dst += factor * row src
    for (int j = 0; j < n; ++j) a[dst][j] = a[dst][j] + factor * a[src][j];
    if (want_left)
      for (int j = 0; j < m; ++j) left[dst][j] = left[dst][j] + factor * left[src][j];
  }
  void col_add(int dst, int src, T factor) {
    for (int i = 0; i < m; ++i) a[i][dst] = a[i][dst] + factor * a[i][src];
  }
  void row_negate(int i) {
    for (int j = 0; j < n; ++j) a[i][j] = -a[i][j];
    if (want_left)
      for (int j = 0; j < m; ++j) left[i][j] = -left[i][j];
  }
};

template <class T>
void snf_reduce(SnfState<T>& s) {
  const int m = s.m, n = s.n;
  int lim = std::min(m, n);
  for (int t = 0; t < lim; ++t) {
    while (true) {
      // Pivot: nonzero entry of least magnitude in the trailing submatrix.
      int pi = -1, pj = -1;
      T best{};
      for (int i = t; i < m; ++i)
        for (int j = t; j < n; ++j) {
          if (is_zero(s.a[i][j])) continue;
          T mag = abs_of(s.a[i][j]);
          if (pi < 0 || mag < best) {
            best = mag;
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) return;  // trailing submatrix is zero
      if (pi != t) s.row_swap(t, pi);
      if (pj != t) s.col_swap(t, pj);

      bool dirty = false;
      for (int i = t + 1; i < m; ++i) {
        if (is_zero(s.a[i][t])) continue;
        T q = s.a[i][t] / s.a[t][t];
        if (!is_zero(q)) s.row_add(i, t, -q);
        if (!is_zero(s.a[i][t])) dirty = true;
      }
      for (int j = t + 1; j < n; ++j) {
        if (is_zero(s.a[t][j])) continue;
        T q = s.a[t][j] / s.a[t][t];
        if (!is_zero(q)) s.col_add(j, t, -q);
        if (!is_zero(s.a[t][j])) dirty = true;
      }
      if (dirty) continue;

      // Column and row are clear; enforce divisibility of the remainder.
      int bi = -1, bj = -1;
      for (int i = t + 1; i < m && bi < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (!is_zero(s.a[i][j] % s.a[t][t])) {
            bi = i;
            bj = j;
            break;
          }
      if (bi >= 0) {
        s.row_add(t, bi, T(1));
        continue;
      }
      break;
    }
    if (is_neg(s.a[t][t])) s.row_negate(t);
  }
}

}  // namespace detail

struct SnfResult {
  int rank = 0;
  std::vector<long long> factors;  // positive, each dividing the next; length = rank
};

// Smith normal form of a dense integer matrix (entries given as long long).
inline SnfResult smith_normal_form(const std::vector<std::vector<long long>>& a) {
  const int m = static_cast<int>(a.size());
  const int n = m ? static_cast<int>(a[0].size()) : 0;
  SnfResult out;
  if (m == 0 || n == 0) return out;

  auto extract = [&](auto& st) {
    for (int t = 0; t < std::min(m, n); ++t) {
      if (detail::is_zero(st.a[t][t])) break;
      ++out.rank;
      if constexpr (std::is_same_v<std::decay_t<decltype(st.a[t][t])>, detail::CheckedInt>) {
        out.factors.push_back(st.a[t][t].v);
      } else {
        if (!st.a[t][t].fits_slong_p())
          throw std::runtime_error("invariant factor exceeds 64 bits");
        out.factors.push_back(st.a[t][t].get_si());
      }
    }
  };

  try {
    detail::SnfState<detail::CheckedInt> st;
    st.m = m;
    st.n = n;
    st.a.assign(m, std::vector<detail::CheckedInt>(n));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) st.a[i][j] = a[i][j];
    detail::snf_reduce(st);
    extract(st);
    return out;
  } catch (const SnfOverflow&) {
    out = SnfResult{};
    detail::SnfState<mpz_class> st;
    st.m = m;
    st.n = n;
    st.a.assign(m, std::vector<mpz_class>(n));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) st.a[i][j] = static_cast<long>(a[i][j]);
    detail::snf_reduce(st);
    extract(st);
    return out;
  }
}

inline int integer_rank(const std::vector<std::vector<long long>>& a) {
  return smith_normal_form(a).rank;
}

// Is z in the integer column span of A? Solves via L*A*R = D with the row
// transform L: A x = z iff (Lz)_i is divisible by d_i for i < rank and zero
// beyond. Runs over GMP integers; transform growth is harmless at this scale.
inline bool in_integer_image(const std::vector<std::vector<long long>>& a,
                             const std::vector<long long>& z) {
  const int m = static_cast<int>(a.size());
  const int n = m ? static_cast<int>(a[0].size()) : 0;
  if (m == 0) return true;
  detail::SnfState<mpz_class> st;
  st.m = m;
  st.n = n;
  st.want_left = true;
  st.a.assign(m, std::vector<mpz_class>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) st.a[i][j] = static_cast<long>(a[i][j]);
  st.left.assign(m, std::vector<mpz_class>(m, 0));
  for (int i = 0; i < m; ++i) st.left[i][i] = 1;
  if (n > 0) detail::snf_reduce(st);
  int rank = 0;
  for (int t = 0; t < std::min(m, n); ++t) {
    if (st.a[t][t] == 0) break;
    ++rank;
  }
  for (int i = 0; i < m; ++i) {
    mpz_class y = 0;
    for (int j = 0; j < m; ++j) y += st.left[i][j] * static_cast<long>(z[j]);
    if (i < rank) {
      if (y % st.a[i][i] != 0) return false;
    } else {
      if (y != 0) return false;
    }
  }
  return true;
}

}  // namespace akh
