#pragma once

// Integer homology of the assembled complex. Every computation runs on the
// (i, q, k)-graded blocks (the differential preserves q and k), so the Smith
// normal forms stay small; the (i, k) view aggregates the q blocks, merging
// torsion by prime powers so the invariant-factor chain survives.

#include <map>
#include <numeric>
#include <set>

#include "complex.hpp"
#include "snf.hpp"

namespace akh {

struct HomologyEntry {
  long long rank = 0;
  std::vector<long long> torsion;  // invariant factors > 1, each dividing the next
  bool is_zero() const { return rank == 0 && torsion.empty(); }
};

struct HomologyTable {
  bool per_q = false;
  // key: (k, i, q); q = 0 and unused when !per_q. Sorted by (k, i, q).
  std::map<std::tuple<int, int, int>, HomologyEntry> entries;

  const HomologyEntry* find(int i, int k, int q = 0) const {
    auto it = entries.find({k, i, q});
    return it == entries.end() ? nullptr : &it->second;
  }
  long long rank(int i, int k, int q = 0) const {
    const HomologyEntry* e = find(i, k, q);
    return e ? e->rank : 0;
  }
  long long rank_at_k(int k) const {
    long long r = 0;
    for (const auto& [key, e] : entries)
      if (std::get<0>(key) == k) r += e.rank;
    return r;
  }
  bool nonzero_at_k(int k) const {
    for (const auto& [key, e] : entries)
      if (std::get<0>(key) == k && !e.is_zero()) return true;
    return false;
  }
};

namespace detail {

// Dense (i -> i+1) block of one q-slice of a k-graded complex.
struct QBlock {
  std::vector<int> src;  // generator indices in kc.gens[i]
  std::vector<int> tgt;  // generator indices in kc.gens[i+1]
  std::vector<std::vector<long long>> mat;  // rows = tgt, cols = src
};

inline QBlock q_block(const KComplex& kc, int i, int q) {
  QBlock b;
  std::map<int, int> tgt_pos;
  for (int g = 0; g < static_cast<int>(kc.gens[i].size()); ++g)
    if (kc.gens[i][g].q == q) b.src.push_back(g);
  for (int g = 0; g < static_cast<int>(kc.gens[i + 1].size()); ++g)
    if (kc.gens[i + 1][g].q == q) {
      tgt_pos[g] = static_cast<int>(b.tgt.size());
      b.tgt.push_back(g);
    }
  std::map<int, int> src_pos;
  for (int s = 0; s < static_cast<int>(b.src.size()); ++s) src_pos[b.src[s]] = s;
  b.mat.assign(b.tgt.size(), std::vector<long long>(b.src.size(), 0));
  for (const auto& e : kc.d[i].entries) {
    auto sit = src_pos.find(e.col);
    if (sit == src_pos.end()) continue;
    auto tit = tgt_pos.find(e.row);
    AKH_REQUIRE(tit != tgt_pos.end(), "differential does not preserve q");
    b.mat[tit->second][sit->second] += e.value;
  }
  return b;
}

inline std::vector<long long> factorize(long long x) {
  std::vector<long long> out;
  for (long long p = 2; p * p <= x; ++p)
    while (x % p == 0) {
      out.push_back(p);
      x /= p;
    }
  if (x > 1) out.push_back(x);
  return out;
}

// Invariant factors of a direct sum of cyclic groups given by per-summand
// invariant factor lists.
inline std::vector<long long> merge_invariant_factors(const std::vector<long long>& all) {
  std::map<long long, std::vector<int>> exps;  // prime -> exponents, one per factor
  for (long long f : all) {
    std::map<long long, int> e;
    for (long long p : factorize(f)) ++e[p];
    for (auto& [p, k] : e) exps[p].push_back(k);
  }
  size_t slots = 0;
  for (auto& [p, v] : exps) {
    std::sort(v.rbegin(), v.rend());
    slots = std::max(slots, v.size());
  }
  std::vector<long long> merged(slots, 1);
  for (auto& [p, v] : exps)
    for (size_t j = 0; j < v.size(); ++j) {
      long long pw = 1;
      for (int t = 0; t < v[j]; ++t) pw *= p;
      merged[j] *= pw;
    }
  // merged[0] is the largest factor; invariant factors ascend.
  std::reverse(merged.begin(), merged.end());
  return merged;
}

}  // namespace detail

// Homology of one k-slice, reported per (i, q). Fails loudly if d^2 != 0.
inline std::map<std::pair<int, int>, HomologyEntry> homology_of_slice(const KComplex& kc) {
  if (!d_squared_is_zero(kc))
    throw std::logic_error("d^2 != 0 at k=" + std::to_string(kc.k) + "; refusing to compute");
  std::map<std::pair<int, int>, HomologyEntry> out;  // (i, q) -> entry
  // q values present at each degree.
  std::vector<std::set<int>> qs(kc.n + 1);
  for (int i = 0; i <= kc.n; ++i)
    for (const auto& g : kc.gens[i]) qs[i].insert(g.q);
  // rank/factors of each (i, q) block of d_i.
  std::map<std::pair<int, int>, SnfResult> snf;  // (i, q) -> result of d_i block
  for (int i = 0; i < kc.n; ++i)
    for (int q : qs[i]) {
      auto b = detail::q_block(kc, i, q);
      if (!b.src.empty()) snf[{i, q}] = smith_normal_form(b.mat);
    }
  for (int i = 0; i <= kc.n; ++i)
    for (int q : qs[i]) {
      long long dim = 0;
      for (const auto& g : kc.gens[i]) dim += g.q == q;
      long long r_out = 0, r_in = 0;
      if (auto it = snf.find({i, q}); it != snf.end()) r_out = it->second.rank;
      std::vector<long long> torsion;
      if (i > 0)
        if (auto it = snf.find({i - 1, q}); it != snf.end()) {
          r_in = it->second.rank;
          for (long long f : it->second.factors)
            if (f > 1) torsion.push_back(f);
        }
      HomologyEntry e;
      e.rank = dim - r_out - r_in;
      AKH_REQUIRE(e.rank >= 0, "negative homology rank");
      e.torsion = torsion;
      if (!e.is_zero()) out[{i, q}] = e;
    }
  return out;
}

inline HomologyTable homology(const CubeComplex& cube, bool per_q = false) {
  HomologyTable table;
  table.per_q = per_q;
  for (int k : cube.k_values()) {
    KComplex kc = cube.restrict_k(k);
    auto slice = homology_of_slice(kc);
    if (per_q) {
      for (auto& [iq, e] : slice) table.entries[{k, iq.first, iq.second}] = e;
    } else {
      std::map<int, std::pair<long long, std::vector<long long>>> by_i;
      for (auto& [iq, e] : slice) {
        by_i[iq.first].first += e.rank;
        for (long long f : e.torsion) by_i[iq.first].second.push_back(f);
      }
      for (auto& [i, agg] : by_i) {
        HomologyEntry e;
        e.rank = agg.first;
        e.torsion = detail::merge_invariant_factors(agg.second);
        if (!e.is_zero()) table.entries[{k, i, 0}] = e;
      }
    }
  }
  return table;
}

inline HomologyTable homology(const AnnularDiagram& d, bool per_q = false,
                              int max_crossings = 16) {
  return homology(assemble(d, max_crossings), per_q);
}

// All k with nonzero homology (free or torsion).
inline std::set<int> k_support(const AnnularDiagram& d, int max_crossings = 16) {
  CubeComplex cube(d, max_crossings);
  std::set<int> out;
  for (int k : cube.k_values()) {
    auto slice = homology_of_slice(cube.restrict_k(k));
    if (!slice.empty()) out.insert(k);
  }
  return out;
}

// Graded Euler characteristic at one k (alternating sum of chain ranks).
inline long long euler_characteristic_at_k(const CubeComplex& cube, int k) {
  KComplex kc = cube.restrict_k(k);
  long long chi = 0;
  for (int i = 0; i <= kc.n; ++i)
    chi += (i % 2 ? -1 : +1) * static_cast<long long>(kc.gens[i].size());
  return chi;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

struct HomologyReportOptions {
  bool shifted = false;  // add shifted gradings (needs orientation)
  int n_plus = 0, n_minus = 0;
};

inline std::string homology_report_text(const HomologyTable& t,
                                        const HomologyReportOptions& opt = {}) {
  std::ostringstream os;
  os << "k\ti";
  if (t.per_q) os << "\tq";
  if (opt.shifted) os << "\ti_shifted" << (t.per_q ? "\tq_shifted" : "");
  os << "\trank\ttorsion\n";
  for (const auto& [key, e] : t.entries) {
    auto [k, i, q] = key;
    os << k << "\t" << i;
    if (t.per_q) os << "\t" << q;
    if (opt.shifted) {
      os << "\t" << (i - opt.n_minus);
      if (t.per_q) os << "\t" << (q + opt.n_plus - 2 * opt.n_minus);
    }
    os << "\t" << e.rank << "\t";
    if (e.torsion.empty())
      os << "-";
    else
      for (size_t j = 0; j < e.torsion.size(); ++j)
        os << (j ? "," : "") << "Z/" << e.torsion[j];
    os << "\n";
  }
  return os.str();
}

inline ordered_json homology_report_json(const HomologyTable& t,
                                         const HomologyReportOptions& opt = {}) {
  ordered_json rows = ordered_json::array();
  for (const auto& [key, e] : t.entries) {
    auto [k, i, q] = key;
    ordered_json row;
    row["k"] = k;
    row["i"] = i;
    if (t.per_q) row["q"] = q;
    if (opt.shifted) {
      row["i_shifted"] = i - opt.n_minus;
      if (t.per_q) row["q_shifted"] = q + opt.n_plus - 2 * opt.n_minus;
    }
    row["rank"] = e.rank;
    row["torsion"] = e.torsion;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace akh
