#pragma once

// The annular Khovanov chain complex of a diagram: distinguished generators
// with (i, q, k) gradings, the six local differentials, cube signs, and the
// k-graded restriction used everywhere downstream.
//
// Generator encoding: for a resolution with m circles (canonical order), a
// labeling is a bitmask where bit j = 1 labels circle j with minus. The
// canonical enumeration index treats circle 0 as the most significant digit
// with plus before minus, so index 0 is the all-plus generator.

#include <functional>
#include <unordered_map>

#include "resolution.hpp"

namespace akh {

inline std::uint32_t index_to_labels(std::uint32_t idx, int m) {
  std::uint32_t labels = 0;
  for (int j = 0; j < m; ++j)
    if ((idx >> (m - 1 - j)) & 1u) labels |= 1u << j;
  return labels;
}

inline std::uint32_t labels_to_index(std::uint32_t labels, int m) {
  std::uint32_t idx = 0;
  for (int j = 0; j < m; ++j)
    if ((labels >> j) & 1u) idx |= 1u << (m - 1 - j);
  return idx;
}

inline int gr_i(const Resolution& r) { return r.u.weight(); }

inline int gr_q(const Resolution& r, std::uint32_t labels) {
  int q = r.u.weight();
  for (const Circle& c : r.circles) q += ((labels >> c.id) & 1u) ? -1 : +1;
  return q;
}

inline int gr_k(const Resolution& r, std::uint32_t labels) {
  int k = 0;
  for (const Circle& c : r.circles) {
    if (c.trivial) continue;
    k += ((labels >> c.id) & 1u) ? -1 : +1;
  }
  return k;
}

struct DistinguishedGenerator {
  std::uint32_t labels = 0;
  int i = 0, q = 0, k = 0;
};

// All 2^m generators of a resolution in canonical order.
inline std::vector<DistinguishedGenerator> chain_group(const Resolution& r) {
  const int m = static_cast<int>(r.circles.size());
  std::vector<DistinguishedGenerator> out;
  out.reserve(1u << m);
  for (std::uint32_t idx = 0; idx < (1u << m); ++idx) {
    std::uint32_t labels = index_to_labels(idx, m);
    out.push_back({labels, gr_i(r), gr_q(r, labels), gr_k(r, labels)});
  }
  return out;
}

inline std::string generator_name(const Resolution& r, std::uint32_t labels) {
  std::string s;
  for (const Circle& c : r.circles) {
    s += c.trivial ? 'w' : 'v';
    s += ((labels >> c.id) & 1u) ? '-' : '+';
  }
  return s.empty() ? "1" : s;
}

// ---------------------------------------------------------------------------
// Edge maps
// ---------------------------------------------------------------------------

struct EdgeMap {
  int crossing = -1;
  CobordismPattern pattern;
  std::vector<int> fwd;            // per source circle: target circle, -1 if active
  std::array<int, 2> src_active{-1, -1};
  std::array<int, 2> tgt_active{-1, -1};
};

// Cube edge from res_u to res_v where res_v flips crossing c from 0 to 1.
inline EdgeMap build_edge_map(const Resolution& ru, const Resolution& rv, int c) {
  AKH_REQUIRE(!ru.u.bit(c) && rv.u.bit(c) && (ru.u.mask ^ rv.u.mask) == (1u << c),
              "not a cube edge");
  EdgeMap em;
  em.crossing = c;
  const int mu = static_cast<int>(ru.circles.size());
  em.fwd.assign(mu, -1);
  std::vector<char> matched(rv.circles.size(), 0);
  for (int j = 0; j < mu; ++j) {
    const Circle& a = ru.circles[j];
    for (const Circle& b : rv.circles) {
      bool same = a.from_loop ? (b.from_loop && a.loop_index == b.loop_index)
                              : (!b.from_loop && a.edges == b.edges);
      if (same) {
        em.fwd[j] = b.id;
        matched[b.id] = 1;
        break;
      }
    }
  }
  int sa = 0, ta = 0;
  for (int j = 0; j < mu; ++j)
    if (em.fwd[j] < 0) {
      AKH_REQUIRE(sa < 2, "more than two active source circles");
      em.src_active[sa++] = j;
    }
  for (const Circle& b : rv.circles)
    if (!matched[b.id]) {
      AKH_REQUIRE(ta < 2, "more than two active target circles");
      em.tgt_active[ta++] = b.id;
    }
  auto triv = [](const Resolution& r, int j) { return r.circles[j].trivial; };
  if (sa == 2 && ta == 1) {
    int st = triv(ru, em.src_active[0]) + triv(ru, em.src_active[1]);
    bool tt = triv(rv, em.tgt_active[0]);
    if (st == 2 && tt) em.pattern = CobordismPattern::WW_W;
    else if (st == 1 && !tt) em.pattern = CobordismPattern::VW_V;
    else if (st == 0 && tt) em.pattern = CobordismPattern::VV_W;
    else throw std::logic_error("cobordism type unrecognized (circle-tracing bug)");
  } else if (sa == 1 && ta == 2) {
    bool st = triv(ru, em.src_active[0]);
    int tt = triv(rv, em.tgt_active[0]) + triv(rv, em.tgt_active[1]);
    if (st && tt == 2) em.pattern = CobordismPattern::W_WW;
    else if (!st && tt == 1) em.pattern = CobordismPattern::V_VW;
    else if (st && tt == 0) em.pattern = CobordismPattern::W_VV;
    else throw std::logic_error("cobordism type unrecognized (circle-tracing bug)");
  } else {
    throw std::logic_error("cobordism type unrecognized (circle-tracing bug)");
  }
  return em;
}

// Image of a distinguished generator under the (unsigned) edge map. Writes up
// to two target labelings, each with coefficient +1, and returns their count.
inline int apply_edge(const EdgeMap& em, const Resolution& ru, const Resolution& rv,
                      std::uint32_t src, std::array<std::uint32_t, 2>& out) {
  std::uint32_t base = 0;
  for (int j = 0; j < static_cast<int>(em.fwd.size()); ++j)
    if (em.fwd[j] >= 0 && ((src >> j) & 1u)) base |= 1u << em.fwd[j];
  auto minus = [&](int j) { return ((src >> j) & 1u) != 0; };

  switch (em.pattern) {
    case CobordismPattern::WW_W: {
      bool la = minus(em.src_active[0]), lb = minus(em.src_active[1]);
      if (la && lb) return 0;  // w- x w- -> 0
      out[0] = base | ((la || lb) ? (1u << em.tgt_active[0]) : 0u);
      return 1;
    }
    case CobordismPattern::VW_V: {
      int v = ru.circles[em.src_active[0]].trivial ? em.src_active[1] : em.src_active[0];
      int w = v == em.src_active[0] ? em.src_active[1] : em.src_active[0];
      if (minus(w)) return 0;  // v x w- -> 0
      out[0] = base | (minus(v) ? (1u << em.tgt_active[0]) : 0u);
      return 1;
    }
    case CobordismPattern::VV_W: {
      bool la = minus(em.src_active[0]), lb = minus(em.src_active[1]);
      if (la == lb) return 0;  // v+ x v+ and v- x v- -> 0
      out[0] = base | (1u << em.tgt_active[0]);  // -> w-
      return 1;
    }
    case CobordismPattern::W_WW: {
      int m0 = em.tgt_active[0], m1 = em.tgt_active[1];
      if (minus(em.src_active[0])) {
        out[0] = base | (1u << m0) | (1u << m1);  // w- -> w- x w-
        return 1;
      }
      out[0] = base | (1u << m0);  // w+ -> w- x w+ + w+ x w-
      out[1] = base | (1u << m1);
      return 2;
    }
    case CobordismPattern::V_VW: {
      int v = rv.circles[em.tgt_active[0]].trivial ? em.tgt_active[1] : em.tgt_active[0];
      int w = v == em.tgt_active[0] ? em.tgt_active[1] : em.tgt_active[0];
      out[0] = base | (1u << w) | (minus(em.src_active[0]) ? (1u << v) : 0u);
      return 1;  // v -> v x w-
    }
    case CobordismPattern::W_VV: {
      if (minus(em.src_active[0])) return 0;  // w- -> 0
      int m0 = em.tgt_active[0], m1 = em.tgt_active[1];
      out[0] = base | (1u << m0);  // w+ -> v- x v+ + v+ x v-
      out[1] = base | (1u << m1);
      return 2;
    }
  }
  return 0;
}

// Cube edge sign: parity of the number of 1-bits before the flipped crossing.
inline int edge_sign(std::uint32_t mask, int c) {
  return (__builtin_popcount(mask & ((1u << c) - 1u)) & 1) ? -1 : +1;
}

// ---------------------------------------------------------------------------
// The assembled cube and its k-graded slices
// ---------------------------------------------------------------------------

struct SparseEntry {
  int row, col;
  int value;  // in {-1, +1}
};

struct SparseMatrix {
  int rows = 0, cols = 0;
  std::vector<SparseEntry> entries;
  void sort() {
    std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
  }
};

struct GenRef {
  std::uint32_t mask = 0;
  std::uint32_t labels = 0;
  int q = 0;
};

struct KComplex {
  int k = 0;
  int n = 0;
  std::vector<std::vector<GenRef>> gens;  // by homological degree 0..n
  std::vector<SparseMatrix> d;            // d[i] : C_i -> C_{i+1}
};

class CubeComplex {
 public:
  explicit CubeComplex(const AnnularDiagram& d, int max_crossings = 16) : d_(&d) {
    const int n = d.crossing_count();
    if (n > max_crossings)
      throw CapExceeded("cube too large: " + std::to_string(n) + " crossings exceeds cap " +
                        std::to_string(max_crossings) + " (raise --max-crossings to override)");
    res_.reserve(1u << n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
      res_.push_back(resolve(d, BitVec(mask, n)));
    // Masks of each weight in canonical (lexicographic bit-vector) order.
    masks_by_i_.assign(n + 1, {});
    std::vector<std::uint32_t> all(1u << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m) all[m] = m;
    std::sort(all.begin(), all.end(), [&](std::uint32_t a, std::uint32_t b) {
      return BitVec(a, n) < BitVec(b, n);
    });
    for (std::uint32_t m : all) masks_by_i_[BitVec(m, n).weight()].push_back(m);
    // Edge maps.
    edges_.resize(static_cast<size_t>(n) << n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
      for (int c = 0; c < n; ++c)
        if (!(mask >> c & 1u))
          edges_[static_cast<size_t>(mask) * n + c] =
              build_edge_map(res_[mask], res_[mask | (1u << c)], c);
  }

  const AnnularDiagram& diagram() const { return *d_; }
  int n() const { return d_->crossing_count(); }
  const Resolution& res(std::uint32_t mask) const { return res_[mask]; }
  const std::vector<std::uint32_t>& masks_at(int i) const { return masks_by_i_[i]; }
  const EdgeMap& edge(std::uint32_t mask, int c) const {
    return edges_[static_cast<size_t>(mask) * n() + c];
  }

  int k_max() const {
    int k = 0;
    for (const Resolution& r : res_) k = std::max(k, r.nontrivial_count);
    return k;
  }

  std::vector<int> k_values() const {
    int km = k_max();
    std::vector<int> ks;
    for (int k = -km; k <= km; k += 2) ks.push_back(k);
    return ks;
  }

  KComplex restrict_k(int k) const {
    const int n = this->n();
    KComplex kc;
    kc.k = k;
    kc.n = n;
    kc.gens.resize(n + 1);
    kc.d.resize(n);
    // Generator lists and per-mask lookup tables.
    std::unordered_map<std::uint32_t, std::pair<int, std::vector<std::uint32_t>>> table;
    for (int i = 0; i <= n; ++i) {
      for (std::uint32_t mask : masks_by_i_[i]) {
        const Resolution& r = res_[mask];
        const int m = static_cast<int>(r.circles.size());
        auto& [offset, indices] = table[mask];
        offset = static_cast<int>(kc.gens[i].size());
        for (std::uint32_t idx = 0; idx < (1u << m); ++idx) {
          std::uint32_t labels = index_to_labels(idx, m);
          if (gr_k(r, labels) != k) continue;
          indices.push_back(idx);
          kc.gens[i].push_back({mask, labels, gr_q(r, labels)});
        }
      }
    }
    // Differentials.
    for (int i = 0; i < n; ++i) {
      SparseMatrix& mat = kc.d[i];
      mat.cols = static_cast<int>(kc.gens[i].size());
      mat.rows = static_cast<int>(kc.gens[i + 1].size());
      for (std::uint32_t mask : masks_by_i_[i]) {
        const Resolution& ru = res_[mask];
        const auto& [src_off, src_idx] = table.at(mask);
        for (int c = 0; c < n; ++c) {
          if (mask >> c & 1u) continue;
          std::uint32_t vmask = mask | (1u << c);
          const Resolution& rv = res_[vmask];
          const EdgeMap& em = edge(mask, c);
          const auto& [tgt_off, tgt_idx] = table.at(vmask);
          const int mv = static_cast<int>(rv.circles.size());
          int sign = edge_sign(mask, c);
          for (int s = 0; s < static_cast<int>(src_idx.size()); ++s) {
            std::uint32_t labels = index_to_labels(src_idx[s], static_cast<int>(ru.circles.size()));
            std::array<std::uint32_t, 2> out;
            int nterms = apply_edge(em, ru, rv, labels, out);
            for (int t = 0; t < nterms; ++t) {
              std::uint32_t tix = labels_to_index(out[t], mv);
              auto it = std::lower_bound(tgt_idx.begin(), tgt_idx.end(), tix);
              AKH_REQUIRE(it != tgt_idx.end() && *it == tix,
                          "edge map image missing from the k-graded block");
              mat.entries.push_back(
                  {tgt_off + static_cast<int>(it - tgt_idx.begin()), src_off + s, sign});
            }
          }
        }
      }
      mat.sort();
    }
    return kc;
  }

 private:
  const AnnularDiagram* d_;
  std::vector<Resolution> res_;
  std::vector<std::vector<std::uint32_t>> masks_by_i_;
  std::vector<EdgeMap> edges_;
};

inline CubeComplex assemble(const AnnularDiagram& d, int max_crossings = 16) {
  return CubeComplex(d, max_crossings);
}

// d^2 = 0, checked blockwise over one k-slice.
inline bool d_squared_is_zero(const KComplex& kc) {
  for (int i = 0; i + 1 < kc.n; ++i) {
    std::map<std::pair<int, int>, long long> prod;
    std::vector<std::vector<const SparseEntry*>> by_col(kc.d[i].cols);
    for (const auto& e : kc.d[i].entries) by_col[e.col].push_back(&e);
    std::vector<std::vector<const SparseEntry*>> next_by_col(kc.d[i + 1].cols);
    for (const auto& e : kc.d[i + 1].entries) next_by_col[e.col].push_back(&e);
    for (int col = 0; col < kc.d[i].cols; ++col)
      for (const SparseEntry* e : by_col[col])
        for (const SparseEntry* f : next_by_col[e->row])
          prod[{f->row, col}] += static_cast<long long>(e->value) * f->value;
    for (const auto& [rc, v] : prod)
      if (v != 0) return false;
  }
  return true;
}

// Anticommutativity of the sign assignment on every square of the cube.
inline bool signs_anticommute(int n) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    for (int c1 = 0; c1 < n; ++c1)
      for (int c2 = c1 + 1; c2 < n; ++c2) {
        if ((mask >> c1 & 1u) || (mask >> c2 & 1u)) continue;
        int a = edge_sign(mask, c1) * edge_sign(mask | (1u << c1), c2);
        int b = edge_sign(mask, c2) * edge_sign(mask | (1u << c2), c1);
        if (a + b != 0) return false;
      }
  return true;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

// Dots-and-arrows graph of one k-slice in DOT format.
inline std::string dots_and_arrows_dot(const CubeComplex& cube, const KComplex& kc) {
  std::ostringstream os;
  os << "digraph akh_k" << (kc.k < 0 ? "m" : "") << std::abs(kc.k) << " {\n  rankdir=LR;\n";
  auto name = [&](const GenRef& g) {
    return "u" + BitVec(g.mask, kc.n).str() + ":" +
           generator_name(cube.res(g.mask), g.labels);
  };
  for (int i = 0; i <= kc.n; ++i)
    for (const GenRef& g : kc.gens[i])
      os << "  \"" << name(g) << "\";\n";
  for (int i = 0; i < kc.n; ++i)
    for (const auto& e : kc.d[i].entries)
      os << "  \"" << name(kc.gens[i][e.col]) << "\" -> \"" << name(kc.gens[i + 1][e.row])
         << "\" [label=\"" << (e.value > 0 ? "+" : "-") << "\"];\n";
  os << "}\n";
  return os.str();
}

// Coordinate-triplet dump of the differentials of one k-slice.
inline std::string matrix_dump_text(const KComplex& kc) {
  std::ostringstream os;
  for (int i = 0; i < kc.n; ++i) {
    os << "d k=" << kc.k << " i=" << i << " rows=" << kc.d[i].rows << " cols=" << kc.d[i].cols
       << " nnz=" << kc.d[i].entries.size() << "\n";
    for (const auto& e : kc.d[i].entries)
      os << e.row << " " << e.col << " " << e.value << "\n";
  }
  return os.str();
}

}  // namespace akh
