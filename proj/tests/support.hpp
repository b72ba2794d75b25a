#pragma once

// Shared helpers for the unit and acceptance suites: the verbatim
// differential-table checker and cube-edge scanners.

#include <akh/complex.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>

namespace support {

using namespace akh;

struct EdgeSite {
  const AnnularDiagram* d;
  std::uint32_t mask;
  int crossing;
};

// First cube edge of each cobordism pattern found across the given diagrams.
inline std::map<CobordismPattern, EdgeSite> find_pattern_sites(
    const std::vector<const AnnularDiagram*>& diagrams) {
  std::map<CobordismPattern, EdgeSite> sites;
  for (const AnnularDiagram* d : diagrams) {
    int n = d->crossing_count();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      for (int c = 0; c < n; ++c) {
        if (mask >> c & 1u) continue;
        Resolution ru = resolve(*d, BitVec(mask, n));
        Resolution rv = resolve(*d, BitVec(mask | (1u << c), n));
        EdgeMap em = build_edge_map(ru, rv, c);
        if (!sites.count(em.pattern)) sites[em.pattern] = {d, mask, c};
      }
    }
  }
  return sites;
}

// Expected images of the six local differentials on active labels
// (true = minus). Merge rows are keyed by (label_a, label_b) with a = the
// first active source circle of the edge map; for the mixed merge the checker
// normalizes so that `a` is the nontrivial circle. Split rows are keyed by
// the single source label; images list (label_m, label_n) pairs, m = first
// active target (normalized so m is nontrivial in the mixed split).
using LabelPair = std::pair<bool, bool>;

inline std::map<LabelPair, std::multiset<bool>> merge_table(CobordismPattern p) {
  using T = std::map<LabelPair, std::multiset<bool>>;
  switch (p) {
    case CobordismPattern::WW_W:
      return T{{{false, false}, {false}},
               {{true, false}, {true}},
               {{false, true}, {true}},
               {{true, true}, {}}};
    case CobordismPattern::VW_V:  // key (v label, w label)
      return T{{{false, false}, {false}},
               {{false, true}, {}},
               {{true, false}, {true}},
               {{true, true}, {}}};
    case CobordismPattern::VV_W:
      return T{{{false, false}, {}},
               {{true, false}, {true}},
               {{false, true}, {true}},
               {{true, true}, {}}};
    default:
      throw std::logic_error("not a merge");
  }
}

inline std::map<bool, std::multiset<LabelPair>> split_table(CobordismPattern p) {
  using T = std::map<bool, std::multiset<LabelPair>>;
  switch (p) {
    case CobordismPattern::W_WW:
      return T{{false, {{true, false}, {false, true}}}, {true, {{true, true}}}};
    case CobordismPattern::V_VW:  // value pairs are (v label, w label)
      return T{{false, {{false, true}}}, {true, {{true, true}}}};
    case CobordismPattern::W_VV:
      return T{{false, {{true, false}, {false, true}}}, {true, {}}};
    default:
      throw std::logic_error("not a split");
  }
}

// Verify every generator-image row of the local differential at a cube edge,
// with all passive circles labeled per `passive_minus`. Returns a diagnostic
// on mismatch.
inline std::optional<std::string> check_edge_table(const AnnularDiagram& d, std::uint32_t mask,
                                                   int c, bool passive_minus = false) {
  int n = d.crossing_count();
  Resolution ru = resolve(d, BitVec(mask, n));
  Resolution rv = resolve(d, BitVec(mask | (1u << c), n));
  EdgeMap em = build_edge_map(ru, rv, c);

  std::uint32_t passive = 0;
  if (passive_minus)
    for (int j = 0; j < static_cast<int>(ru.circles.size()); ++j)
      if (em.fwd[j] >= 0) passive |= 1u << j;

  auto passive_image_ok = [&](std::uint32_t src, std::uint32_t tgt) {
    for (int j = 0; j < static_cast<int>(ru.circles.size()); ++j)
      if (em.fwd[j] >= 0 && (((src >> j) & 1u) != ((tgt >> em.fwd[j]) & 1u))) return false;
    return true;
  };

  if (is_merge(em.pattern)) {
    int a = em.src_active[0], b = em.src_active[1];
    if (em.pattern == CobordismPattern::VW_V && ru.circles[a].trivial) std::swap(a, b);
    auto expect = merge_table(em.pattern);
    for (auto& [labels, want] : expect) {
      std::uint32_t src = passive | (labels.first ? (1u << a) : 0u) |
                          (labels.second ? (1u << b) : 0u);
      std::array<std::uint32_t, 2> out;
      int cnt = apply_edge(em, ru, rv, src, out);
      std::multiset<bool> got;
      for (int t = 0; t < cnt; ++t) {
        if (!passive_image_ok(src, out[t])) return "passive circle labels not preserved";
        got.insert(((out[t] >> em.tgt_active[0]) & 1u) != 0);
        if (gr_q(ru, src) != gr_q(rv, out[t])) return "q grading not preserved";
        if (gr_k(ru, src) != gr_k(rv, out[t])) return "k grading not preserved";
      }
      if (got != want)
        return std::string("merge table mismatch for ") + to_string(em.pattern);
    }
  } else {
    int mtgt = em.tgt_active[0], ntgt = em.tgt_active[1];
    if (em.pattern == CobordismPattern::V_VW && rv.circles[mtgt].trivial) std::swap(mtgt, ntgt);
    auto expect = split_table(em.pattern);
    for (auto& [label, want] : expect) {
      std::uint32_t src = passive | (label ? (1u << em.src_active[0]) : 0u);
      std::array<std::uint32_t, 2> out;
      int cnt = apply_edge(em, ru, rv, src, out);
      std::multiset<LabelPair> got;
      for (int t = 0; t < cnt; ++t) {
        if (!passive_image_ok(src, out[t])) return "passive circle labels not preserved";
        got.insert({((out[t] >> mtgt) & 1u) != 0, ((out[t] >> ntgt) & 1u) != 0});
        if (gr_q(ru, src) != gr_q(rv, out[t])) return "q grading not preserved";
        if (gr_k(ru, src) != gr_k(rv, out[t])) return "k grading not preserved";
      }
      if (got != want)
        return std::string("split table mismatch for ") + to_string(em.pattern);
    }
  }
  return std::nullopt;
}

}  // namespace support
