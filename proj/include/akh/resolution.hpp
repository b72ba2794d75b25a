#pragma once

// Complete resolutions of an annular diagram: circle tracing, the
// face/circle nesting tree, arc loci, circle types, and the predicates
// evaluated on a single resolution (exactly wrapped, insulated, uniform,
// almost uniform).
//
// Smoothing convention: bit 0 pairs tuple slots (0,1) and (2,3); bit 1 pairs
// (0,3) and (1,2). The surgery arc of a 0-smoothing (red) sits in the channel
// joining corners (1,2) and (3,0); the dual arc of a 1-smoothing (blue) sits
// in the channel joining corners (0,1) and (2,3). Resolving merges exactly
// those two corner faces.

#include <cstdint>
#include <sstream>

#include "diagram.hpp"

namespace akh {

struct BitVec {
  std::uint32_t mask = 0;
  int n = 0;

  BitVec() = default;
  BitVec(std::uint32_t m, int len) : mask(m), n(len) {}

  bool bit(int i) const { return (mask >> i) & 1u; }
  BitVec flipped(int i) const { return {mask ^ (1u << i), n}; }
  int weight() const { return __builtin_popcount(mask); }

  std::string str() const {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
      if (bit(i)) s[i] = '1';
    return s;
  }
  static BitVec parse(const std::string& s) {
    BitVec u{0, static_cast<int>(s.size())};
    for (int i = 0; i < u.n; ++i) {
      if (s[i] == '1')
        u.mask |= 1u << i;
      else if (s[i] != '0')
        throw ValidationError("bit-vector must consist of 0s and 1s: " + s);
    }
    return u;
  }
  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.n == b.n && a.mask == b.mask;
  }
  // Canonical order: lexicographic on the bit string, crossing 0 first.
  friend bool operator<(const BitVec& a, const BitVec& b) {
    for (int i = 0; i < std::min(a.n, b.n); ++i)
      if (a.bit(i) != b.bit(i)) return !a.bit(i);
    return a.n < b.n;
  }
};

enum class ArcColor : std::uint8_t { Red = 0, Blue = 1 };

struct CircleArcIncidence {
  int arc = -1;            // crossing id
  ArcColor color = ArcColor::Red;
  bool has_locus = false;  // set only for trivial circles
  bool interior = false;
};

struct Circle {
  int id = -1;
  bool trivial = false;
  int depth = 0;
  int parent = -1;      // nearest enclosing circle, -1 at the top level
  bool from_loop = false;
  int loop_index = -1;  // valid when from_loop
  std::vector<EdgeId> edges;  // sorted; empty for free loops
  std::vector<CircleArcIncidence> arcs;
  bool type0 = false, type1 = false, type01 = false, type10 = false;

  EdgeId min_edge() const { return edges.empty() ? 0 : edges.front(); }
};

struct Arc {
  int crossing = -1;
  ArcColor color = ArcColor::Red;
  std::array<int, 2> circles{-1, -1};  // circles of the two smoothing strands
  int face_node = -1;                  // nesting-tree node the arc sits in
};

struct Resolution {
  BitVec u;
  std::vector<Circle> circles;
  std::vector<Arc> arcs;
  int nontrivial_count = 0;
  int node_count = 0;
  int star_node = -1, infinity_node = -1;        // infinity_node is the root
  std::vector<int> circle_parent_node, circle_child_node;
  std::vector<int> node_parent;         // tree parent per node (-1 at root)
  std::vector<int> node_parent_circle;  // circle edge to the parent

  int trivial_count() const { return static_cast<int>(circles.size()) - nontrivial_count; }
  int wrap() const { return nontrivial_count; }

  int circle_of_edge(EdgeId e) const {
    for (const Circle& c : circles)
      if (std::binary_search(c.edges.begin(), c.edges.end(), e)) return c.id;
    return -1;
  }
};

enum class CobordismPattern { WW_W, VW_V, VV_W, W_WW, V_VW, W_VV };

inline const char* to_string(CobordismPattern p) {
  switch (p) {
    case CobordismPattern::WW_W: return "WuW->W";
    case CobordismPattern::VW_V: return "VuW->V";
    case CobordismPattern::VV_W: return "VuV->W";
    case CobordismPattern::W_WW: return "W->WuW";
    case CobordismPattern::V_VW: return "V->VuW";
    case CobordismPattern::W_VV: return "W->VuV";
  }
  return "?";
}

inline bool is_merge(CobordismPattern p) {
  return p == CobordismPattern::WW_W || p == CobordismPattern::VW_V ||
         p == CobordismPattern::VV_W;
}

struct CobordismType {
  CobordismPattern pattern;
  bool resolution_is_source;  // true when the queried u sits at the edge's source
};

struct ResolutionReport {
  int wrap_Du = 0;
  bool exactly_wrapped = false;
  bool insulated = false;
  bool uniform = false;
  bool almost_uniform = false;
  int n0 = 0, n1 = 0, n2 = 0;  // type-0-only / type-1-only / both, trivial circles
  bool perfectly_wrapped() const { return exactly_wrapped && insulated; }
  bool pwu() const { return perfectly_wrapped() && uniform; }
};

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

namespace detail {

// Slot paired with `slot` under smoothing bit `b`.
inline int smoothing_mate(int slot, bool b) {
  if (!b) return slot ^ 1;            // (0,1), (2,3)
  return slot == 0 ? 3 : slot == 3 ? 0 : slot == 1 ? 2 : 1;  // (0,3), (1,2)
}

}  // namespace detail

inline Resolution resolve(const AnnularDiagram& d, BitVec u) {
  const int n = d.crossing_count();
  if (u.n != n) throw ValidationError("bit-vector length must equal the crossing count");
  const FaceSet& fs = d.faces();
  const int F = fs.face_count();
  const int L = d.free_loop_count();

  Resolution res;
  res.u = u;

  // Merge the channel corner faces at each crossing.
  detail::UnionFind uf(F);
  for (int c = 0; c < n; ++c) {
    bool b = u.bit(c);
    uf.unite(d.face_at_corner(c, b ? 0 : 1), d.face_at_corner(c, b ? 2 : 3));
  }

  // Trace circles: darts related by the smoothing pairing and edge mates.
  std::vector<int> circle_of_dart(4 * n, -1);
  std::vector<std::vector<EdgeId>> circle_edges;
  for (int d0 = 0; d0 < 4 * n; ++d0) {
    if (circle_of_dart[d0] >= 0) continue;
    int id = static_cast<int>(circle_edges.size());
    std::vector<int> stack{d0};
    std::vector<EdgeId> edges;
    circle_of_dart[d0] = id;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      edges.push_back(d.edge_of_dart(x));
      int c = d.dart_crossing(x), s = d.dart_slot(x);
      for (int y : {d.alpha(x), d.dart(c, detail::smoothing_mate(s, u.bit(c)))}) {
        if (circle_of_dart[y] < 0) {
          circle_of_dart[y] = id;
          stack.push_back(y);
        }
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    circle_edges.push_back(std::move(edges));
  }

  // Canonical order: crossing circles by least edge, then free loops.
  const int m = static_cast<int>(circle_edges.size());
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return circle_edges[a].front() < circle_edges[b].front(); });
  std::vector<int> rank(m);
  for (int i = 0; i < m; ++i) rank[order[i]] = i;

  res.circles.resize(m + L);
  for (int i = 0; i < m; ++i) {
    Circle& k = res.circles[rank[i]];
    k.id = rank[i];
    k.edges = circle_edges[i];
  }
  for (int i = 0; i < L; ++i) {
    Circle& k = res.circles[m + i];
    k.id = m + i;
    k.from_loop = true;
    k.loop_index = i;
  }

  // Nesting-tree nodes: union-find classes of traced faces, then loop regions.
  std::vector<int> node_of_class(F, -1);
  int nodes = 0;
  for (int f = 0; f < F; ++f)
    if (uf.find(f) == f) node_of_class[f] = nodes++;
  auto node_of_face = [&](int f) { return node_of_class[uf.find(f)]; };
  const int loop_node_base = nodes;
  nodes += L;
  auto node_of_region = [&](int r) {
    return r < F ? node_of_face(r) : loop_node_base + (r - F);
  };
  res.node_count = nodes;

  // Tree edges: one per circle.
  res.circle_parent_node.assign(m + L, -1);
  res.circle_child_node.assign(m + L, -1);
  std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (node, circle)
  auto add_circle_edge = [&](int circle, int a, int b) {
    adj[a].push_back({b, circle});
    adj[b].push_back({a, circle});
  };
  for (int i = 0; i < m; ++i) {
    int circle = rank[i];
    EdgeId e = circle_edges[i].front();
    int a = node_of_face(d.face_of_side(e, 'L'));
    int b = node_of_face(d.face_of_side(e, 'R'));
    for (EdgeId e2 : circle_edges[i]) {
      int a2 = node_of_face(d.face_of_side(e2, 'L'));
      int b2 = node_of_face(d.face_of_side(e2, 'R'));
      AKH_REQUIRE((a2 == a && b2 == b) || (a2 == b && b2 == a),
                  "circle sides are not consistent along its edges");
    }
    add_circle_edge(circle, a, b);
  }
  for (int i = 0; i < L; ++i)
    add_circle_edge(m + i, node_of_region(fs.loop_parent_region[i]), loop_node_base + i);

  AKH_REQUIRE(nodes == m + L + 1, "face count does not match circle count");

  // Root the tree at the infinity node.
  res.star_node = node_of_region(fs.star_region);
  res.infinity_node = node_of_region(fs.infinity_region);
  res.node_parent.assign(nodes, -2);
  res.node_parent_circle.assign(nodes, -1);
  {
    std::vector<int> stack{res.infinity_node};
    res.node_parent[res.infinity_node] = -1;
    int seen = 0;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      ++seen;
      for (auto [y, circle] : adj[x]) {
        if (res.node_parent[y] != -2) continue;
        res.node_parent[y] = x;
        res.node_parent_circle[y] = circle;
        res.circle_parent_node[circle] = x;
        res.circle_child_node[circle] = y;
        stack.push_back(y);
      }
    }
    AKH_REQUIRE(seen == nodes, "nesting structure is not a tree");
  }

  // Nontrivial circles are exactly the tree edges separating * from infinity.
  {
    std::vector<char> nontrivial(m + L, 0);
    for (int x = res.star_node; x != res.infinity_node; x = res.node_parent[x])
      nontrivial[res.node_parent_circle[x]] = 1;
    for (Circle& k : res.circles) {
      k.trivial = !nontrivial[k.id];
      res.nontrivial_count += nontrivial[k.id];
    }
  }

  // Depth: trivial circles strictly containing a circle = trivial edges on
  // the path from its parent node to the root. Parent circle: nearest
  // enclosing circle edge above the parent node.
  {
    std::vector<int> tdepth(nodes, -1), enclosing(nodes, -1);
    std::vector<int> bfs{res.infinity_node};
    tdepth[res.infinity_node] = 0;
    enclosing[res.infinity_node] = -1;
    for (size_t qi = 0; qi < bfs.size(); ++qi) {
      int x = bfs[qi];
      for (auto [y, circle] : adj[x]) {
        if (tdepth[y] >= 0 || y == res.infinity_node) continue;
        tdepth[y] = tdepth[x] + (res.circles[circle].trivial ? 1 : 0);
        enclosing[y] = circle;
        bfs.push_back(y);
      }
    }
    for (Circle& k : res.circles) {
      int pn = res.circle_parent_node[k.id];
      k.depth = tdepth[pn];
      k.parent = enclosing[pn];
    }
  }

  // Arcs.
  res.arcs.resize(n);
  for (int c = 0; c < n; ++c) {
    bool b = u.bit(c);
    Arc& a = res.arcs[c];
    a.crossing = c;
    a.color = b ? ArcColor::Blue : ArcColor::Red;
    a.circles = {rank[circle_of_dart[d.dart(c, 0)]],
                 rank[circle_of_dart[d.dart(c, b ? 1 : 2)]]};
    a.face_node = node_of_face(d.face_at_corner(c, b ? 0 : 1));
  }

  // Circle/arc incidences with loci.
  for (int c = 0; c < n; ++c) {
    const Arc& a = res.arcs[c];
    for (int t = 0; t < 2; ++t) {
      int k = a.circles[t];
      if (t == 1 && a.circles[0] == a.circles[1]) break;
      CircleArcIncidence inc;
      inc.arc = c;
      inc.color = a.color;
      Circle& K = res.circles[k];
      if (K.trivial) {
        inc.has_locus = true;
        if (a.face_node == res.circle_parent_node[k])
          inc.interior = false;
        else if (a.face_node == res.circle_child_node[k])
          inc.interior = true;
        else
          AKH_REQUIRE(false, "arc face is not adjacent to an abutted circle");
      }
      K.arcs.push_back(inc);
    }
  }

  // Type flags.
  for (Circle& k : res.circles) {
    if (k.arcs.empty()) {
      k.type0 = k.type1 = k.type01 = k.type10 = true;
      continue;
    }
    k.type0 = k.type1 = true;
    for (const auto& inc : k.arcs) {
      if (inc.color == ArcColor::Red) k.type1 = false;
      else k.type0 = false;
    }
    if (k.trivial) {
      k.type01 = k.type10 = true;
      for (const auto& inc : k.arcs) {
        bool red = inc.color == ArcColor::Red;
        if (inc.interior ? !red : red) k.type01 = false;
        if (inc.interior ? red : !red) k.type10 = false;
      }
    }
  }

  return res;
}

// ---------------------------------------------------------------------------
// Cobordism classification and the resolution report
// ---------------------------------------------------------------------------

namespace detail {

// Distinct circles abutting the arc at crossing c, with triviality.
inline std::vector<std::pair<int, bool>> active_circles(const Resolution& r, int c) {
  const Arc& a = r.arcs[c];
  std::vector<std::pair<int, bool>> out{{a.circles[0], r.circles[a.circles[0]].trivial}};
  if (a.circles[1] != a.circles[0])
    out.push_back({a.circles[1], r.circles[a.circles[1]].trivial});
  return out;
}

inline CobordismPattern classify_edge(const Resolution& src, const Resolution& tgt, int c) {
  auto sa = active_circles(src, c);
  auto ta = active_circles(tgt, c);
  auto trivials = [](const std::vector<std::pair<int, bool>>& v) {
    int t = 0;
    for (auto& [k, triv] : v) t += triv;
    return t;
  };
  if (sa.size() == 2 && ta.size() == 1) {
    int st = trivials(sa);
    bool tt = ta[0].second;
    if (st == 2 && tt) return CobordismPattern::WW_W;
    if (st == 1 && !tt) return CobordismPattern::VW_V;
    if (st == 0 && tt) return CobordismPattern::VV_W;
  } else if (sa.size() == 1 && ta.size() == 2) {
    bool st = sa[0].second;
    int tt = trivials(ta);
    if (st && tt == 2) return CobordismPattern::W_WW;
    if (!st && tt == 1) return CobordismPattern::V_VW;
    if (st && tt == 0) return CobordismPattern::W_VV;
  }
  throw std::logic_error("cobordism type unrecognized (circle-tracing bug)");
}

}  // namespace detail

// Type of the cube edge through crossing i at vertex u, reported together
// with whether u is the source or the target of that edge.
inline CobordismType cobordism_type(const AnnularDiagram& d, BitVec u, int i) {
  Resolution here = resolve(d, u);
  Resolution there = resolve(d, u.flipped(i));
  if (!u.bit(i)) return {detail::classify_edge(here, there, i), true};
  return {detail::classify_edge(there, here, i), false};
}

inline ResolutionReport classify(const AnnularDiagram& d, const Resolution& res, int w) {
  ResolutionReport rep;
  rep.wrap_Du = res.nontrivial_count;
  rep.exactly_wrapped = (rep.wrap_Du == w);
  rep.uniform = rep.almost_uniform = true;
  for (const Circle& k : res.circles) {
    if (!k.trivial) continue;
    bool t0 = k.type0, t1 = k.type1;
    if (t0 && t1) ++rep.n2;
    else if (t0) ++rep.n0;
    else if (t1) ++rep.n1;
    else rep.uniform = false;
    if (!k.type01 && !k.type10) rep.almost_uniform = false;
  }

  rep.insulated = true;
  for (int c = 0; c < d.crossing_count() && rep.insulated; ++c) {
    Resolution other = resolve(d, res.u.flipped(c));
    if (!res.u.bit(c)) {
      // res is the source: merges or W->VuV allowed.
      CobordismPattern p = detail::classify_edge(res, other, c);
      if (!is_merge(p) && p != CobordismPattern::W_VV) rep.insulated = false;
    } else {
      // res is the target: splits or VuV->W allowed.
      CobordismPattern p = detail::classify_edge(other, res, c);
      if (is_merge(p) && p != CobordismPattern::VV_W) rep.insulated = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dump formats
// ---------------------------------------------------------------------------

inline ordered_json resolution_to_json(const Resolution& res) {
  ordered_json j;
  j["u"] = res.u.str();
  j["nontrivial"] = res.nontrivial_count;
  j["circles"] = ordered_json::array();
  for (const Circle& k : res.circles) {
    ordered_json jk;
    jk["id"] = k.id;
    jk["trivial"] = k.trivial;
    if (k.from_loop) jk["free_loop"] = k.loop_index;
    jk["edges"] = k.edges;
    jk["depth"] = k.depth;
    jk["parent"] = k.parent;
    jk["type0"] = k.type0;
    jk["type1"] = k.type1;
    if (k.trivial) {
      jk["type01"] = k.type01;
      jk["type10"] = k.type10;
    }
    ordered_json arcs = ordered_json::array();
    for (const auto& inc : k.arcs) {
      ordered_json ja;
      ja["arc"] = inc.arc;
      ja["color"] = inc.color == ArcColor::Red ? 0 : 1;
      if (inc.has_locus) ja["locus"] = inc.interior ? "interior" : "exterior";
      arcs.push_back(ja);
    }
    jk["arcs"] = arcs;
    j["circles"].push_back(jk);
  }
  j["arcs"] = ordered_json::array();
  for (const Arc& a : res.arcs) {
    ordered_json ja;
    ja["crossing"] = a.crossing;
    ja["color"] = a.color == ArcColor::Red ? 0 : 1;
    ja["circles"] = {a.circles[0], a.circles[1]};
    j["arcs"].push_back(ja);
  }
  return j;
}

inline std::string resolution_dump_text(const Resolution& res) {
  std::ostringstream os;
  os << "resolution u=" << res.u.str() << " circles=" << res.circles.size()
     << " nontrivial=" << res.nontrivial_count << "\n";
  for (const Circle& k : res.circles) {
    os << "  circle " << k.id << ": " << (k.trivial ? "trivial" : "nontrivial");
    if (k.from_loop) os << " free-loop=" << k.loop_index;
    os << " depth=" << k.depth << " parent=" << k.parent << " edges=[";
    for (size_t i = 0; i < k.edges.size(); ++i) os << (i ? "," : "") << k.edges[i];
    os << "]";
    os << " types=" << (k.type0 ? "0" : "") << (k.type1 ? "1" : "");
    if (k.trivial) os << (k.type01 ? " (0,1)" : "") << (k.type10 ? " (1,0)" : "");
    os << " arcs=[";
    for (size_t i = 0; i < k.arcs.size(); ++i) {
      const auto& inc = k.arcs[i];
      os << (i ? " " : "") << inc.arc << (inc.color == ArcColor::Red ? ":red" : ":blue");
      if (inc.has_locus) os << (inc.interior ? ":int" : ":ext");
    }
    os << "]\n";
  }
  for (const Arc& a : res.arcs) {
    os << "  arc " << a.crossing << ": color=" << (a.color == ArcColor::Red ? "red" : "blue")
       << " circles=(" << a.circles[0] << "," << a.circles[1] << ")\n";
  }
  return os.str();
}

}  // namespace akh
