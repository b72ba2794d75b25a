#include <akh/resolution.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"

using namespace akh;

namespace {

AnnularDiagram trefoil() {
  return AnnularDiagram({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {},
                        FaceRef::edge_side(1, 'R'), FaceRef::edge_side(2, 'L'),
                        std::vector<int>{3, 3, 3});
}

// Earring around a once-wrapped strand: strand edges 1 (long way) and 2
// (through the loop), loop edges 3 and 4.
AnnularDiagram earring_unknot() {
  return AnnularDiagram({{1, 4, 2, 3}, {3, 2, 4, 1}}, {}, FaceRef::edge_side(1, 'L'),
                        FaceRef::edge_side(1, 'R'));
}

}  // namespace

TEST_CASE("sigma1 closure resolutions") {
  auto d = fixtures::sigma1_closure();
  SECTION("u=0: two nontrivial circles") {
    auto r = resolve(d, BitVec::parse("0"));
    REQUIRE(r.circles.size() == 2);
    CHECK(r.nontrivial_count == 2);
    CHECK(r.trivial_count() == 0);
    CHECK(r.arcs[0].color == ArcColor::Red);
  }
  SECTION("u=1: one trivial circle abutting one blue exterior arc") {
    auto r = resolve(d, BitVec::parse("1"));
    REQUIRE(r.circles.size() == 1);
    CHECK(r.nontrivial_count == 0);
    const Circle& k = r.circles[0];
    CHECK(k.trivial);
    REQUIRE(k.arcs.size() == 1);
    CHECK(k.arcs[0].color == ArcColor::Blue);
    REQUIRE(k.arcs[0].has_locus);
    CHECK_FALSE(k.arcs[0].interior);  // exterior
    CHECK(k.type1);
    CHECK_FALSE(k.type0);
  }
}

TEST_CASE("crossingless diagram resolution is a passthrough") {
  auto d = fixtures::free_loop(true);
  auto r = resolve(d, BitVec{});
  REQUIRE(r.circles.size() == 1);
  CHECK(r.circles[0].trivial);
  CHECK(r.circles[0].arcs.empty());
  CHECK(r.circles[0].depth == 0);
  CHECK(r.circles[0].type0);
  CHECK(r.circles[0].type1);
  CHECK(r.circles[0].type01);
  CHECK(r.circles[0].type10);
}

TEST_CASE("classify: sigma1 closure") {
  auto d = fixtures::sigma1_closure();
  SECTION("u=0 at w=2 is perfectly wrapped and uniform") {
    auto rep = classify(d, resolve(d, BitVec::parse("0")), 2);
    CHECK(rep.exactly_wrapped);
    CHECK(rep.insulated);
    CHECK(rep.uniform);
    CHECK(rep.n0 == 0);
    CHECK(rep.n1 == 0);
    CHECK(rep.n2 == 0);
    CHECK(rep.pwu());
  }
  SECTION("u=1 at w=2 is not exactly wrapped but uniform") {
    auto rep = classify(d, resolve(d, BitVec::parse("1")), 2);
    CHECK_FALSE(rep.exactly_wrapped);
    CHECK(rep.wrap_Du == 0);
    CHECK(rep.uniform);
    CHECK(rep.n1 == 1);
  }
}

TEST_CASE("classify: one trivial free loop at w=0") {
  auto d = fixtures::free_loop(true);
  auto rep = classify(d, resolve(d, BitVec{}), 0);
  CHECK(rep.exactly_wrapped);
  CHECK(rep.insulated);
  CHECK(rep.uniform);
  CHECK(rep.n2 == 1);
}

TEST_CASE("cobordism types") {
  SECTION("sigma1 closure, u=0, crossing 0: VuV->W as source") {
    auto ct = cobordism_type(fixtures::sigma1_closure(), BitVec::parse("0"), 0);
    CHECK(ct.pattern == CobordismPattern::VV_W);
    CHECK(ct.resolution_is_source);
  }
  SECTION("trefoil, u=000, crossing 1: VuV->W as source") {
    auto ct = cobordism_type(trefoil(), BitVec::parse("000"), 1);
    CHECK(ct.pattern == CobordismPattern::VV_W);
    CHECK(ct.resolution_is_source);
  }
  SECTION("earring merge into the strand: VuW->V") {
    auto d = earring_unknot();
    CHECK(diagram_wrap(d) == 1);
    auto ct = cobordism_type(d, BitVec::parse("00"), 0);
    CHECK(ct.pattern == CobordismPattern::VW_V);
    CHECK(ct.resolution_is_source);
  }
}

TEST_CASE("trefoil all-1 resolution is a necklace of three beads") {
  auto d = trefoil();
  auto r = resolve(d, BitVec::parse("111"));
  REQUIRE(r.circles.size() == 3);
  CHECK(r.nontrivial_count == 0);
  for (const Circle& k : r.circles) {
    CHECK(k.depth == 0);
    CHECK(k.parent == -1);
    CHECK(k.type1);
    CHECK(k.type01);  // two exterior blue arcs, no interior ones
    CHECK(k.arcs.size() == 2);
  }
  // The arcs chain the beads in a cycle.
  CHECK(r.arcs[0].circles != r.arcs[1].circles);
}

TEST_CASE("trefoil 011 resolution has an interior red arc") {
  // Merging two beads of the necklace tucks the red arc inside; the circle
  // stays type (0,1), as alternating diagrams must.
  auto d = trefoil();
  auto r = resolve(d, BitVec::parse("011"));
  REQUIRE(r.circles.size() == 2);
  bool found = false;
  for (const Circle& k : r.circles)
    for (const auto& inc : k.arcs)
      if (inc.color == ArcColor::Red) {
        CHECK(inc.interior);
        CHECK(k.type01);
        CHECK_FALSE(k.type0);
        CHECK_FALSE(k.type1);
        found = true;
      }
  CHECK(found);
}

TEST_CASE("parity of nontrivial counts is constant over the cube") {
  for (const auto& d : {fixtures::sigma1_closure(), trefoil(), earring_unknot(),
                        fixtures::kink_unknot_wrap1(), fixtures::kink_unknot_wrap0(),
                        fixtures::sigma1_closure_plus_trivial_loop()}) {
    int n = d.crossing_count();
    int parity = -1;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      auto r = resolve(d, BitVec(m, n));
      if (parity < 0) parity = r.nontrivial_count % 2;
      CHECK(r.nontrivial_count % 2 == parity);
    }
    CHECK(parity == diagram_wrap(d) % 2);
  }
}

TEST_CASE("wrap(D) equals the maximum nontrivial count over resolutions") {
  for (const auto& d : {fixtures::sigma1_closure(), trefoil(), earring_unknot(),
                        fixtures::kink_unknot_wrap1(), fixtures::kink_unknot_wrap0()}) {
    int n = d.crossing_count();
    int best = 0;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      auto r = resolve(d, BitVec(m, n));
      CHECK(r.nontrivial_count <= diagram_wrap(d));
      best = std::max(best, r.nontrivial_count);
    }
    CHECK(best == diagram_wrap(d));
  }
}

TEST_CASE("every wrapping number of the right parity is realized (connected diagrams)") {
  for (const auto& d : {fixtures::sigma1_closure(), trefoil(), earring_unknot()}) {
    int n = d.crossing_count();
    int w = diagram_wrap(d);
    std::set<int> seen;
    for (std::uint32_t m = 0; m < (1u << n); ++m) seen.insert(resolve(d, BitVec(m, n)).wrap());
    for (int v = w % 2; v <= w; v += 2) CHECK(seen.count(v) == 1);
  }
}

TEST_CASE("almost uniform one-sided circles are uniform") {
  // type01 with no interior (or no exterior) adjacent arcs forces type0/type1.
  for (const auto& d : {fixtures::sigma1_closure(), trefoil(), earring_unknot()}) {
    int n = d.crossing_count();
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      auto r = resolve(d, BitVec(m, n));
      for (const Circle& k : r.circles) {
        if (!k.trivial) continue;
        bool has_int = false, has_ext = false;
        for (const auto& inc : k.arcs) (inc.interior ? has_int : has_ext) = true;
        if ((k.type01 || k.type10) && (!has_int || !has_ext)) CHECK((k.type0 || k.type1));
      }
    }
  }
}

TEST_CASE("mirror swaps smoothing conventions") {
  auto d = trefoil();
  auto dm = mirror(d);
  int n = d.crossing_count();
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    auto r = resolve(d, BitVec(m, n));
    auto rm = resolve(dm, BitVec(~m & ((1u << n) - 1), n));
    CHECK(r.circles.size() == rm.circles.size());
    CHECK(r.nontrivial_count == rm.nontrivial_count);
    for (size_t i = 0; i < r.circles.size(); ++i) {
      CHECK(r.circles[i].edges == rm.circles[i].edges);
      CHECK(r.circles[i].trivial == rm.circles[i].trivial);
      CHECK(r.circles[i].type0 == rm.circles[i].type1);  // colors swap
    }
  }
}

TEST_CASE("resolution dump is stable") {
  auto d = fixtures::sigma1_closure();
  auto r = resolve(d, BitVec::parse("1"));
  auto j = resolution_to_json(r);
  CHECK(j["u"] == "1");
  CHECK(j["circles"].size() == 1);
  CHECK(j["circles"][0]["arcs"][0]["locus"] == "exterior");
  CHECK(resolution_dump_text(r) == resolution_dump_text(resolve(d, BitVec::parse("1"))));
}
