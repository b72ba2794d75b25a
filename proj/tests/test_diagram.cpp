#include <akh/diagram.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"

using namespace akh;

TEST_CASE("degenerate input: one nontrivial crossingless loop") {
  auto d = AnnularDiagram::parse(R"({
    "crossings": [],
    "free_loops": [{"trivial": false, "parent": null}],
    "star": {"loop_face": 0},
    "infinity": {"loop_face": null}
  })");
  CHECK(d.crossing_count() == 0);
  CHECK(d.free_loop_count() == 1);
  CHECK_FALSE(d.free_loops()[0].trivial);
  CHECK(diagram_wrap(d) == 1);
}

TEST_CASE("sigma1 closure parses and traces three faces") {
  auto d = fixtures::sigma1_closure();
  CHECK(d.crossing_count() == 1);
  CHECK(d.edge_count() == 2);
  auto fs = trace_faces(d);
  CHECK(fs.face_count() == 3);  // F = E - V + 2 = 2 - 1 + 2
  CHECK(fs.star_face_index() != fs.infinity_face_index());
  // Round trip through the text format.
  auto d2 = AnnularDiagram::parse(d.serialize());
  CHECK(d2.to_json() == d.to_json());
}

TEST_CASE("edge multiplicity errors are reported") {
  // edge 3 appears once (and edge 4 three times to balance the slot count)
  const char* text = R"({
    "crossings": [[1, 2, 3, 4], [4, 4, 1, 2]],
    "star": {"edge": 1, "side": "L"},
    "infinity": {"edge": 2, "side": "L"}
  })";
  CHECK_THROWS_AS(AnnularDiagram::parse(text), ParseError);
  try {
    AnnularDiagram::parse(text);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("edge multiplicity") != std::string::npos);
  }
}

TEST_CASE("malformed syntax carries a location") {
  try {
    AnnularDiagram::parse("{ not json");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK_FALSE(e.location.empty());
  }
}

TEST_CASE("disconnected rotation systems are rejected") {
  // Two disjoint copies of the 1-crossing map.
  CHECK_THROWS_WITH(AnnularDiagram({{2, 2, 1, 1}, {4, 4, 3, 3}}, {}, FaceRef::edge_side(1, 'L'),
                                   FaceRef::edge_side(2, 'L')),
                    Catch::Matchers::ContainsSubstring("disconnected"));
}

TEST_CASE("trace_faces on crossingless diagrams counts loop regions") {
  auto d = fixtures::two_nested_nontrivial_loops();
  auto fs = trace_faces(d);
  CHECK(fs.face_count() == 1);
  CHECK(fs.region_count() == 3);
  CHECK(diagram_wrap(d) == 2);
}

TEST_CASE("trefoil closure has five faces") {
  // sigma1^3 on two strands, hand-encoded; positive crossings.
  AnnularDiagram d({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {}, FaceRef::edge_side(1, 'R'),
                   FaceRef::edge_side(2, 'L'), std::vector<int>{3, 3, 3});
  auto fs = trace_faces(d);
  CHECK(fs.face_count() == 5);  // 6 - 3 + 2
  CHECK(d.positive_crossings() == 3);
  CHECK(d.negative_crossings() == 0);
  CHECK(diagram_wrap(d) == 2);
}

TEST_CASE("diagram wrap examples") {
  CHECK(diagram_wrap(fixtures::free_loop(true)) == 0);
  CHECK(diagram_wrap(fixtures::free_loop(false)) == 1);
  CHECK(diagram_wrap(fixtures::sigma1_closure()) == 2);
  CHECK(diagram_wrap(fixtures::kink_unknot_wrap0()) == 0);
  CHECK(diagram_wrap(fixtures::kink_unknot_wrap1()) == 1);
}

TEST_CASE("star and infinity may coincide only at wrap zero") {
  auto d = fixtures::kink_unknot_wrap0();
  auto fs = trace_faces(d);
  CHECK(fs.star_face_index() == fs.infinity_face_index());
  CHECK(diagram_wrap(d) == 0);
}

TEST_CASE("nugatory classification on the one-crossing map") {
  SECTION("sigma1 closure: essential") {
    auto nug = find_nugatory(fixtures::sigma1_closure());
    REQUIRE(nug.size() == 1);
    CHECK(nug[0].crossing == 0);
    CHECK_FALSE(nug[0].removable);
  }
  SECTION("kink away from the puncture: removable") {
    auto nug = find_nugatory(fixtures::kink_unknot_wrap0());
    REQUIRE(nug.size() == 1);
    CHECK(nug[0].removable);
  }
  SECTION("curl on a once-wrapped unknot: removable") {
    auto nug = find_nugatory(fixtures::kink_unknot_wrap1());
    REQUIRE(nug.size() == 1);
    CHECK(nug[0].removable);
  }
}

TEST_CASE("reduced alternating trefoil has no nugatory crossings") {
  AnnularDiagram d({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {}, FaceRef::edge_side(1, 'R'),
                   FaceRef::edge_side(2, 'L'));
  CHECK(find_nugatory(d).empty());
}

TEST_CASE("mirror is an involution up to canonical form") {
  AnnularDiagram trefoil({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {},
                         FaceRef::edge_side(1, 'R'), FaceRef::edge_side(2, 'L'));
  auto m = mirror(trefoil);
  CHECK(diagram_wrap(m) == diagram_wrap(trefoil));
  CHECK(structurally_equal(mirror(m), trefoil));
  CHECK(structurally_equal(trefoil, trefoil));
}

TEST_CASE("oriented mirror flips crossing signs and double mirror restores") {
  auto d = fixtures::sigma1_closure();
  REQUIRE(d.oriented());
  CHECK(d.positive_crossings() == 1);
  auto m = mirror(d);
  CHECK(m.positive_crossings() == 0);
  CHECK(m.negative_crossings() == 1);
  auto mm = mirror(m);
  CHECK(mm.to_json() == d.to_json());  // oriented double mirror is bytewise identity
}

TEST_CASE("mirror of positive trefoil equals hand-encoded negative trefoil") {
  AnnularDiagram pos({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {}, FaceRef::edge_side(1, 'R'),
                     FaceRef::edge_side(2, 'L'));
  // Negative letters produce tuples (c_g, c_{g+1}, n_{g+1}, n_g).
  AnnularDiagram neg({{1, 2, 4, 3}, {3, 4, 6, 5}, {5, 6, 2, 1}}, {}, FaceRef::edge_side(1, 'R'),
                     FaceRef::edge_side(2, 'L'));
  CHECK(structurally_equal(mirror(pos), neg));
  CHECK_FALSE(structurally_equal(pos, neg));
}

TEST_CASE("orientation validation") {
  // Wrong over-in slot value.
  CHECK_THROWS_AS(fixtures::one_crossing(FaceRef::edge_side(1, 'L'), FaceRef::edge_side(2, 'L'),
                                         std::vector<int>{2}),
                  ValidationError);
  // Inconsistent orientation along a strand: trefoil with one flipped slot.
  CHECK_THROWS_AS(AnnularDiagram({{2, 4, 3, 1}, {4, 6, 5, 3}, {6, 2, 1, 5}}, {},
                                 FaceRef::edge_side(1, 'R'), FaceRef::edge_side(2, 'L'),
                                 std::vector<int>{3, 1, 3}),
                  ValidationError);
}

TEST_CASE("free loop triviality must match markers") {
  CHECK_THROWS_AS(AnnularDiagram({}, {FreeLoop{true, FaceRef::root()}}, FaceRef::loop_inside(0),
                                 FaceRef::root()),
                  ValidationError);
  CHECK_THROWS_AS(AnnularDiagram({}, {FreeLoop{false, FaceRef::root()}}, FaceRef::root(),
                                 FaceRef::root()),
                  ValidationError);
}

TEST_CASE("free loop nesting must be a forest") {
  std::vector<FreeLoop> loops = {FreeLoop{true, FaceRef::loop_inside(1)},
                                 FreeLoop{true, FaceRef::loop_inside(0)}};
  CHECK_THROWS_AS(AnnularDiagram({}, loops, FaceRef::root(), FaceRef::root()), ValidationError);
}
