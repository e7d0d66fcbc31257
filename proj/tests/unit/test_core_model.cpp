#include <doctest.h>

#include "relim/core_model.hpp"

using namespace relim;

namespace {

TypedTripartiteGraph triangle_graph(int r = 0) {
  GraphBuilder b(2, r);
  b.set({Layer::A, 1}, {Layer::B, 1}, 0);
  b.set({Layer::A, 1}, {Layer::C, 2}, 0);
  b.set({Layer::B, 1}, {Layer::C, 2}, 0);
  return std::move(b).build();
}

}  // namespace

TEST_CASE("default type is r+1 and pairs are symmetric") {
  GraphBuilder b(3, 2);
  b.set({Layer::A, 1}, {Layer::C, 3}, 1);
  auto g = std::move(b).build();
  CHECK(g.pair_type({Layer::A, 1}, {Layer::C, 3}) == 1);
  CHECK(g.pair_type({Layer::C, 3}, {Layer::A, 1}) == 1);
  CHECK(g.pair_type({Layer::A, 2}, {Layer::B, 2}) == 3);
  CHECK(g.non_default_count() == 1);
}

TEST_CASE("same-layer and out-of-range queries are rejected") {
  GraphBuilder b(3, 1);
  CHECK_THROWS_AS(b.set({Layer::A, 1}, {Layer::A, 2}, 0), SameLayerPair);
  CHECK_THROWS_AS(b.set({Layer::A, 1}, {Layer::B, 2}, 3), std::invalid_argument);
  auto g = std::move(b).build();
  CHECK_THROWS_AS(g.pair_type({Layer::A, 4}, {Layer::B, 1}), OutOfRange);
  CHECK_THROWS_AS(neighborhood(g, {Layer::B, 1}, Layer::B), SameLayerPair);
}

TEST_CASE("round i runs over pairs of type <= r+1-i") {
  GraphBuilder b(2, 2);
  b.set({Layer::A, 1}, {Layer::B, 1}, 0);
  b.set({Layer::A, 1}, {Layer::B, 2}, 1);
  b.set({Layer::A, 2}, {Layer::C, 1}, 2);
  auto g = std::move(b).build();
  CHECK(channels_at_round(g, 1).size() == 3);
  CHECK(channels_at_round(g, 2).size() == 2);
  CHECK_THROWS_AS(channels_at_round(g, 3), RoundOutOfRange);
  CHECK_THROWS_AS(channels_at_round(g, 0), RoundOutOfRange);
  CHECK(channel_degree(g, {Layer::A, 1}, 1, Layer::B) == 1);
  CHECK(total_channel_degree(g, {Layer::A, 1}) == 2);
}

TEST_CASE("triangles use type-0 pairs only") {
  CHECK(has_triangle(triangle_graph()));
  GraphBuilder b(2, 1);
  b.set({Layer::A, 1}, {Layer::B, 1}, 0);
  b.set({Layer::A, 1}, {Layer::C, 1}, 0);
  b.set({Layer::B, 1}, {Layer::C, 1}, 1);
  CHECK_FALSE(has_triangle(std::move(b).build()));
}

TEST_CASE("neighborhood vectors are sparse over the default") {
  auto g = triangle_graph(1);
  auto nv = neighborhood(g, {Layer::A, 1}, Layer::C);
  CHECK(nv.n == 2);
  CHECK(nv.default_type == 2);
  CHECK(nv.at(2) == 0);
  CHECK(nv.at(1) == 2);
  CHECK(nv.count(0) == 1);
  CHECK(nv.dense() == std::vector<int>{2, 0});
}

TEST_CASE("validation collects every violation") {
  InstanceData d;
  d.n = 2;
  d.r = 1;
  d.pairs = {{{Layer::A, 1}, {Layer::A, 2}, 0},
             {{Layer::A, 1}, {Layer::B, 3}, 0},
             {{Layer::A, 1}, {Layer::B, 1}, 5},
             {{Layer::A, 2}, {Layer::B, 2}, 0},
             {{Layer::B, 2}, {Layer::A, 2}, 1}};
  auto v = validate(d);
  std::vector<ViolationKind> kinds;
  for (const auto& x : v) kinds.push_back(x.kind);
  auto has = [&](ViolationKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  CHECK(has(ViolationKind::SameLayerPair));
  CHECK(has(ViolationKind::IndexOutOfRange));
  CHECK(has(ViolationKind::TypeRangeViolation));
  CHECK(has(ViolationKind::SymmetryViolation));
  CHECK_THROWS_AS(TypedTripartiteGraph::from_data(d), ValidationError);

  InstanceData e;
  e.n = 0;
  e.r = -1;
  CHECK(validate(e).size() >= 2);
}

TEST_CASE("to_data round trip") {
  auto g = triangle_graph(2);
  CHECK(TypedTripartiteGraph::from_data(g.to_data()) == g);
}

TEST_CASE("vertex ids render as layer letter and index") {
  CHECK(VertexId{Layer::C, 17}.str() == "C17");
  CHECK(parse_layer("B") == Layer::B);
  CHECK(other_layers(Layer::B) == std::array<Layer, 2>{Layer::A, Layer::C});
  CHECK(side_of(Layer::B, Layer::C) == 1);
  CHECK(vertex_from_code(vertex_code({Layer::B, 99})) == VertexId{Layer::B, 99});
}
