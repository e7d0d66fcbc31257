#include <doctest.h>

#include <sstream>

#include "relim/hard_distributions.hpp"
#include "relim/io.hpp"
#include "relim/protocols.hpp"

using namespace relim;

TEST_CASE("instance JSON round trip") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  Tape t(1);
  auto h = sample_level(p, 1, t);
  auto j = instance_to_json(h.graph);
  CHECK(j.at("n") == 40);
  CHECK(instance_from_json(json::parse(j.dump())) == h.graph);
}

TEST_CASE("numeric layers are accepted") {
  auto g = instance_from_json(json::parse(R"({"n":2,"r":1,"pairs":[[0,1,2,2,0]]})"));
  CHECK(g.pair_type({Layer::A, 1}, {Layer::C, 2}) == 0);
}

TEST_CASE("malformed instances") {
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":2,"r":0,"pairs":[["A",1,"A",2,0]]})")), ValidationError);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n":2,"r":0,"pairs":[["A",1,"B",3,0]]})")), ValidationError);
  CHECK_THROWS(instance_from_json(json::parse(R"({"n":2,"pairs":[]})")));
  CHECK_THROWS(instance_from_json(json::parse(R"({"n":2,"r":0,"pairs":[["Q",1,"B",1,0]]})")));
}

TEST_CASE("transcript JSONL round trip") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  Tape t(2);
  auto h = sample_level(p, 1, t);
  auto tr = simulate(make_protocol("type-broadcast", 1), h.graph, Randomness{}).transcript;
  std::istringstream in(transcript_to_jsonl(tr));
  CHECK(transcript_from_jsonl(in) == tr);
  auto first = json::parse(transcript_to_jsonl(tr).substr(0, transcript_to_jsonl(tr).find('\n')));
  for (const char* k : {"round", "from", "to", "bits", "len"}) CHECK(first.contains(k));
}

TEST_CASE("JointTable JSON") {
  auto t = joint_table_from_json(json::parse(R"({"coords":["X","Y"],"entries":[["a",0,0.5],["b",1,0.5]]})"));
  CHECK(t.coords() == std::vector<std::string>{"X", "Y"});
  CHECK(t.entries().size() == 2);
  CHECK(joint_table_from_json(joint_table_to_json(t)).entries() == t.entries());
  CHECK_THROWS_AS(joint_table_from_json(json::parse(R"({"coords":["X"],"entries":[[0,0.7]]})")), InvalidDistribution);
  CHECK_THROWS_AS(joint_table_from_json(json::parse(R"({"coords":["X"],"entries":[[0,1,1.0]]})")), InvalidDistribution);
}

TEST_CASE("params JSON") {
  auto p = params_from_json(json::parse(R"({"n0":2,"levels":[{"n":2000,"d":8}]})"));
  CHECK(p.n(1) == 2000);
  CHECK(p.alpha(1) == 1);
  auto back = params_from_json(json::parse(R"({"canonical":{"n0":2,"r":1}})"));
  CHECK(back.canonical);
  CHECK(params_to_json(back).at("levels")[0].at("n") == mpz_pow(2, 34).get_str());
}

TEST_CASE("vertex strings") {
  CHECK(parse_vertex("B12") == VertexId{Layer::B, 12});
  CHECK_THROWS(parse_vertex("B"));
  CHECK_THROWS(parse_vertex("B1x"));
}

TEST_CASE("sidecar carries embedding and aux") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  Tape t(3);
  auto s = sample_gr_tilde(p, 1, t);
  auto j = sidecar_json(s.instance, &s.aux, s.collision);
  CHECK(j.at("level") == 1);
  CHECK(j.contains("embedding"));
  CHECK(j.at("aux").at("per_vertex").size() == 3);
  CHECK(j.at("collision_flag") == s.collision);
}
