#include "relim/protocols.hpp"

#include <stdexcept>

namespace relim {

bool local_wedge(const VertexInput& in) {
  for (const auto& v : in.vectors) {
    if (v.count(0) == 0) return false;
  }
  return true;
}

namespace {

MessageMap to_partners(int round, const VertexInput& in, const std::function<std::optional<Bits>(VertexId, int)>& f) {
  MessageMap out;
  for (const auto& w : in.partners_upto(in.r + 1 - round)) {
    if (auto b = f(w, in.type_to(w))) out.emplace(w, std::move(*b));
  }
  return out;
}

ProtocolSpec base(const std::string& name, int rounds, int bandwidth) {
  if (rounds < 0) throw std::invalid_argument("rounds must be non-negative");
  if (bandwidth < 1) throw std::invalid_argument("bandwidth must be >= 1");
  ProtocolSpec p;
  p.name = name;
  p.rounds = rounds;
  p.bandwidth = bandwidth;
  p.deterministic = true;
  p.identity_oblivious = true;
  return p;
}

}  // namespace

ProtocolSpec make_protocol(const std::string& name, int rounds, int bandwidth) {
  auto p = base(name, rounds, bandwidth);
  if (name == "all-no" || name == "always-yes") {
    const bool answer = name == "always-yes";
    p.message_fn = [](int, const VertexInput&, const Inbox&, const RandomnessView&) { return MessageMap{}; };
    p.output_fn = [answer](const VertexInput&, const Inbox&, const RandomnessView&) { return answer; };
    p.pair_local = true;
    p.pair_rule = [](int) -> std::optional<Bits> { return std::nullopt; };
    return p;
  }
  if (name == "constant-message") {
    p.message_fn = [](int round, const VertexInput& in, const Inbox&, const RandomnessView&) {
      return to_partners(round, in, [](VertexId, int) -> std::optional<Bits> { return Bits{true}; });
    };
    p.output_fn = [](const VertexInput& in, const Inbox&, const RandomnessView&) { return local_wedge(in); };
    p.pair_local = true;
    p.pair_rule = [](int) -> std::optional<Bits> { return Bits{true}; };
    return p;
  }
  if (name == "type-broadcast") {
    p.message_fn = [](int round, const VertexInput& in, const Inbox&, const RandomnessView&) {
      return to_partners(round, in, [](VertexId, int t) -> std::optional<Bits> { return Bits{t == 0}; });
    };
    p.output_fn = [](const VertexInput& in, const Inbox&, const RandomnessView&) { return local_wedge(in); };
    p.pair_local = true;
    p.pair_rule = [](int t) -> std::optional<Bits> { return Bits{t == 0}; };
    return p;
  }
  if (name == "parity-of-type-0-count") {
    // bit to w: parity of the type-0 pairs toward w's layer at smaller index
    p.message_fn = [](int round, const VertexInput& in, const Inbox&, const RandomnessView&) {
      return to_partners(round, in, [&in](VertexId w, int) -> std::optional<Bits> {
        const auto& v = in.toward(w.layer);
        bool parity = false;
        if (v.default_type == 0) {
          for (std::int64_t j = 1; j < w.index; ++j) parity ^= (v.at(j) == 0);
        } else {
          for (const auto& [j, t] : v.entries) {
            if (j >= w.index) break;
            parity ^= (t == 0);
          }
        }
        return Bits{parity};
      });
    };
    p.output_fn = [](const VertexInput& in, const Inbox&, const RandomnessView&) { return local_wedge(in); };
    p.identity_oblivious = false;
    return p;
  }
  throw std::invalid_argument("unknown protocol: " + name);
}

std::vector<std::string> protocol_names() {
  return {"all-no", "always-yes", "constant-message", "type-broadcast", "parity-of-type-0-count"};
}

}  // namespace relim
